#include "lcarand/lca.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lcarand/errors.hpp"

namespace lcarand {

namespace {

i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("exponent overflow");
    return r;
}

i64 checked_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("exponent overflow");
    return r;
}

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((unsigned __int128)a * b % p); }

u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

void same_p(const LcaPolynomial& a, const LcaPolynomial& b) {
    if (a.p() != b.p()) throw std::invalid_argument("LCA polynomials over different primes");
}

}  // namespace

LcaPolynomial::LcaPolynomial(u64 p, std::map<i64, u64> terms) : p_(p) {
    require_prime(p);
    for (auto& [e, c] : terms)
        if (c % p != 0) terms_.emplace(e, c % p);
}

LcaPolynomial LcaPolynomial::monomial(u64 p, i64 e, u64 c) { return LcaPolynomial(p, {{e, c}}); }

LcaPolynomial LcaPolynomial::lca(u64 p, std::map<i64, u64> terms) {
    LcaPolynomial r(p, std::move(terms));
    if (r.size() < 2) throw std::invalid_argument("an LCA needs at least two nonzero terms");
    return r;
}

u64 LcaPolynomial::coeff(i64 e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0 : it->second;
}

std::vector<i64> LcaPolynomial::exponents() const {
    std::vector<i64> v;
    v.reserve(terms_.size());
    for (const auto& t : terms_) v.push_back(t.first);
    return v;
}

LcaPolynomial LcaPolynomial::shifted(i64 by) const {
    LcaPolynomial r;
    r.p_ = p_;
    for (const auto& [e, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), checked_add(e, by), c);
    return r;
}

LcaPolynomial LcaPolynomial::frobenius(unsigned r) const {
    i64 q = static_cast<i64>(ipow(p_, r));
    LcaPolynomial out;
    out.p_ = p_;
    for (const auto& [e, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), checked_mul(e, q), c);
    return out;
}

std::string LcaPolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << '+';
        first = false;
        if (e == 0) {
            os << c;
            continue;
        }
        if (c != 1) os << c << '*';
        os << 'x';
        if (e != 1) os << '^' << e;
    }
    return os.str();
}

LcaPolynomial parse_lca(const std::string& text, u64 p) {
    require_prime(p);
    std::map<i64, u64> acc;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto read_int = [&](bool allow_sign) -> i64 {
        skip();
        std::size_t start = i;
        bool neg = false;
        if (allow_sign && i < text.size() && (text[i] == '-' || text[i] == '+')) {
            neg = text[i] == '-';
            ++i;
        }
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
            throw ParseError("expected integer", start);
        i64 v = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (v > (std::numeric_limits<i64>::max() - 9) / 10) throw ParseError("integer too large", start);
            v = v * 10 + (text[i] - '0');
            ++i;
        }
        return neg ? -v : v;
    };
    skip();
    if (i >= text.size()) throw ParseError("empty LCA expression", 0);
    bool expect_term = true;
    while (true) {
        skip();
        int sign = 1;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            if (text[i] == '-') sign = -1;
            ++i;
            skip();
        } else if (!expect_term) {
            throw ParseError("expected '+' or '-'", i);
        }
        expect_term = false;
        if (i >= text.size()) throw ParseError("dangling operator", i);
        u64 coef = 1;
        i64 e = 0;
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            coef = static_cast<u64>(read_int(false)) % p;
            std::size_t after = i;
            skip();
            if (i < text.size() && text[i] != '*') i = after;  // bare juxtaposition only when adjacent
            if (i < text.size() && text[i] == '*') {
                ++i;
                skip();
                if (i >= text.size() || text[i] != 'x') throw ParseError("expected 'x' after '*'", i);
            }
        }
        if (i < text.size() && text[i] == 'x') {
            ++i;
            e = 1;
            skip();
            if (i < text.size() && text[i] == '^') {
                ++i;
                e = read_int(true);
            }
        }
        if (sign < 0) coef = (p - coef % p) % p;
        acc[e] = (acc[e] + coef) % p;
        skip();
        if (i >= text.size()) break;
    }
    LcaPolynomial r(p, acc);
    if (r.is_zero()) throw ParseError("expression reduces to zero mod p", 0);
    return r;
}

LcaPolynomial add(const LcaPolynomial& a, const LcaPolynomial& b) {
    same_p(a, b);
    std::map<i64, u64> t = a.terms();
    for (const auto& [e, c] : b.terms()) t[e] = (t[e] + c) % a.p();
    return LcaPolynomial(a.p(), std::move(t));
}

LcaPolynomial multiply(const LcaPolynomial& a, const LcaPolynomial& b) {
    same_p(a, b);
    const u64 p = a.p();
    std::map<i64, u64> t;
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            u64& slot = t[checked_add(ea, eb)];
            slot = (slot + mulmod(ca, cb, p)) % p;
        }
    return LcaPolynomial(p, std::move(t));
}

LcaPolynomial power_naive(const LcaPolynomial& phi, u64 N) {
    LcaPolynomial r = LcaPolynomial::one(phi.p());
    for (u64 i = 0; i < N; ++i) r = multiply(r, phi);
    return r;
}

LcaPolynomial power_fast(const LcaPolynomial& phi, u64 N) {
    const u64 p = phi.p();
    if (N == 0) return LcaPolynomial::one(p);
    if (phi.size() == 2) {
        // a s^e0 (1 + c s^g)  ->  a^N s^{N e0} sum_{n in Lambda(N)} C(N,n) c^n s^{g n}
        auto it = phi.terms().begin();
        auto [e0, a] = *it;
        ++it;
        auto [e1, b] = *it;
        u64 c = mulmod(b, powmod(a, p - 2, p), p);
        u64 aN = powmod(a, N, p);
        i64 g = e1 - e0;
        i64 base = checked_mul(e0, static_cast<i64>(N));
        std::map<i64, u64> t;
        for (u64 n : lucas_set(N, p).elements) {
            u64 coef = mulmod(mulmod(aN, lucas_binomial(N, n, p), p), powmod(c, n, p), p);
            t.emplace_hint(t.end(), checked_add(base, checked_mul(g, static_cast<i64>(n))), coef);
        }
        return LcaPolynomial(p, std::move(t));
    }
    // Phi^N = prod_i (Phi^{p^i})^{N_i}, and Phi^{p^i} is a Frobenius relabelling.
    LcaPolynomial r = LcaPolynomial::one(p);
    const auto& d = p_ary_digits(N, p).digits;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0) continue;
        LcaPolynomial fi = phi.frobenius(static_cast<unsigned>(i));
        for (unsigned k = 0; k < d[i]; ++k) r = multiply(r, fi);
    }
    return r;
}

u64 diam(const LcaPolynomial& phi) {
    if (phi.is_zero()) throw std::invalid_argument("diam of zero polynomial");
    return static_cast<u64>(phi.max_exp() - phi.min_exp());
}

Rational centre(const LcaPolynomial& phi) {
    if (phi.is_zero()) throw std::invalid_argument("centre of zero polynomial");
    i64 sum = 0;
    for (const auto& t : phi.terms()) sum = checked_add(sum, t.first);
    return Rational(sum, static_cast<i64>(phi.size()));
}

Rational K_p(u64 p) {
    require_prime(p);
    Rational a(1, 2);
    Rational b(4 * static_cast<i64>(p) - 7, 4 * static_cast<i64>(p) + 4);
    return std::min(a, b);
}

LcaPolynomial BipartiteForm::expand() const {
    return add(LcaPolynomial::one(p), gamma.shifted(f));
}

std::optional<BipartiteForm> classify_bipartite(const LcaPolynomial& phi) {
    const u64 p = phi.p();
    if (phi.coeff(0) != 1) return std::nullopt;
    std::map<i64, u64> rest = phi.terms();
    rest.erase(0);
    if (rest.empty()) return std::nullopt;
    LcaPolynomial psi(p, rest);
    Rational c = centre(psi);
    i64 lo = c.numerator() / c.denominator();
    if (c.numerator() < 0 && c.numerator() % c.denominator() != 0) --lo;  // floor
    std::vector<i64> cands{lo};
    if (Rational(lo) != c) cands.push_back(lo + 1);
    const Rational kp = K_p(p);
    const i64 d = static_cast<i64>(diam(psi));
    for (i64 f : cands) {
        if (f == 0) continue;
        Rational cg = c - f;
        if (boost::abs(cg) >= 1) continue;
        if (Rational(d) > kp * (f < 0 ? -f : f)) continue;
        return BipartiteForm{psi.shifted(-f), f, p};
    }
    return std::nullopt;
}

PowerSplit lucas_power_split(const BipartiteForm& form, u64 N, u64 S0) {
    const u64 p = form.p;
    int r0 = j_split_position(N, S0, p);
    if (r0 < 0) {
        std::ostringstream os;
        os << "N = " << N << " is not in J(" << S0 << ") for p = " << p
           << ": no zero digit N^(r) with p^r > S0 below the leading digit";
        throw std::invalid_argument(os.str());
    }
    PowerSplit out;
    out.r = static_cast<unsigned>(r0 + 1);
    std::tie(out.M, out.H) = lucas_decompose(N, out.r, p);
    LcaPolynomial phi = form.expand();
    LcaPolynomial theta = phi.frobenius(out.r);
    out.assembled = multiply(power_fast(phi, out.M), power_fast(theta, out.H));
    return out;
}

unsigned s_rank(const std::vector<i64>& sorted_sites, u64 S) {
    if (S < 1) throw std::invalid_argument("S must be >= 1");
    if (sorted_sites.empty()) throw std::invalid_argument("s_rank of an empty support");
    unsigned r = 1;
    for (std::size_t i = 1; i < sorted_sites.size(); ++i)
        if (static_cast<u64>(sorted_sites[i] - sorted_sites[i - 1]) >= S) ++r;
    return r;
}

unsigned s_rank(const LcaPolynomial& phi, u64 S) { return s_rank(phi.exponents(), S); }

namespace {

Window apply_impl(const LcaPolynomial& phi, const Window& in, bool parallel) {
    const u64 p = phi.p();
    const std::size_t len = in.length();
    const u64 d = diam(phi);
    if (len <= d) throw std::invalid_argument("window shorter than diam(Phi) + 1");
    Window out;
    out.s = in.s;
    out.offset = in.offset - phi.min_exp();
    const std::size_t olen = len - d;
    out.data.assign(olen * in.s, 0);
    std::vector<std::pair<std::size_t, u64>> taps;  // input index offset, coefficient
    for (const auto& [e, c] : phi.terms()) taps.emplace_back(static_cast<std::size_t>(e - phi.min_exp()), c);
    const unsigned s = in.s;
    const std::uint32_t* src = in.data.data();
    std::uint32_t* dst = out.data.data();
    const auto n = static_cast<std::int64_t>(olen);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t m = 0; m < n; ++m) {
        for (unsigned k = 0; k < s; ++k) {
            u64 acc = 0;
            for (const auto& [off, c] : taps) {
                acc += c * src[(m + off) * s + k];
                if (acc >= (u64{1} << 62)) acc %= p;
            }
            dst[m * s + k] = static_cast<std::uint32_t>(acc % p);
        }
    }
    return out;
}

}  // namespace

Window apply(const LcaPolynomial& phi, const Window& in) { return apply_impl(phi, in, true); }
Window apply_serial(const LcaPolynomial& phi, const Window& in) { return apply_impl(phi, in, false); }

}  // namespace lcarand
