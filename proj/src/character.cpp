#include "lcarand/character.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lcarand/errors.hpp"

namespace lcarand {

Character::Character(u64 p, unsigned s) : p_(p), s_(s) {
    require_prime(p);
    if (s < 1) throw std::invalid_argument("s must be >= 1");
}

Character::Character(u64 p, unsigned s, const std::map<i64, FreqVec>& freqs) : Character(p, s) {
    for (const auto& [k, u] : freqs) set(k, u);
}

Character Character::single(u64 p, i64 site, std::uint32_t freq) {
    Character c(p, 1);
    c.set(site, {freq});
    return c;
}

Character Character::on_sites(u64 p, const std::vector<i64>& sites) {
    Character c(p, 1);
    for (i64 k : sites) c.set(k, {1});
    return c;
}

void Character::set(i64 site, FreqVec u) {
    if (u.size() != s_) throw std::invalid_argument("frequency vector has wrong dimension");
    bool nonzero = false;
    for (auto& x : u) {
        x = static_cast<std::uint32_t>(x % p_);
        nonzero |= x != 0;
    }
    if (nonzero)
        freqs_[site] = std::move(u);
    else
        freqs_.erase(site);
}

std::vector<i64> Character::sites() const {
    std::vector<i64> v;
    v.reserve(freqs_.size());
    for (const auto& f : freqs_) v.push_back(f.first);
    return v;
}

i64 Character::min_site() const {
    if (trivial()) throw std::invalid_argument("trivial character has no support");
    return freqs_.begin()->first;
}

i64 Character::max_site() const {
    if (trivial()) throw std::invalid_argument("trivial character has no support");
    return freqs_.rbegin()->first;
}

Character Character::translated(i64 by) const {
    Character c(p_, s_);
    for (const auto& [k, u] : freqs_) c.freqs_.emplace_hint(c.freqs_.end(), k + by, u);
    return c;
}

Character Character::scaled(u64 c) const {
    Character out(p_, s_);
    for (const auto& [k, u] : freqs_) {
        FreqVec v(u);
        for (auto& x : v) x = static_cast<std::uint32_t>((unsigned __int128)x * c % p_);
        out.set(k, std::move(v));
    }
    return out;
}

std::string Character::to_string() const {
    std::ostringstream os;
    os << "sites=";
    bool first = true;
    for (const auto& f : freqs_) {
        os << (first ? "" : ",") << f.first;
        first = false;
    }
    os << " freqs=";
    first = true;
    for (const auto& [k, u] : freqs_) {
        os << (first ? "" : ",");
        first = false;
        if (s_ == 1) {
            os << u[0];
        } else {
            os << '(';
            for (unsigned i = 0; i < s_; ++i) os << (i ? "|" : "") << u[i];
            os << ')';
        }
    }
    return os.str();
}

std::uint32_t angle(const Character& chi, const Window& a) {
    if (a.s != chi.s()) throw std::invalid_argument("window dimension does not match character");
    const u64 p = chi.p();
    u64 t = 0;
    for (const auto& [k, u] : chi.freqs()) {
        if (k < a.offset || k >= a.end()) throw std::invalid_argument("window does not cover character support");
        const std::uint32_t* x = a.site(k);
        for (unsigned i = 0; i < chi.s(); ++i) t = (t + (u64)u[i] * x[i]) % p;
    }
    return static_cast<std::uint32_t>(t);
}

std::complex<double> root_of_unity(u64 p, std::uint64_t t) {
    t %= p;
    if (t == 0) return {1.0, 0.0};
    if (2 * t == p) return {-1.0, 0.0};
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(p));
}

std::complex<double> evaluate(const Character& chi, const Window& a) {
    return root_of_unity(chi.p(), angle(chi, a));
}

std::size_t rank(const Character& chi) { return chi.freqs().size(); }

u64 diam(const Character& chi) { return static_cast<u64>(chi.max_site() - chi.min_site()); }

unsigned s_rank(const Character& chi, u64 S) {
    if (chi.trivial()) throw std::invalid_argument("s_rank of trivial character");
    return s_rank(chi.sites(), S);
}

Character pullback(const Character& chi, const LcaPolynomial& phi) {
    if (chi.p() != phi.p()) throw std::invalid_argument("character and LCA over different primes");
    const u64 p = chi.p();
    const unsigned s = chi.s();
    std::map<i64, std::vector<u64>> acc;
    for (const auto& [k, u] : chi.freqs())
        for (const auto& [f, c] : phi.terms()) {
            auto& v = acc[k + f];
            if (v.empty()) v.assign(s, 0);
            for (unsigned i = 0; i < s; ++i) v[i] = (v[i] + c * u[i]) % p;
        }
    Character out(p, s);
    for (auto& [m, v] : acc) out.set(m, FreqVec(v.begin(), v.end()));
    return out;
}

u64 ldm(const Character& chi) {
    u64 d = diam(chi);
    u64 q = 1;
    while (q <= d) q *= chi.p();
    return q;
}

Character dilate(const Character& chi, u64 h) {
    const u64 p = chi.p();
    const i64 stride = static_cast<i64>(ldm(chi));
    Character out(p, chi.s());
    // translates are disjoint, so each is written once
    for (u64 l : lucas_set(h, p).elements) {
        u64 c = lucas_binomial(h, l, p);
        Character t = chi.scaled(c);
        for (const auto& [k, u] : t.freqs()) out.set(k + stride * static_cast<i64>(l), u);
    }
    return out;
}

namespace {

struct Cursor {
    const std::string& t;
    std::size_t i = 0;

    void skip() {
        while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < t.size() && t[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", i);
    }
    void keyword(const char* k) {
        skip();
        std::string kw(k);
        if (t.compare(i, kw.size(), kw) != 0) throw ParseError("expected '" + kw + "'", i);
        i += kw.size();
    }
    i64 integer() {
        skip();
        std::size_t start = i;
        bool neg = false;
        if (i < t.size() && (t[i] == '-' || t[i] == '+')) neg = t[i++] == '-';
        if (i >= t.size() || !std::isdigit(static_cast<unsigned char>(t[i]))) throw ParseError("expected integer", start);
        i64 v = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
            if (v > 100000000000000000LL) throw ParseError("integer too large", start);
            v = v * 10 + (t[i++] - '0');
        }
        return neg ? -v : v;
    }
};

}  // namespace

Character parse_character(const std::string& text, u64 p, unsigned s) {
    Cursor c{text};
    c.keyword("sites");
    c.expect('=');
    std::vector<i64> sites{c.integer()};
    while (c.eat(',')) sites.push_back(c.integer());
    c.keyword("freqs");
    c.expect('=');
    std::vector<FreqVec> fv;
    do {
        FreqVec u;
        if (c.eat('(')) {
            auto residue = [p](i64 v) { return static_cast<std::uint32_t>(((v % (i64)p) + (i64)p) % (i64)p); };
            u.push_back(residue(c.integer()));
            while (c.eat('|')) u.push_back(residue(c.integer()));
            c.expect(')');
        } else {
            std::size_t at = c.i;
            i64 v = c.integer();
            if (v < 0) throw ParseError("frequency must be non-negative", at);
            u.push_back(static_cast<std::uint32_t>(v));
        }
        if (u.size() != s) throw ParseError("frequency vector has " + std::to_string(u.size()) + " components, expected " + std::to_string(s), c.i);
        fv.push_back(std::move(u));
    } while (c.eat(','));
    c.skip();
    if (c.i != text.size()) throw ParseError("trailing input", c.i);
    if (fv.size() != sites.size()) throw ParseError("sites and freqs differ in length", c.i);
    Character chi(p, s);
    for (std::size_t k = 0; k < sites.size(); ++k) {
        if (chi.freqs().count(sites[k])) throw ParseError("duplicate site " + std::to_string(sites[k]), 0);
        chi.set(sites[k], fv[k]);
    }
    return chi;
}

}  // namespace lcarand
