#include "lcarand/lucas.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace lcarand {

bool is_prime(u64 p) {
    if (p < 2) return false;
    for (u64 d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

void require_prime(u64 p) {
    if (!is_prime(p)) throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
}

u64 ipow(u64 base, unsigned e) {
    u64 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (base != 0 && r > std::numeric_limits<u64>::max() / base)
            throw std::overflow_error("integer power overflows 64 bits");
        r *= base;
    }
    return r;
}

u64 PAryExpansion::value() const {
    u64 v = 0, w = 1;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        v += digits[i] * w;
        if (i + 1 < digits.size()) w *= p;
    }
    return v;
}

PAryExpansion p_ary_digits(u64 N, u64 p) {
    require_prime(p);
    PAryExpansion e;
    e.p = p;
    while (N > 0) {
        e.digits.push_back(static_cast<unsigned>(N % p));
        N /= p;
    }
    return e;
}

unsigned lucas_binomial(u64 N, u64 n, u64 p) {
    require_prime(p);
    // digit binomials C(a,b) mod p with a,b < p via multiplicative inverses
    auto small = [p](u64 a, u64 b) -> u64 {
        if (b > a) return 0;
        unsigned __int128 num = 1, den = 1;
        for (u64 i = 0; i < b; ++i) {
            num = num * (a - i) % p;
            den = den * (i + 1) % p;
        }
        // den^(p-2) mod p
        unsigned __int128 inv = 1, base = den, e = p - 2;
        while (e) {
            if (e & 1) inv = inv * base % p;
            base = base * base % p;
            e >>= 1;
        }
        return static_cast<u64>(num * inv % p);
    };
    u64 r = 1;
    while (N > 0 || n > 0) {
        u64 a = N % p, b = n % p;
        if (b > a) return 0;
        r = static_cast<u64>((unsigned __int128)r * small(a, b) % p);
        N /= p;
        n /= p;
    }
    return static_cast<unsigned>(r);
}

bool LucasSet::contains(u64 n) const {
    return std::binary_search(elements.begin(), elements.end(), n);
}

u64 lucas_set_size(u64 N, u64 p) {
    u64 c = 1;
    for (unsigned d : p_ary_digits(N, p).digits) c *= (d + 1);
    return c;
}

LucasSet lucas_set(u64 N, u64 p) {
    PAryExpansion e = p_ary_digits(N, p);
    LucasSet s;
    s.N = N;
    s.p = p;
    s.elements.assign(1, 0);
    u64 w = 1;
    for (std::size_t i = 0; i < e.digits.size(); ++i) {
        std::vector<u64> next;
        next.reserve(s.elements.size() * (e.digits[i] + 1));
        // digit i is the most significant so far: outer loop keeps order sorted
        for (unsigned d = 0; d <= e.digits[i]; ++d)
            for (u64 x : s.elements) next.push_back(x + d * w);
        s.elements.swap(next);
        if (i + 1 < e.digits.size()) w *= p;
    }
    return s;
}

std::pair<u64, u64> lucas_decompose(u64 N, unsigned r, u64 p) {
    require_prime(p);
    u64 pr = 1;
    for (unsigned i = 0; i < r; ++i) {
        if (pr > N / p) return {N, 0};  // p^r > N
        pr *= p;
    }
    return {N % pr, N / pr};
}

std::vector<std::pair<unsigned, unsigned>> zero_blocks(u64 H, u64 p) {
    const auto& d = p_ary_digits(H, p).digits;
    std::vector<std::pair<unsigned, unsigned>> out;
    unsigned i = 1;
    while (i < d.size()) {
        if (d[i] == 0 && d[i - 1] != 0) {
            unsigned k = i;
            while (k < d.size() && d[k] == 0) ++k;
            if (k < d.size()) out.emplace_back(i, k);
            i = k;
        } else {
            ++i;
        }
    }
    return out;
}

unsigned zero_block_count(u64 H, u64 p) { return static_cast<unsigned>(zero_blocks(H, p).size()); }

std::vector<std::pair<u64, u64>> gaps_in_lucas_set(u64 H, u64 p) {
    LucasSet s = lucas_set(H, p);
    std::vector<std::pair<u64, u64>> out;
    for (std::size_t i = 1; i + 1 < s.elements.size(); ++i) {
        u64 h0 = s.elements[i], h1 = s.elements[i + 1];
        if (h1 / p > h0 || (h1 / p == h0 && h1 % p != 0)) out.emplace_back(h0, h1);
    }
    return out;
}

int j_split_position(u64 N, u64 S0, u64 p) {
    if (S0 < 1) throw std::invalid_argument("S0 must be >= 1");
    const auto& d = p_ary_digits(N, p).digits;
    // need p^r > S0 and digit r zero below the top digit
    int best = -1;
    u64 pr = 1;
    for (std::size_t r = 0; r + 1 < d.size(); ++r) {
        if (pr > S0 && d[r] == 0) best = static_cast<int>(r);
        if (pr > std::numeric_limits<u64>::max() / p) break;
        pr *= p;
    }
    return best;
}

bool in_J(u64 N, u64 S0, u64 p) { return j_split_position(N, S0, p) >= 0; }

double DensityReport::density_at(u64 checkpoint) const {
    for (const auto& [c, hits] : counts)
        if (c == checkpoint) return static_cast<double>(hits) / static_cast<double>(c);
    throw std::invalid_argument("no checkpoint " + std::to_string(checkpoint));
}

std::vector<u64> density_checkpoints(u64 horizon) {
    std::vector<u64> cps;
    for (u64 c = 1; c < horizon; c *= 2) cps.push_back(c);
    cps.push_back(horizon);
    return cps;
}

DensityReport density_from_hits(const std::vector<char>& hits) {
    if (hits.empty()) throw std::invalid_argument("density horizon must be >= 1");
    DensityReport rep;
    rep.horizon = hits.size();
    auto cps = density_checkpoints(rep.horizon);
    u64 acc = 0;
    std::size_t next = 0;
    for (u64 j = 0; j < rep.horizon; ++j) {
        acc += hits[j] ? 1 : 0;
        if (j + 1 == cps[next]) {
            rep.counts.emplace_back(cps[next], acc);
            ++next;
        }
    }
    rep.final_density = static_cast<double>(acc) / static_cast<double>(rep.horizon);
    return rep;
}

DensityReport cesaro_density(const std::function<bool(u64)>& indicator, u64 horizon) {
    if (horizon < 1) throw std::invalid_argument("density horizon must be >= 1");
    std::vector<char> hits(horizon);
    for (u64 j = 0; j < horizon; ++j) hits[j] = indicator(j) ? 1 : 0;
    return density_from_hits(hits);
}

double relative_density(const DensityReport& a, const DensityReport& b) {
    if (a.horizon != b.horizon) throw std::invalid_argument("relative density needs equal horizons");
    u64 cb = b.counts.back().second;
    if (cb == 0) throw std::invalid_argument("reference set is empty");
    return static_cast<double>(a.counts.back().second) / static_cast<double>(cb);
}

}  // namespace lcarand
