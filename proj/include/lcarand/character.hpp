#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lcarand/lca.hpp"

namespace lcarand {

using FreqVec = std::vector<std::uint32_t>;

// chi(a) = prod_k omega^{u_k . a_k}, omega = exp(2 pi i / p).
class Character {
public:
    Character() = default;
    Character(u64 p, unsigned s);
    Character(u64 p, unsigned s, const std::map<i64, FreqVec>& freqs);

    static Character single(u64 p, i64 site, std::uint32_t freq = 1);
    // s = 1 parity-style character with frequency 1 on each site.
    static Character on_sites(u64 p, const std::vector<i64>& sites);

    u64 p() const { return p_; }
    unsigned s() const { return s_; }
    const std::map<i64, FreqVec>& freqs() const { return freqs_; }
    bool trivial() const { return freqs_.empty(); }
    std::vector<i64> sites() const;
    i64 min_site() const;
    i64 max_site() const;

    void set(i64 site, FreqVec u);  // zero vectors are dropped
    Character translated(i64 by) const;
    Character scaled(u64 c) const;

    std::string to_string() const;
    bool operator==(const Character& o) const {
        return p_ == o.p_ && s_ == o.s_ && freqs_ == o.freqs_;
    }

private:
    u64 p_ = 2;
    unsigned s_ = 1;
    std::map<i64, FreqVec> freqs_;
};

// Angle index t in [0,p) with chi(a) = omega^t.
std::uint32_t angle(const Character& chi, const Window& a);
std::complex<double> evaluate(const Character& chi, const Window& a);
std::complex<double> root_of_unity(u64 p, std::uint64_t t);

std::size_t rank(const Character& chi);
u64 diam(const Character& chi);
unsigned s_rank(const Character& chi, u64 S);

// chi o Phi: v_m = sum_f phi_f u_{m-f}.
Character pullback(const Character& chi, const LcaPolynomial& phi);

u64 ldm(const Character& chi);
Character dilate(const Character& chi, u64 h);

// "sites=0,5,6 freqs=1,1,1" or "sites=0,1 freqs=(1|0),(2|1)"
Character parse_character(const std::string& text, u64 p, unsigned s);

}  // namespace lcarand
