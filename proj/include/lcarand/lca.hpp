#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcarand/lucas.hpp"

namespace lcarand {

using Rational = boost::rational<i64>;

// Phi = sum_f phi_f sigma^f over Z/p. Coefficients are stored in [1,p).
class LcaPolynomial {
public:
    LcaPolynomial() = default;
    LcaPolynomial(u64 p, std::map<i64, u64> terms);

    static LcaPolynomial one(u64 p) { return monomial(p, 0, 1); }
    static LcaPolynomial monomial(u64 p, i64 e, u64 c = 1);
    // User-facing constructor: needs at least two terms.
    static LcaPolynomial lca(u64 p, std::map<i64, u64> terms);

    u64 p() const { return p_; }
    const std::map<i64, u64>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    i64 min_exp() const { return terms_.begin()->first; }
    i64 max_exp() const { return terms_.rbegin()->first; }
    u64 coeff(i64 e) const;
    std::vector<i64> exponents() const;

    LcaPolynomial shifted(i64 by) const;
    // Exponents times p^r; coefficients are fixed by x -> x^p on Z/p.
    LcaPolynomial frobenius(unsigned r = 1) const;

    std::string to_string() const;
    bool operator==(const LcaPolynomial& o) const { return p_ == o.p_ && terms_ == o.terms_; }
    bool operator!=(const LcaPolynomial& o) const { return !(*this == o); }

private:
    u64 p_ = 2;
    std::map<i64, u64> terms_;
};

LcaPolynomial parse_lca(const std::string& text, u64 p);

LcaPolynomial multiply(const LcaPolynomial& a, const LcaPolynomial& b);
LcaPolynomial add(const LcaPolynomial& a, const LcaPolynomial& b);
LcaPolynomial power_naive(const LcaPolynomial& phi, u64 N);
LcaPolynomial power_fast(const LcaPolynomial& phi, u64 N);

u64 diam(const LcaPolynomial& phi);
Rational centre(const LcaPolynomial& phi);
Rational K_p(u64 p);

struct BipartiteForm {
    LcaPolynomial gamma;
    i64 f = 0;
    u64 p = 2;

    LcaPolynomial expand() const;  // 1 + gamma * sigma^f
};

std::optional<BipartiteForm> classify_bipartite(const LcaPolynomial& phi);

struct PowerSplit {
    u64 M = 0;
    unsigned r = 0;
    u64 H = 0;
    LcaPolynomial assembled;  // Phi^M * (Phi^{p^r})^H
};

PowerSplit lucas_power_split(const BipartiteForm& phi, u64 N, u64 S0);

unsigned s_rank(const std::vector<i64>& sorted_sites, u64 S);
unsigned s_rank(const LcaPolynomial& phi, u64 S);

// Finite configuration over (Z/p)^s on sites [offset, offset + length).
struct Window {
    i64 offset = 0;
    unsigned s = 1;
    std::vector<std::uint32_t> data;  // site-major, s components per site

    std::size_t length() const { return data.size() / s; }
    i64 end() const { return offset + static_cast<i64>(length()); }
    const std::uint32_t* site(i64 m) const { return data.data() + (m - offset) * s; }
    std::uint32_t* site(i64 m) { return data.data() + (m - offset) * s; }
};

// out_m = sum_f phi_f a_{m+f}; valid range shrinks by diam, never wraps.
Window apply(const LcaPolynomial& phi, const Window& in);
Window apply_serial(const LcaPolynomial& phi, const Window& in);

}  // namespace lcarand
