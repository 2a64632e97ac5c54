#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace lcarand {

using u64 = std::uint64_t;
using i64 = std::int64_t;

bool is_prime(u64 p);
void require_prime(u64 p);

// Little-endian digits; N = 0 has no digits.
struct PAryExpansion {
    std::vector<unsigned> digits;
    u64 p = 2;

    u64 value() const;
    unsigned digit(std::size_t i) const { return i < digits.size() ? digits[i] : 0u; }
};

PAryExpansion p_ary_digits(u64 N, u64 p);

// C(N,n) mod p by Lucas; never forms C(N,n).
unsigned lucas_binomial(u64 N, u64 n, u64 p);

struct LucasSet {
    u64 N = 0;
    u64 p = 2;
    std::vector<u64> elements;  // sorted

    std::size_t size() const { return elements.size(); }
    bool contains(u64 n) const;
};

LucasSet lucas_set(u64 N, u64 p);
u64 lucas_set_size(u64 N, u64 p);

// N = M + p^r H with M < p^r.
std::pair<u64, u64> lucas_decompose(u64 N, unsigned r, u64 p);

unsigned zero_block_count(u64 H, u64 p);
// Zero blocks as (i, k): digit i-1 nonzero, digits i..k-1 zero, digit k nonzero.
std::vector<std::pair<unsigned, unsigned>> zero_blocks(u64 H, u64 p);

std::vector<std::pair<u64, u64>> gaps_in_lucas_set(u64 H, u64 p);

bool in_J(u64 N, u64 S0, u64 p);
// Largest admissible r for the J(S0) split, or -1.
int j_split_position(u64 N, u64 S0, u64 p);

struct DensityReport {
    u64 horizon = 0;
    std::vector<std::pair<u64, u64>> counts;  // (checkpoint, hits in [0, checkpoint))
    double final_density = 0.0;

    double density_at(u64 checkpoint) const;
};

// Checkpoints at powers of 2 below the horizon, plus the horizon.
std::vector<u64> density_checkpoints(u64 horizon);
DensityReport density_from_hits(const std::vector<char>& hits);
DensityReport cesaro_density(const std::function<bool(u64)>& indicator, u64 horizon);
double relative_density(const DensityReport& a, const DensityReport& b);

u64 ipow(u64 base, unsigned e);

}  // namespace lcarand
