#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcarand/measures.hpp"

namespace lcarand {

enum class Method { Auto, Exact, MonteCarlo };
Method parse_method(const std::string& s);

struct TrajectoryOptions {
    Method method = Method::Auto;
    std::uint64_t samples = 0;  // Monte Carlo only
    std::uint64_t seed = 1;
    ExactOptions exact;
    bool parallel = true;
};

struct TrajectoryEntry {
    u64 j = 0;
    SpectralValue value;
};

struct SpectralTrajectory {
    std::vector<TrajectoryEntry> entries;
    Character chi;
    LcaPolynomial phi;
    std::string model;
};

// <chi o Phi^j, mu> for j = 0..j_max.
SpectralTrajectory spectral_trajectory(const MeasureModel& mu, const LcaPolynomial& phi, const Character& chi,
                                       u64 j_max, const TrajectoryOptions& opt = {});
// Monte Carlo mean of evaluate(chi, apply(Phi^j, sample)).
SpectralValue monte_carlo_value(const MeasureModel& mu, const LcaPolynomial& phi_j, const Character& chi,
                                std::uint64_t samples, std::uint64_t seed, std::uint64_t stream, bool parallel = true);

struct RandomizationVerdict {
    double epsilon = 0.05;
    double target = 0.9;
    DensityReport density_below;
    bool passed = false;
};

RandomizationVerdict cesaro_report(const SpectralTrajectory& t, double epsilon, double target = 0.9);

// Entry h carries <dilate(chi, h), mu> for h = 0..h_max.
SpectralTrajectory lucas_mixing_test(const MeasureModel& mu, const Character& chi, u64 h_max,
                                     const TrajectoryOptions& opt = {});
// Same values restricted to the listed h.
SpectralTrajectory lucas_mixing_at(const MeasureModel& mu, const Character& chi, const std::vector<u64>& hs,
                                   const TrajectoryOptions& opt = {});

struct DispersionResult {
    std::vector<std::pair<u64, unsigned>> ranks;  // (j, Srank_S(chi o Phi^j))
    std::vector<std::pair<unsigned, DensityReport>> ladder;  // R -> density of {j : rank > R}
};

DispersionResult dispersion_trajectory(const LcaPolynomial& phi, const Character& chi, u64 S, u64 j_max,
                                       const std::vector<unsigned>& ladder = {1, 2, 4, 8, 16}, bool parallel = true);

struct EmpiricalRow {
    u64 j = 0;
    double tv = 0.0;
    double cesaro_tv = 0.0;  // running mean of tv over 0..j
    double noise_floor = 0.0;
};

std::vector<EmpiricalRow> empirical_randomization(const MeasureModel& mu, const LcaPolynomial& phi, unsigned w,
                                                  u64 j_max, std::uint64_t samples, std::uint64_t seed,
                                                  bool parallel = true);

struct EvenShiftRow {
    u64 N;
    double value;
    std::size_t rank;
};

std::vector<EvenShiftRow> even_shift_demo(u64 N_max);
// rho0^2 + 2 rho1 rho2 - rho1^2 - rho2^2 for the hidden chain's Perron vector.
double even_shift_limit(const QuasiMarkovMeasure& nu);

struct MrfRow {
    unsigned K;
    double observed;
    double bound;
    std::uint64_t scanned;
};

std::vector<MrfRow> mrf_hm_demo(const MarkovMeasure& mu, unsigned K_max, unsigned span_max, bool parallel = true);

// popcount(h) >= I(h)/2 - eps, I(h) = ceil(log2 h).
bool in_H_style(u64 h, double eps = 0.25);

}  // namespace lcarand
