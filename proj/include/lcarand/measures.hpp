#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "lcarand/character.hpp"

namespace lcarand {

// Alphabet (Z/p)^s; symbol index = little-endian base-p digits of the vector.
struct Alphabet {
    u64 p = 2;
    unsigned s = 1;

    std::size_t size() const;
    FreqVec decode(std::uint32_t symbol) const;
    std::uint32_t encode(const FreqVec& v) const;
};

std::vector<double> stationary_vector(const Eigen::MatrixXd& Q);

struct FiniteChain {
    Eigen::MatrixXd Q;
    std::vector<double> pi;

    std::size_t size() const { return static_cast<std::size_t>(Q.rows()); }
};

// Validates row sums (1e-12) and pi Q = pi (1e-10); pi is computed when absent.
FiniteChain make_chain(const Eigen::MatrixXd& Q, std::optional<std::vector<double>> pi = std::nullopt);

struct BernoulliMeasure {
    u64 p = 2;
    unsigned s = 1;
    std::vector<double> weights;  // over the alphabet
};

struct MarkovMeasure {
    u64 p = 2;
    unsigned s = 1;
    FiniteChain chain;
};

// Image of a hidden chain under a block map psi of radii (left, right).
// psi is indexed by the hidden window code, leftmost symbol most significant.
struct QuasiMarkovMeasure {
    u64 p = 2;
    unsigned s = 1;
    FiniteChain hidden;
    unsigned left = 0;
    unsigned right = 0;
    std::vector<std::uint32_t> psi;
};

struct IrdiMeasure {
    double alpha = 0.8;
    unsigned nmax = 24;
};

using MeasureModel = std::variant<BernoulliMeasure, MarkovMeasure, QuasiMarkovMeasure, IrdiMeasure>;

u64 model_p(const MeasureModel& m);
unsigned model_s(const MeasureModel& m);
std::string model_kind(const MeasureModel& m);

BernoulliMeasure bernoulli_uniform(u64 p, unsigned s = 1);
BernoulliMeasure point_mass_zero(u64 p, unsigned s = 1);
MarkovMeasure markov_measure(u64 p, unsigned s, const Eigen::MatrixXd& Q);
QuasiMarkovMeasure even_shift();
MarkovMeasure mrf_demo_chain();
void validate(const MeasureModel& m);

enum class Provenance { Exact, MonteCarlo, TruncatedExact };
std::string to_string(Provenance p);

struct SpectralValue {
    std::complex<double> value;
    Provenance provenance = Provenance::Exact;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::uint64_t samples = 0;
    double error_bound = 0.0;
};

// Sliding-window lift shared by Markov and quasi-Markov backends.
class TransferChain {
public:
    static constexpr std::size_t kDenseLimit = 128;

    TransferChain(const FiniteChain& chain, std::vector<std::uint32_t> emit, Alphabet alphabet);
    static TransferChain from(const MarkovMeasure& m);
    static TransferChain from(const QuasiMarkovMeasure& m, std::size_t state_cap = 200000);

    std::size_t size() const { return pi_.size(); }
    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<std::uint32_t>& emit() const { return emit_; }

    std::complex<double> expectation(const Character& chi) const;
    // Probability of word[i] at site i.
    double word_probability(const std::vector<std::uint32_t>& word) const;

private:
    void advance(Eigen::RowVectorXd& v, u64 steps) const;

    Alphabet alphabet_;
    std::vector<double> pi_;
    std::vector<std::uint32_t> emit_;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows_;
    std::vector<Eigen::MatrixXd> pow2_;  // Q^{2^i}, dense chains only
};

struct ExactOptions {
    std::size_t state_cap = 200000;
    double irdi_tolerance = -1.0;  // <= 0: never refuse
};

std::complex<double> char_expectation_bernoulli(const BernoulliMeasure& m, const Character& chi);
SpectralValue char_expectation_markov(const MarkovMeasure& m, const Character& chi);
SpectralValue char_expectation_quasi(const QuasiMarkovMeasure& m, const Character& chi, std::size_t state_cap = 200000);
SpectralValue char_expectation_irdi(const IrdiMeasure& m, const Character& chi, double tolerance = -1.0);
SpectralValue char_expectation(const MeasureModel& m, const Character& chi, const ExactOptions& opt = {});

// Prepared exact backend; cheap to query many characters.
class ExactBackend {
public:
    explicit ExactBackend(const MeasureModel& m, const ExactOptions& opt = {});
    SpectralValue expectation(const Character& chi) const;

private:
    MeasureModel model_;
    ExactOptions opt_;
    std::optional<TransferChain> chain_;
};

// ---- IRDI ----

struct IrdiTerm {
    unsigned level;
    u64 index;
    bool operator<(const IrdiTerm& o) const { return level != o.level ? level < o.level : index < o.index; }
    bool operator==(const IrdiTerm& o) const { return level == o.level && index == o.index; }
};

// a_M = sum over set bits n of M of r^n_{M mod 2^n}, levels below `levels`.
std::vector<IrdiTerm> irdi_site_terms(u64 M, unsigned levels = 64);
double irdi_truncation_bound(double alpha, u64 span, unsigned nmax);
unsigned suggest_nmax(double alpha, u64 span, double tol);
// E[(-1)^{sum a_x}] with a fixed offset k: product of (1 - 2 alpha^n) over odd terms.
double irdi_parity_fixed_offset(const IrdiMeasure& m, const std::vector<i64>& sites, u64 k);
// Same averaged exactly over k in [0, 2^n): carry-state dynamic program.
double irdi_parity_average(double alpha, const std::vector<i64>& sites, unsigned n);
// Reference: direct average over all 2^n offsets (small n only).
double irdi_parity_average_bruteforce(double alpha, const std::vector<i64>& sites, unsigned n);

// Probability that an independent sum of r^n variables is odd.
double parity_fold(double alpha, const std::vector<unsigned>& levels);
// delta^N_m{1} at offset k, untruncated (needs k + m + 2^N < 2^64).
double irdi_increment_prob(const IrdiMeasure& m, unsigned N, u64 mm, u64 k);
// Same under the truncated measure: positions mod 2^nmax, levels < nmax.
double irdi_increment_prob_truncated(const IrdiMeasure& m, unsigned N, u64 mm, u64 k);

struct IrdiEntropyRow {
    unsigned N;
    double profile;  // upper bound on H(a over 2^N sites) / 2^N
    double shape;    // N * alpha^N, the expected decay shape
};

std::vector<IrdiEntropyRow> irdi_entropy_profile(const IrdiMeasure& m, unsigned N_levels, bool parallel = true);

// ---- sampling ----

class Sampler {
public:
    explicit Sampler(const MeasureModel& m);
    // IRDI only: pin the offset k instead of drawing it.
    void fix_irdi_offset(u64 k) { irdi_k_ = k; }
    Window draw(i64 a, i64 b, std::mt19937_64& eng) const;
    // Values (s components each) at the given sites only; IRDI skips the gaps.
    std::vector<std::uint32_t> draw_sites(const std::vector<i64>& sites, std::mt19937_64& eng) const;

private:
    struct Cdf {
        std::vector<double> c;
        std::uint32_t draw(std::mt19937_64& eng) const;
    };

    std::vector<std::uint32_t> draw_irdi(const std::vector<i64>& sites, std::mt19937_64& eng) const;

    MeasureModel model_;
    Alphabet alphabet_;
    Cdf initial_;
    std::vector<Cdf> rows_;
    std::vector<FreqVec> symbols_;
    std::optional<u64> irdi_k_;
};

// ---- structural diagnostics ----

struct LocalFreeness {
    bool free = false;
    std::size_t a = 0, b = 0;  // violating pair when not free
    long min_entry = 0;
};

LocalFreeness is_locally_free(const MarkovMeasure& m);
bool locally_free_bruteforce(const MarkovMeasure& m);
double mrf_harmonic_constant(const MarkovMeasure& m);

bool markov_word_test(const MeasureModel& m, const std::vector<std::uint32_t>& v, unsigned k, double tol = 1e-9);

struct HbEstimate {
    double sup = 0.0;
    Character argmax;
    std::uint64_t scanned = 0;
    bool exhaustive = true;
    double coverage = 1.0;
};

struct RankScanRow {
    unsigned K = 0;
    double max_abs = 0.0;
    Character argmax;
    std::uint64_t count = 0;
};

// Exhaustive scan of characters with min site 0, sites in [0, span_max),
// rank <= rank_max; row K holds the largest |<chi, mu>| at rank K.
std::vector<RankScanRow> scan_by_rank(const ExactBackend& backend, u64 p, unsigned s, unsigned rank_max,
                                      unsigned span_max, bool parallel = true);

HbEstimate harmonic_bound_estimate(const MeasureModel& m, unsigned rank_max, unsigned span_max,
                                   std::uint64_t random_budget = 200000, std::uint64_t seed = 1, bool parallel = true);
std::uint64_t character_scan_size(std::size_t alphabet, unsigned rank_max, unsigned span_max);

double entropy_rate(const MarkovMeasure& m);
double block_entropy(const MeasureModel& m, unsigned N);
double binary_entropy(double q);

}  // namespace lcarand
