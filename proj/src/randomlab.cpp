#include "lcarand/randomlab.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "lcarand/errors.hpp"
#include "lcarand/parallel.hpp"
#include "lcarand/rng.hpp"

namespace lcarand {

Method parse_method(const std::string& s) {
    if (s == "auto") return Method::Auto;
    if (s == "exact") return Method::Exact;
    if (s == "mc" || s == "monte-carlo") return Method::MonteCarlo;
    throw std::invalid_argument("unknown method '" + s + "' (auto|exact|mc)");
}

SpectralValue monte_carlo_value(const MeasureModel& mu, const LcaPolynomial& phi_j, const Character& chi,
                                std::uint64_t samples, std::uint64_t seed, std::uint64_t stream, bool parallel) {
    SpectralValue v;
    v.provenance = Provenance::MonteCarlo;
    v.samples = samples;
    if (chi.trivial()) {
        v.value = 1.0;
        return v;
    }
    Sampler sampler(mu);
    const i64 a = chi.min_site() + phi_j.min_exp();
    const i64 b = chi.max_site() + phi_j.max_exp() + 1;
    SampleFn fn = [&](std::mt19937_64& eng) {
        Window w = sampler.draw(a, b, eng);
        return evaluate(chi, apply_serial(phi_j, w));
    };
    McEstimate e = parallel ? monte_carlo(samples, seed, stream, fn) : monte_carlo_serial(samples, seed, stream, fn);
    v.value = e.mean;
    v.stderr_re = e.stderr_re;
    v.stderr_im = e.stderr_im;
    return v;
}

namespace {

std::optional<ExactBackend> exact_backend_for(const MeasureModel& mu, const TrajectoryOptions& opt) {
    if (opt.method == Method::MonteCarlo) return std::nullopt;
    try {
        return ExactBackend(mu, opt.exact);
    } catch (const ResourceError&) {
        if (opt.method == Method::Exact) throw;
        return std::nullopt;
    }
}

template <class CharFor>
SpectralTrajectory run_indexed(const MeasureModel& mu, const std::vector<u64>& idx, const TrajectoryOptions& opt,
                               CharFor&& char_for, const LcaPolynomial& phi, const Character& chi) {
    auto backend = exact_backend_for(mu, opt);
    if (!backend && opt.samples == 0)
        throw std::invalid_argument("exact backend unavailable and samples = 0: nothing to compute");
    SpectralTrajectory t;
    t.chi = chi;
    t.phi = phi;
    t.model = model_kind(mu);
    t.entries.resize(idx.size());
    const auto n = static_cast<std::int64_t>(idx.size());
    if (backend) {
        ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 1) if (opt.parallel)
        for (std::int64_t i = 0; i < n; ++i) {
            err.guard([&] {
                auto [c, unused] = char_for(idx[i]);
                (void)unused;
                t.entries[i] = {idx[i], backend->expectation(c)};
            });
        }
        err.rethrow();
    } else {
        // each j gets its own random stream; parallelism is inside the estimator
        for (std::int64_t i = 0; i < n; ++i) {
            auto [c, pj] = char_for(idx[i]);
            (void)c;
            t.entries[i] = {idx[i], monte_carlo_value(mu, pj, chi, opt.samples, opt.seed, idx[i], opt.parallel)};
        }
    }
    return t;
}

}  // namespace

SpectralTrajectory spectral_trajectory(const MeasureModel& mu, const LcaPolynomial& phi, const Character& chi,
                                       u64 j_max, const TrajectoryOptions& opt) {
    if (chi.p() != phi.p() || chi.p() != model_p(mu)) throw std::invalid_argument("model, LCA and character must share p");
    if (j_max < 1) throw std::invalid_argument("j_max must be >= 1");
    std::vector<u64> idx(j_max + 1);
    for (u64 j = 0; j <= j_max; ++j) idx[j] = j;
    return run_indexed(mu, idx, opt, [&](u64 j) {
        LcaPolynomial pj = power_fast(phi, j);
        return std::make_pair(pullback(chi, pj), pj);
    }, phi, chi);
}

RandomizationVerdict cesaro_report(const SpectralTrajectory& t, double epsilon, double target) {
    if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
    std::vector<char> hits;
    hits.reserve(t.entries.size());
    for (const auto& e : t.entries) hits.push_back(std::abs(e.value.value) < epsilon ? 1 : 0);
    RandomizationVerdict v;
    v.epsilon = epsilon;
    v.target = target;
    v.density_below = density_from_hits(hits);
    v.passed = v.density_below.final_density >= target;
    return v;
}

SpectralTrajectory lucas_mixing_at(const MeasureModel& mu, const Character& chi, const std::vector<u64>& hs,
                                   const TrajectoryOptions& opt) {
    if (chi.p() != model_p(mu)) throw std::invalid_argument("model and character must share p");
    const u64 p = chi.p();
    const LcaPolynomial phi = LcaPolynomial::lca(p, {{0, 1}, {1, 1}});
    const i64 stride = static_cast<i64>(ldm(chi));
    return run_indexed(mu, hs, opt, [&](u64 h) {
        // chi^[h] = chi o (1+sigma^ldm)^h; the MC path applies that power
        return std::make_pair(dilate(chi, h), power_fast(LcaPolynomial::lca(p, {{0, 1}, {stride, 1}}), h));
    }, phi, chi);
}

SpectralTrajectory lucas_mixing_test(const MeasureModel& mu, const Character& chi, u64 h_max,
                                     const TrajectoryOptions& opt) {
    std::vector<u64> hs(h_max + 1);
    for (u64 h = 0; h <= h_max; ++h) hs[h] = h;
    return lucas_mixing_at(mu, chi, hs, opt);
}

DispersionResult dispersion_trajectory(const LcaPolynomial& phi, const Character& chi, u64 S, u64 j_max,
                                       const std::vector<unsigned>& ladder, bool parallel) {
    if (S < 1) throw std::invalid_argument("S must be >= 1");
    if (chi.p() != phi.p()) throw std::invalid_argument("LCA and character must share p");
    DispersionResult r;
    r.ranks.resize(j_max + 1);
    const auto n = static_cast<std::int64_t>(j_max + 1);
    ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (std::int64_t j = 0; j < n; ++j) {
        err.guard([&] {
            Character c = pullback(chi, power_fast(phi, static_cast<u64>(j)));
            r.ranks[j] = {static_cast<u64>(j), c.trivial() ? 0u : s_rank(c, S)};
        });
    }
    err.rethrow();
    for (unsigned R : ladder) {
        std::vector<char> hits(j_max + 1);
        for (u64 j = 0; j <= j_max; ++j) hits[j] = r.ranks[j].second > R ? 1 : 0;
        r.ladder.emplace_back(R, density_from_hits(hits));
    }
    return r;
}

std::vector<EmpiricalRow> empirical_randomization(const MeasureModel& mu, const LcaPolynomial& phi, unsigned w,
                                                  u64 j_max, std::uint64_t samples, std::uint64_t seed,
                                                  bool parallel) {
    if (w < 1 || w > 8) throw std::invalid_argument("window width w must lie in [1,8]");
    const Alphabet A{model_p(mu), model_s(mu)};
    const std::size_t nA = A.size();
    const double cells_d = std::pow(static_cast<double>(nA), w);
    if (cells_d > (1 << 22)) throw std::invalid_argument("too many window cells for the requested w");
    const auto cells = static_cast<std::size_t>(cells_d);
    if (samples < 10000 || samples < cells)
        throw std::invalid_argument("empirical randomization needs samples >= max(10^4, cells)");
    if (phi.p() != A.p) throw std::invalid_argument("model and LCA must share p");

    // powers once; one sample path per draw serves every j
    std::vector<std::vector<std::pair<i64, u64>>> taps(j_max + 1);
    i64 lo = 0, hi = 0;
    for (u64 j = 0; j <= j_max; ++j) {
        LcaPolynomial pj = power_fast(phi, j);
        for (const auto& t : pj.terms()) taps[j].push_back(t);
        lo = std::min(lo, pj.min_exp());
        hi = std::max(hi, pj.max_exp());
    }
    Sampler sampler(mu);
    const unsigned s = A.s;
    const u64 p = A.p;
    const std::size_t J = j_max + 1;
    std::vector<std::uint64_t> hist(J * cells, 0);
    const auto nb = static_cast<std::int64_t>((samples + kSampleBlock - 1) / kSampleBlock);
    ErrorSlot err;
#pragma omp parallel if (parallel)
    {
        std::vector<std::uint64_t> local(J * cells, 0);
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < nb; ++b) err.guard([&] {
            auto eng = make_engine(seed, 0x454d50, static_cast<std::uint64_t>(b));
            const std::uint64_t end = std::min<std::uint64_t>(samples, (b + 1) * kSampleBlock);
            for (std::uint64_t i = b * kSampleBlock; i < end; ++i) {
                Window x = sampler.draw(lo, hi + static_cast<i64>(w), eng);
                for (std::size_t j = 0; j < J; ++j) {
                    std::size_t cell = 0;
                    for (unsigned m = w; m-- > 0;) {
                        for (unsigned k = s; k-- > 0;) {
                            u64 acc = 0;
                            for (const auto& [f, c] : taps[j]) acc = (acc + c * x.site(static_cast<i64>(m) + f)[k]) % p;
                            cell = cell * p + acc;
                        }
                    }
                    ++local[j * cells + cell];
                }
            }
        });
#pragma omp critical
        for (std::size_t t = 0; t < hist.size(); ++t) hist[t] += local[t];
    }
    err.rethrow();
    std::vector<EmpiricalRow> rows(J);
    const double n = static_cast<double>(samples), u = 1.0 / static_cast<double>(cells);
    double running = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        double tv = 0.0;
        for (std::size_t c = 0; c < cells; ++c) tv += std::abs(static_cast<double>(hist[j * cells + c]) / n - u);
        rows[j].j = j;
        rows[j].tv = 0.5 * tv;
        running += rows[j].tv;
        rows[j].cesaro_tv = running / static_cast<double>(j + 1);
        rows[j].noise_floor = std::sqrt(static_cast<double>(cells) / n);
    }
    return rows;
}

double even_shift_limit(const QuasiMarkovMeasure& nu) {
    const auto& r = nu.hidden.pi;
    if (r.size() != 3) throw std::invalid_argument("even-shift limit needs a 3-state hidden chain");
    return r[0] * r[0] + 2 * r[1] * r[2] - r[1] * r[1] - r[2] * r[2];
}

std::vector<EvenShiftRow> even_shift_demo(u64 N_max) {
    if (N_max < 1) throw std::invalid_argument("N_max must be >= 1");
    const QuasiMarkovMeasure nu = even_shift();
    const TransferChain tc = TransferChain::from(nu);
    std::vector<EvenShiftRow> rows;
    Character chi(2, 1);
    for (u64 N = 0; N <= N_max; ++N) {
        chi.set(static_cast<i64>(N), {1});
        rows.push_back({N, tc.expectation(chi).real(), rank(chi)});
    }
    return rows;
}

std::vector<MrfRow> mrf_hm_demo(const MarkovMeasure& mu, unsigned K_max, unsigned span_max, bool parallel) {
    const double c = mrf_harmonic_constant(mu);
    ExactBackend backend{MeasureModel{mu}};
    std::vector<MrfRow> rows;
    for (const auto& r : scan_by_rank(backend, mu.p, mu.s, K_max, span_max, parallel))
        rows.push_back({r.K, r.max_abs, std::pow(c, std::ceil(r.K / 3.0)), r.count});
    return rows;
}

bool in_H_style(u64 h, double eps) {
    unsigned I = 0;
    while (I < 64 && (u64{1} << I) < h) ++I;  // ceil(log2 h)
    return __builtin_popcountll(h) >= 0.5 * I - eps;
}

}  // namespace lcarand
