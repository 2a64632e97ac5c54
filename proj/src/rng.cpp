#include "lcarand/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lcarand/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lcarand {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    return std::mt19937_64(seq);
}

namespace {

struct Moments {
    double re = 0, im = 0, re2 = 0, im2 = 0;
};

Moments run_block(std::uint64_t b, std::uint64_t samples, std::uint64_t seed, std::uint64_t stream, const SampleFn& fn) {
    auto eng = make_engine(seed, stream, b);
    std::uint64_t lo = b * kSampleBlock, hi = std::min(samples, lo + kSampleBlock);
    Moments m;
    for (std::uint64_t i = lo; i < hi; ++i) {
        auto z = fn(eng);
        m.re += z.real();
        m.im += z.imag();
        m.re2 += z.real() * z.real();
        m.im2 += z.imag() * z.imag();
    }
    return m;
}

McEstimate finish(const std::vector<Moments>& blocks, std::uint64_t samples) {
    Moments t;
    for (const auto& m : blocks) {  // fixed order keeps the sum reproducible
        t.re += m.re;
        t.im += m.im;
        t.re2 += m.re2;
        t.im2 += m.im2;
    }
    const double n = static_cast<double>(samples);
    McEstimate e;
    e.samples = samples;
    e.mean = {t.re / n, t.im / n};
    if (samples > 1) {
        double vr = std::max(0.0, (t.re2 - n * e.mean.real() * e.mean.real()) / (n - 1));
        double vi = std::max(0.0, (t.im2 - n * e.mean.imag() * e.mean.imag()) / (n - 1));
        e.stderr_re = std::sqrt(vr / n);
        e.stderr_im = std::sqrt(vi / n);
    }
    return e;
}

}  // namespace

McEstimate monte_carlo(std::uint64_t samples, std::uint64_t seed, std::uint64_t stream, const SampleFn& fn) {
    if (samples == 0) throw std::invalid_argument("Monte Carlo needs at least one sample");
    const auto nb = static_cast<std::int64_t>((samples + kSampleBlock - 1) / kSampleBlock);
    std::vector<Moments> blocks(nb);
    ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < nb; ++b) err.guard([&] { blocks[b] = run_block(b, samples, seed, stream, fn); });
    err.rethrow();
    return finish(blocks, samples);
}

McEstimate monte_carlo_serial(std::uint64_t samples, std::uint64_t seed, std::uint64_t stream, const SampleFn& fn) {
    if (samples == 0) throw std::invalid_argument("Monte Carlo needs at least one sample");
    const std::uint64_t nb = (samples + kSampleBlock - 1) / kSampleBlock;
    std::vector<Moments> blocks(nb);
    for (std::uint64_t b = 0; b < nb; ++b) blocks[b] = run_block(b, samples, seed, stream, fn);
    return finish(blocks, samples);
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace lcarand
