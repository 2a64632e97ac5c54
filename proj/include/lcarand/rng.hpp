#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>

namespace lcarand {

// Samples are grouped in fixed blocks; each block owns one engine seeded from
// (seed, stream, block), so results do not depend on thread count.
constexpr std::uint64_t kSampleBlock = 4096;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t block);

struct McEstimate {
    std::complex<double> mean;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::uint64_t samples = 0;
};

using SampleFn = std::function<std::complex<double>(std::mt19937_64&)>;

McEstimate monte_carlo(std::uint64_t samples, std::uint64_t seed, std::uint64_t stream, const SampleFn& fn);
McEstimate monte_carlo_serial(std::uint64_t samples, std::uint64_t seed, std::uint64_t stream, const SampleFn& fn);

void set_threads(int n);
int max_threads();

}  // namespace lcarand
