// Serial vs OpenMP kernels. Arg(0) = serial reference, Arg(1) = parallel.
#include <benchmark/benchmark.h>

#include <random>

#include "lcarand/character.hpp"
#include "lcarand/lca.hpp"
#include "lcarand/measures.hpp"
#include "lcarand/randomlab.hpp"
#include "lcarand/rng.hpp"

using namespace lcarand;

namespace {

const LcaPolynomial kRule90(2, {{-1, 1}, {1, 1}});

void BM_apply(benchmark::State& st) {
    Window w;
    w.offset = 0;
    w.data.resize(1 << 22);
    std::mt19937_64 g(1);
    for (auto& x : w.data) x = g() & 1u;
    const auto phi = power_fast(kRule90, 1000);
    for (auto _ : st) {
        Window out = st.range(0) ? apply(phi, w) : apply_serial(phi, w);
        benchmark::DoNotOptimize(out.data.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(w.data.size()));
}
BENCHMARK(BM_apply)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_trajectory_exact(benchmark::State& st) {
    TrajectoryOptions opt;
    opt.method = Method::Exact;
    opt.parallel = st.range(0) != 0;
    const LcaPolynomial phi(2, {{0, 1}, {1, 1}});
    for (auto _ : st) {
        auto t = spectral_trajectory(even_shift(), phi, Character::on_sites(2, {0, 1}), 1024, opt);
        benchmark::DoNotOptimize(t.entries.data());
    }
}
BENCHMARK(BM_trajectory_exact)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_monte_carlo(benchmark::State& st) {
    const LcaPolynomial phi(2, {{0, 1}, {1, 1}});
    const auto phij = power_fast(phi, 37);
    for (auto _ : st) {
        auto v = monte_carlo_value(mrf_demo_chain(), phij, Character::on_sites(2, {0, 3}), 200000, 1, 0,
                                   st.range(0) != 0);
        benchmark::DoNotOptimize(v.value);
    }
}
BENCHMARK(BM_monte_carlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_scan_by_rank(benchmark::State& st) {
    const auto mu = mrf_demo_chain();
    ExactBackend backend{MeasureModel{mu}};
    for (auto _ : st) {
        auto rows = scan_by_rank(backend, 2, 1, 8, 16, st.range(0) != 0);
        benchmark::DoNotOptimize(rows.data());
    }
}
BENCHMARK(BM_scan_by_rank)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_irdi_profile(benchmark::State& st) {
    for (auto _ : st) {
        auto rows = irdi_entropy_profile(IrdiMeasure{0.8, 16}, 10, st.range(0) != 0);
        benchmark::DoNotOptimize(rows.data());
    }
}
BENCHMARK(BM_irdi_profile)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_dispersion(benchmark::State& st) {
    const LcaPolynomial phi(2, {{0, 1}, {1, 1}});
    for (auto _ : st) {
        auto d = dispersion_trajectory(phi, Character::single(2, 0), 4, 4096, {8}, st.range(0) != 0);
        benchmark::DoNotOptimize(d.ranks.data());
    }
}
BENCHMARK(BM_dispersion)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
