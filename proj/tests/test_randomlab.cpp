#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lcarand/randomlab.hpp"
#include "lcarand/rng.hpp"

using namespace lcarand;

namespace {

const LcaPolynomial kOnePlus = LcaPolynomial::lca(2, {{0, 1}, {1, 1}});

TrajectoryOptions exact_opts() {
    TrajectoryOptions o;
    o.method = Method::Exact;
    return o;
}

TrajectoryOptions mc_opts(std::uint64_t n, bool parallel = true) {
    TrajectoryOptions o;
    o.method = Method::MonteCarlo;
    o.samples = n;
    o.seed = 99;
    o.parallel = parallel;
    return o;
}

}  // namespace

TEST_CASE("trivial measures") {
    auto chi = Character::single(2, 0);
    auto u = spectral_trajectory(bernoulli_uniform(2), kOnePlus, chi, 64, exact_opts());
    REQUIRE(u.entries.size() == 65);
    for (const auto& e : u.entries) CHECK(std::abs(e.value.value) < 1e-12);
    auto z = spectral_trajectory(point_mass_zero(2), kOnePlus, chi, 64, exact_opts());
    for (const auto& e : z.entries) CHECK(e.value.value.real() == doctest::Approx(1.0));
    CHECK(cesaro_report(u, 0.05).passed);
    auto neg = cesaro_report(z, 0.05);
    CHECK_FALSE(neg.passed);
    CHECK(neg.density_below.final_density == 0.0);
    CHECK_THROWS(spectral_trajectory(bernoulli_uniform(2), kOnePlus, chi, 0));
    CHECK_THROWS(spectral_trajectory(bernoulli_uniform(3), kOnePlus, chi, 4));
    TrajectoryOptions none;
    none.method = Method::MonteCarlo;
    CHECK_THROWS_AS(spectral_trajectory(bernoulli_uniform(2), kOnePlus, chi, 4, none), std::invalid_argument);
}

TEST_CASE("even-shift trajectory at powers of two") {
    const QuasiMarkovMeasure nu = even_shift();
    auto chi = Character::single(2, 0);
    auto t = spectral_trajectory(nu, kOnePlus, chi, 2048, exact_opts());
    for (unsigned k = 0; k <= 11; ++k) {
        u64 j = u64{1} << k;
        double direct = char_expectation_quasi(nu, Character::on_sites(2, {0, static_cast<i64>(j)})).value.real();
        CHECK(t.entries[j].value.value.real() == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(t.entries[2048].value.value.real() == doctest::Approx(1.0 / 9).epsilon(1e-6));
    CHECK(t.entries[0].value.value.real() == doctest::Approx(-1.0 / 3));
}

TEST_CASE("Monte Carlo agrees with the exact backend") {
    auto mk = mrf_demo_chain();
    auto chi = Character::on_sites(2, {0, 2});
    auto ex = spectral_trajectory(mk, kOnePlus, chi, 12, exact_opts());
    auto mc = spectral_trajectory(mk, kOnePlus, chi, 12, mc_opts(40000));
    for (std::size_t j = 0; j < ex.entries.size(); ++j) {
        const auto& v = mc.entries[j].value;
        CHECK(v.provenance == Provenance::MonteCarlo);
        CHECK(std::abs(v.value.real() - ex.entries[j].value.value.real()) <= 4 * v.stderr_re + 1e-12);
    }
    // three symbols
    Eigen::MatrixXd Q(3, 3);
    Q << 0.6, 0.3, 0.1, 0.2, 0.5, 0.3, 0.3, 0.3, 0.4;
    auto m3 = markov_measure(3, 1, Q);
    auto phi = LcaPolynomial::lca(3, {{-1, 1}, {0, 2}, {1, 1}});
    auto c3 = Character::single(3, 0, 1);
    auto e3 = spectral_trajectory(m3, phi, c3, 6, exact_opts());
    auto m3c = spectral_trajectory(m3, phi, c3, 6, mc_opts(40000));
    for (std::size_t j = 0; j < e3.entries.size(); ++j) {
        const auto& v = m3c.entries[j].value;
        CHECK(std::abs(v.value.real() - e3.entries[j].value.value.real()) <= 4 * v.stderr_re + 1e-12);
        CHECK(std::abs(v.value.imag() - e3.entries[j].value.value.imag()) <= 4 * v.stderr_im + 1e-12);
    }
}

TEST_CASE("determinism across threads and schedules") {
    auto mk = mrf_demo_chain();
    auto chi = Character::on_sites(2, {0, 1});
    auto a = spectral_trajectory(mk, kOnePlus, chi, 8, mc_opts(20000, true));
    auto b = spectral_trajectory(mk, kOnePlus, chi, 8, mc_opts(20000, false));
    const int saved = max_threads();
    set_threads(3);
    auto c = spectral_trajectory(mk, kOnePlus, chi, 8, mc_opts(20000, true));
    set_threads(saved);
    for (std::size_t j = 0; j < a.entries.size(); ++j) {
        CHECK(a.entries[j].value.value == b.entries[j].value.value);
        CHECK(a.entries[j].value.value == c.entries[j].value.value);
        CHECK(a.entries[j].value.stderr_re == b.entries[j].value.stderr_re);
    }
    auto r1 = empirical_randomization(even_shift(), kOnePlus, 3, 16, 20000, 5, true);
    auto r2 = empirical_randomization(even_shift(), kOnePlus, 3, 16, 20000, 5, false);
    for (std::size_t j = 0; j < r1.size(); ++j) CHECK(r1[j].tv == r2[j].tv);
    auto d1 = dispersion_trajectory(kOnePlus, chi, 4, 300, {1, 2, 4}, true);
    auto d2 = dispersion_trajectory(kOnePlus, chi, 4, 300, {1, 2, 4}, false);
    CHECK(d1.ranks == d2.ranks);
}

TEST_CASE("Lucas mixing is the trajectory along multiples of ldm") {
    const MeasureModel nu = even_shift();
    auto chi = Character::on_sites(2, {0, 1});
    const u64 L = ldm(chi);
    REQUIRE(L == 2);
    auto lm = lucas_mixing_test(nu, chi, 60, exact_opts());
    auto tr = spectral_trajectory(nu, kOnePlus, chi, 60 * L, exact_opts());
    for (u64 h = 0; h <= 60; ++h)
        CHECK(lm.entries[h].value.value.real() == doctest::Approx(tr.entries[h * L].value.value.real()).epsilon(1e-12));
    auto at = lucas_mixing_at(nu, chi, {3, 17, 40}, exact_opts());
    REQUIRE(at.entries.size() == 3);
    CHECK(at.entries[1].j == 17);
    CHECK(at.entries[1].value.value == lm.entries[17].value.value);
    // Monte Carlo route applies (1 + sigma^ldm)^h to samples
    auto mc = lucas_mixing_at(nu, chi, {3, 17}, mc_opts(40000));
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(mc.entries[i].value.value.real() - lm.entries[mc.entries[i].j].value.value.real()) <=
              4 * mc.entries[i].value.stderr_re + 1e-12);
}

TEST_CASE("dispersion") {
    for (u64 p : {2, 3}) {
        auto phi = LcaPolynomial::lca(p, {{0, 1}, {1, 1}});
        auto chi = Character::single(p, 0);
        auto d = dispersion_trajectory(phi, chi, 1, ipow(p, p == 2 ? 11 : 7), {1});
        for (u64 q = 1; q < d.ranks.size(); q *= p) CHECK(d.ranks[q].second == 2);
        for (const auto& [j, r] : d.ranks) REQUIRE(r == lucas_set_size(j, p));
    }
    auto d = dispersion_trajectory(kOnePlus, Character::single(2, 0), 4, 1023, {1, 8});
    REQUIRE(d.ladder.size() == 2);
    CHECK(d.ladder[0].first == 1);
    CHECK(d.ladder[0].second.final_density > d.ladder[1].second.final_density);
    CHECK_THROWS(dispersion_trajectory(kOnePlus, Character::single(2, 0), 0, 10));
}

TEST_CASE("empirical randomization") {
    auto u = empirical_randomization(bernoulli_uniform(2), kOnePlus, 4, 8, 40000, 1);
    for (const auto& r : u) CHECK(r.tv < 2 * r.noise_floor);
    auto z = empirical_randomization(point_mass_zero(2), kOnePlus, 2, 4, 10000, 1);
    for (const auto& r : z) CHECK(r.tv == doctest::Approx(0.75));
    CHECK(z.back().cesaro_tv == doctest::Approx(0.75));
    CHECK_THROWS(empirical_randomization(bernoulli_uniform(2), kOnePlus, 9, 4, 100000, 1));
    CHECK_THROWS(empirical_randomization(bernoulli_uniform(2), kOnePlus, 4, 4, 100, 1));
}

TEST_CASE("even-shift and MRF demos") {
    auto rows = even_shift_demo(200);
    REQUIRE(rows.size() == 201);
    CHECK(rows[0].value == doctest::Approx(-1.0 / 3));
    for (const auto& r : rows) CHECK(r.rank == r.N + 1);
    CHECK(rows[200].value == doctest::Approx(1.0 / 9).epsilon(1e-10));
    CHECK(even_shift_limit(even_shift()) == doctest::Approx(1.0 / 9).epsilon(1e-12));
    // brute-force oracle for a short block: enumerate hidden paths
    const auto nu = even_shift();
    for (u64 N = 0; N <= 8; ++N) {
        double acc = 0;
        for (u64 code = 0; code < ipow(3, N + 1); ++code) {
            std::vector<int> b(N + 1);
            u64 c = code;
            for (auto& x : b) x = static_cast<int>(c % 3), c /= 3;
            double pr = nu.hidden.pi[b[0]];
            unsigned par = nu.psi[b[0]];
            for (u64 i = 1; i <= N; ++i) pr *= nu.hidden.Q(b[i - 1], b[i]), par += nu.psi[b[i]];
            acc += pr * (par % 2 ? -1 : 1);
        }
        CHECK(rows[N].value == doctest::Approx(acc).epsilon(1e-12));
    }
    auto mrf = mrf_hm_demo(mrf_demo_chain(), 6, 12);
    REQUIRE(mrf.size() == 6);
    for (const auto& r : mrf) CHECK(r.observed <= r.bound + 1e-12);
    CHECK(mrf[2].bound == doctest::Approx(0.6));
    CHECK(mrf[3].bound == doctest::Approx(0.36));
}

TEST_CASE("H-style indices") {
    CHECK(in_H_style(255));
    CHECK_FALSE(in_H_style(256));
    CHECK(in_H_style(1));
    CHECK(in_H_style(0b1010101010));  // 5 of 10 bits
    CHECK_FALSE(in_H_style(0b1000000011));
    std::size_t count = 0;
    for (u64 h = 256; h <= 2048; ++h) count += in_H_style(h);
    CHECK(count > 800);
    CHECK(count < 1793);
}

TEST_CASE("method names") {
    CHECK(parse_method("auto") == Method::Auto);
    CHECK(parse_method("exact") == Method::Exact);
    CHECK(parse_method("mc") == Method::MonteCarlo);
    CHECK_THROWS(parse_method("fast"));
}
