#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lcarand/character.hpp"
#include "lcarand/errors.hpp"

using namespace lcarand;

namespace {

Window random_window(std::mt19937_64& g, u64 p, unsigned s, i64 offset, std::size_t len) {
    Window w{offset, s, std::vector<std::uint32_t>(len * s)};
    for (auto& x : w.data) x = static_cast<std::uint32_t>(g() % p);
    return w;
}

Character random_character(std::mt19937_64& g, u64 p, unsigned s, int sites, int span) {
    Character c(p, s);
    for (int i = 0; i < sites; ++i) {
        FreqVec u(s);
        for (auto& x : u) x = static_cast<std::uint32_t>(g() % p);
        c.set(static_cast<i64>(g() % (2 * span + 1)) - span, u);
    }
    return c;
}

LcaPolynomial random_poly(std::mt19937_64& g, u64 p, int terms, int span) {
    std::map<i64, u64> t{{0, 1}};
    for (int i = 0; i < terms; ++i) t[static_cast<i64>(g() % (2 * span + 1)) - span] = 1 + g() % (p - 1);
    return LcaPolynomial(p, t);
}

}  // namespace

TEST_CASE("evaluation") {
    auto chi = Character::on_sites(2, {0, 2});
    CHECK(evaluate(chi, Window{0, 1, {1, 0, 1}}) == std::complex<double>(1, 0));
    CHECK(evaluate(chi, Window{0, 1, {1, 1, 0}}) == std::complex<double>(-1, 0));
    CHECK(evaluate(Character(2, 1), Window{0, 1, {1}}) == std::complex<double>(1, 0));
    auto c3 = Character::single(3, 1, 2);
    auto w = Window{0, 1, {0, 1}};
    CHECK(angle(c3, w) == 2);
    CHECK(std::abs(evaluate(c3, w) - std::polar(1.0, 4 * M_PI / 3)) < 1e-15);
    CHECK_THROWS_AS(angle(c3, Window{0, 1, {0}}), std::invalid_argument);
    // two components
    Character c(5, 2, {{0, {1, 2}}, {3, {0, 4}}});
    Window w2{0, 2, {1, 1, 0, 0, 0, 0, 3, 2}};
    CHECK(angle(c, w2) == (1 + 2 + 8) % 5);
    for (u64 p : {2, 3, 5, 7})
        for (u64 t = 0; t < p; ++t) {
            auto z = root_of_unity(p, t);
            CHECK(std::abs(std::abs(z) - 1) < 1e-15);
            CHECK(std::abs(std::pow(z, static_cast<double>(p)) - 1.0) < 1e-12);
        }
    CHECK(root_of_unity(2, 1) == std::complex<double>(-1, 0));
}

TEST_CASE("rank, diam, s_rank") {
    auto chi = Character::on_sites(2, {0, 5, 6, 11, 12, 13});
    CHECK(rank(chi) == 6);
    CHECK(diam(chi) == 13);
    CHECK(s_rank(chi, 4) == 3);
    CHECK(s_rank(chi, 1) == 6);
    CHECK(s_rank(chi, 100) == 1);
    CHECK(rank(Character(3, 1)) == 0);
    CHECK_THROWS(s_rank(Character(3, 1), 2));
    Character c(3, 1);
    c.set(4, {0});
    CHECK(c.trivial());
}

TEST_CASE("pullback is the dual of apply") {
    std::mt19937_64 g(21);
    for (int i = 0; i < 500; ++i) {
        u64 p = std::vector<u64>{2, 3, 5, 7}[i % 4];
        unsigned s = 1 + i % 3;
        auto chi = random_character(g, p, s, 3, 6);
        auto phi = random_poly(g, p, 3, 4);
        if (chi.trivial()) continue;
        auto pb = pullback(chi, phi);
        i64 lo = std::min(chi.min_site() + phi.min_exp(), chi.min_site()) - 2;
        i64 hi = chi.max_site() + phi.max_exp() + 3;
        auto a = random_window(g, p, s, lo, static_cast<std::size_t>(hi - lo));
        auto b = apply(phi, a);
        REQUIRE(angle(chi, b) == (pb.trivial() ? 0u : angle(pb, a)));
    }
}

TEST_CASE("pullback composes") {
    std::mt19937_64 g(22);
    for (int i = 0; i < 200; ++i) {
        u64 p = std::vector<u64>{2, 3, 5}[i % 3];
        auto chi = random_character(g, p, 1 + i % 2, 4, 8);
        auto a = random_poly(g, p, 2, 5), b = random_poly(g, p, 3, 3);
        REQUIRE(pullback(pullback(chi, a), b) == pullback(chi, multiply(a, b)));
    }
    auto chi = Character::single(2, 0);
    CHECK(pullback(chi, LcaPolynomial::one(2)) == chi);
    CHECK(pullback(chi, parse_lca("1+x", 2)) == Character::on_sites(2, {0, 1}));
}

TEST_CASE("ldm and dilation") {
    CHECK(ldm(Character::single(2, 4)) == 1);
    CHECK(ldm(Character::on_sites(2, {0, 1})) == 2);
    CHECK(ldm(Character::on_sites(2, {0, 5, 6})) == 8);
    CHECK(ldm(Character::on_sites(3, {0, 3})) == 9);
    CHECK(ldm(Character::on_sites(3, {0, 2})) == 3);
    std::mt19937_64 g(23);
    for (int i = 0; i < 150; ++i) {
        u64 p = std::vector<u64>{2, 3, 5}[i % 3];
        auto chi = random_character(g, p, 1 + i % 2, 3, 5);
        if (chi.trivial()) continue;
        u64 L = ldm(chi);
        REQUIRE(L > diam(chi));
        REQUIRE((L == 1 || L / p <= diam(chi)));
        u64 h = g() % 40;
        auto shift = LcaPolynomial(p, {{0, 1}, {static_cast<i64>(L), 1}});
        auto d = dilate(chi, h);
        REQUIRE(d == pullback(chi, power_naive(shift, h)));
        REQUIRE(rank(d) == lucas_set_size(h, p) * rank(chi));
    }
    auto chi = Character::on_sites(2, {0, 1});
    CHECK(dilate(chi, 0) == chi);
    CHECK(dilate(chi, 3) == Character::on_sites(2, {0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST_CASE("character text syntax") {
    auto chi = parse_character("sites=0,5,6 freqs=1,1,1", 2, 1);
    CHECK(chi == Character::on_sites(2, {0, 5, 6}));
    auto c2 = parse_character("sites=0,1 freqs=(1|0),(2|1)", 3, 2);
    CHECK(c2 == Character(3, 2, {{0, {1, 0}}, {1, {2, 1}}}));
    CHECK(parse_character(c2.to_string(), 3, 2) == c2);
    CHECK(parse_character("sites=-3,4 freqs=(-1|1),(0|3)", 3, 2) == Character(3, 2, {{-3, {2, 1}}, {4, {0, 0}}}));
    std::mt19937_64 g(24);
    for (int i = 0; i < 100; ++i) {
        u64 p = std::vector<u64>{2, 3, 5}[i % 3];
        unsigned s = 1 + i % 2;
        auto c = random_character(g, p, s, 4, 10);
        if (c.trivial()) continue;
        REQUIRE(parse_character(c.to_string(), p, s) == c);
    }
    CHECK_THROWS_AS(parse_character("sites=0,1 freqs=1", 2, 1), ParseError);
    CHECK_THROWS_AS(parse_character("sites=0,0 freqs=1,1", 2, 1), ParseError);
    CHECK_THROWS_AS(parse_character("sites=0 freqs=1 junk", 2, 1), ParseError);
    CHECK_THROWS_AS(parse_character("freqs=1", 2, 1), ParseError);
    CHECK_THROWS_AS(parse_character("sites=0 freqs=(1|1|1)", 2, 2), ParseError);
}
