#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lcarand/errors.hpp"
#include "lcarand/lca.hpp"

using namespace lcarand;

namespace {

LcaPolynomial P(u64 p, std::map<i64, u64> t) { return LcaPolynomial(p, std::move(t)); }

// schoolbook convolution on dense arrays, exponents shifted to be >= 0
LcaPolynomial dense_product(const LcaPolynomial& a, const LcaPolynomial& b) {
    const u64 p = a.p();
    i64 lo = a.min_exp() + b.min_exp();
    std::vector<u64> c(diam(a) + diam(b) + 1, 0);
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) c[ea + eb - lo] = (c[ea + eb - lo] + ca * cb) % p;
    std::map<i64, u64> t;
    for (std::size_t i = 0; i < c.size(); ++i) t[lo + static_cast<i64>(i)] = c[i];
    return LcaPolynomial(p, t);
}

LcaPolynomial random_poly(std::mt19937_64& g, u64 p, int terms, int span) {
    std::map<i64, u64> t;
    for (int i = 0; i < terms; ++i) t[static_cast<i64>(g() % (2 * span + 1)) - span] = 1 + g() % (p - 1);
    t[0] = 1;
    return LcaPolynomial(p, t);
}

Window random_window(std::mt19937_64& g, u64 p, unsigned s, std::size_t len, i64 offset) {
    Window w;
    w.offset = offset;
    w.s = s;
    w.data.resize(len * s);
    for (auto& x : w.data) x = static_cast<std::uint32_t>(g() % p);
    return w;
}

}  // namespace

TEST_CASE("multiply") {
    auto one_plus = P(2, {{0, 1}, {1, 1}});
    CHECK(multiply(one_plus, LcaPolynomial::one(2)) == one_plus);
    CHECK(multiply(one_plus, one_plus) == P(2, {{0, 1}, {2, 1}}));
    CHECK(multiply(one_plus, P(2, {{0, 1}, {1, 1}, {2, 1}})) == P(2, {{0, 1}, {3, 1}}));
    CHECK_THROWS_AS(multiply(one_plus, P(3, {{0, 1}})), std::invalid_argument);
    std::mt19937_64 g(7);
    for (int i = 0; i < 300; ++i) {
        u64 p = std::vector<u64>{2, 3, 5, 7}[i % 4];
        auto a = random_poly(g, p, 4, 9), b = random_poly(g, p, 5, 7);
        REQUIRE(multiply(a, b) == dense_product(a, b));
    }
}

TEST_CASE("powers") {
    auto one_plus = P(2, {{0, 1}, {1, 1}});
    CHECK(power_naive(one_plus, 0) == LcaPolynomial::one(2));
    CHECK(power_naive(one_plus, 4) == P(2, {{0, 1}, {4, 1}}));
    auto l53 = lucas_set(53, 2);
    CHECK(power_fast(one_plus, 53).exponents() == std::vector<i64>(l53.elements.begin(), l53.elements.end()));
    CHECK(power_fast(P(3, {{0, 1}, {1, 1}, {2, 1}}), 27) == power_naive(P(3, {{0, 1}, {1, 1}, {2, 1}}), 27));
    for (u64 p : {2, 3, 5}) {
        std::vector<LcaPolynomial> phis{P(p, {{0, 1}, {1, 1}}), P(p, {{0, 1}, {1, 1}, {2, 1}}),
                                        P(p, {{0, 1}, {12, 1}, {13, 1}})};
        for (const auto& phi : phis) {
            LcaPolynomial acc = LcaPolynomial::one(p);
            for (u64 N = 0; N <= 256; ++N) {
                REQUIRE(power_fast(phi, N) == acc);
                acc = multiply(acc, phi);
            }
        }
    }
    std::mt19937_64 g(11);
    for (int i = 0; i < 200; ++i) {
        u64 p = std::vector<u64>{2, 3, 5, 7}[i % 4];
        auto phi = random_poly(g, p, 1 + i % 4, 6);
        u64 N = g() % 65;
        REQUIRE(power_fast(phi, N) == power_naive(phi, N));
    }
    // binomial path with general coefficients and negative exponents
    auto b = P(5, {{-3, 2}, {4, 3}});
    for (u64 N = 0; N < 80; ++N) REQUIRE(power_fast(b, N) == power_naive(b, N));
}

TEST_CASE("frobenius step") {
    for (u64 p : {2, 3}) {
        auto gamma = P(p, {{-2, 1}, {3, 1}});
        auto gs = gamma.shifted(16);
        auto phi = add(LcaPolynomial::one(p), gs);
        for (unsigned r = 0; r <= 6; ++r) {
            u64 q = ipow(p, r);
            REQUIRE(power_fast(phi, q) == add(LcaPolynomial::one(p), power_naive(gs, q)));
            if (q <= 81) REQUIRE(power_naive(phi, q) == add(LcaPolynomial::one(p), gs.frobenius(r)));
        }
    }
}

TEST_CASE("lucas power split") {
    BipartiteForm f{P(2, {{0, 1}}), 1, 2};  // 1 + sigma
    auto s = lucas_power_split(f, 53, 7);
    CHECK(s.M == 5);
    CHECK(s.r == 4);
    CHECK(s.H == 3);
    CHECK(s.assembled == power_naive(P(2, {{0, 1}, {1, 1}}), 53));
    CHECK(s.assembled == multiply(power_naive(P(2, {{0, 1}, {1, 1}}), 5), power_naive(P(2, {{0, 1}, {16, 1}}), 3)));
    auto pure = lucas_power_split(f, 64, 7);
    CHECK(pure.M == 0);
    CHECK(pure.r == 6);
    CHECK(pure.H == 1);
    CHECK_THROWS_AS(lucas_power_split(f, 63, 7), std::invalid_argument);
    std::mt19937_64 g(3);
    int done = 0;
    while (done < 100) {
        u64 p = done % 2 ? 3 : 2;
        u64 N = g() % 3000;
        if (!in_J(N, 7, p)) continue;
        BipartiteForm fp{P(p, {{0, 1}}), 1, p};
        auto sp = lucas_power_split(fp, N, 7);
        REQUIRE(sp.M + ipow(p, sp.r) * sp.H == N);
        REQUIRE(sp.M < ipow(p, sp.r - 1));
        REQUIRE(7 < ipow(p, sp.r - 1));
        REQUIRE(sp.assembled == power_naive(fp.expand(), N));
        ++done;
    }
}

TEST_CASE("geometry and K_p") {
    CHECK(diam(P(2, {{0, 1}, {1, 1}})) == 1);
    CHECK(centre(P(2, {{0, 1}, {1, 1}})) == Rational(1, 2));
    CHECK(diam(P(3, {{-2, 1}, {3, 1}})) == 5);
    CHECK(centre(P(3, {{-2, 1}, {3, 1}})) == Rational(1, 2));
    CHECK(diam(P(3, {{7, 2}})) == 0);
    CHECK(centre(P(3, {{7, 2}})) == Rational(7));
    CHECK(K_p(2) == Rational(1, 12));
    CHECK(K_p(3) == Rational(5, 16));
    CHECK(K_p(5) == Rational(1, 2));
    CHECK(K_p(7) == Rational(1, 2));
}

TEST_CASE("bipartite classification") {
    for (u64 p : {2, 3, 5, 7}) {
        auto phi = P(p, {{0, 1}, {12, 1}, {13, 1}});
        auto f = classify_bipartite(phi);
        REQUIRE(f);
        CHECK(f->f == 12);
        CHECK(f->gamma == P(p, {{0, 1}, {1, 1}}));
        CHECK(f->expand() == phi);
    }
    CHECK_FALSE(classify_bipartite(P(2, {{0, 1}, {2, 1}, {3, 1}})));
    CHECK_FALSE(classify_bipartite(P(3, {{0, 1}, {2, 1}, {3, 1}})));
    auto five = classify_bipartite(P(5, {{0, 1}, {2, 1}, {3, 1}}));
    REQUIRE(five);
    CHECK(five->expand() == P(5, {{0, 1}, {2, 1}, {3, 1}}));
    auto t = classify_bipartite(P(3, {{0, 1}, {14, 1}, {19, 1}}));
    REQUIRE(t);
    CHECK(t->f == 16);
    CHECK(t->gamma == P(3, {{-2, 1}, {3, 1}}));
    CHECK_FALSE(classify_bipartite(P(2, {{0, 1}, {14, 1}, {19, 1}})));
    CHECK_FALSE(classify_bipartite(P(5, {{1, 1}, {2, 1}})));  // constant term must be 1
    std::mt19937_64 g(5);
    for (int i = 0; i < 500; ++i) {
        u64 p = std::vector<u64>{2, 3, 5}[i % 3];
        std::map<i64, u64> t{{0, 1}};
        i64 f0 = static_cast<i64>(g() % 41) - 20;
        for (int k = 0; k < 3; ++k) t[f0 + static_cast<i64>(g() % 5)] = 1 + g() % (p - 1);
        auto phi = P(p, t);
        if (auto bf = classify_bipartite(phi)) {
            REQUIRE(bf->expand() == phi);
            REQUIRE(Rational(static_cast<i64>(diam(bf->gamma))) <= K_p(p) * (bf->f < 0 ? -bf->f : bf->f));
            REQUIRE(boost::abs(centre(bf->gamma)) < 1);
        }
    }
}

TEST_CASE("s_rank") {
    auto phi = P(2, {{0, 1}, {5, 1}, {6, 1}, {11, 1}, {12, 1}, {13, 1}});
    CHECK(s_rank(phi, 4) == 3);
    CHECK(s_rank(phi, 1) == 6);
    CHECK(s_rank(phi, 7) == 1);
    std::mt19937_64 g(9);
    for (int i = 0; i < 100; ++i) {
        auto q = random_poly(g, 3, 6, 30);
        REQUIRE(s_rank(q, 1) == q.size());
        for (u64 S = 1; S < 40; ++S) REQUIRE(s_rank(q, S + 1) <= s_rank(q, S));
    }
}

TEST_CASE("apply") {
    Window w{0, 1, {0, 1, 1, 0}};
    auto out = apply(P(2, {{0, 1}, {1, 1}}), w);
    CHECK(out.offset == 0);
    CHECK(out.data == std::vector<std::uint32_t>{1, 0, 1});
    CHECK(apply(LcaPolynomial::one(2), w).data == w.data);
    Window z{-4, 2, std::vector<std::uint32_t>(20, 0)};
    auto zo = apply(P(3, {{-1, 2}, {2, 1}}), z);
    CHECK(zo.length() == 7);
    CHECK(zo.offset == -3);
    for (auto x : zo.data) CHECK(x == 0);
    CHECK_THROWS_AS(apply(P(2, {{0, 1}, {5, 1}}), w), std::invalid_argument);

    std::mt19937_64 g(13);
    for (int i = 0; i < 200; ++i) {
        u64 p = std::vector<u64>{2, 3, 5}[i % 3];
        unsigned s = 1 + i % 2;
        auto a = random_poly(g, p, 3, 4), b = random_poly(g, p, 3, 5);
        auto win = random_window(g, p, s, 60, static_cast<i64>(g() % 21) - 10);
        auto lhs = apply(multiply(a, b), win);
        auto rhs = apply(a, apply(b, win));
        REQUIRE(lhs.offset == rhs.offset);
        REQUIRE(lhs.data == rhs.data);
        REQUIRE(apply_serial(a, win).data == apply(a, win).data);
    }
}

TEST_CASE("LCA text syntax") {
    auto phi = parse_lca("1+x^5+x^6+x^11+x^12+x^13", 2);
    CHECK(phi.exponents() == std::vector<i64>{0, 5, 6, 11, 12, 13});
    CHECK(parse_lca("1 + x^-2", 3) == P(3, {{-2, 1}, {0, 1}}));
    CHECK(parse_lca("2*x^3 + x", 5) == P(5, {{1, 1}, {3, 2}}));
    CHECK(parse_lca("1+x", 2) == P(2, {{0, 1}, {1, 1}}));
    CHECK(parse_lca("x - 1", 3) == P(3, {{0, 2}, {1, 1}}));
    CHECK(parse_lca(phi.to_string(), 2) == phi);
    CHECK(parse_lca(P(7, {{-3, 4}, {0, 1}, {2, 6}}).to_string(), 7) == P(7, {{-3, 4}, {0, 1}, {2, 6}}));
    try {
        parse_lca("1+x^^2", 2);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_AS(parse_lca("1+", 2), ParseError);
    CHECK_THROWS_AS(parse_lca("", 2), ParseError);
    CHECK_THROWS_AS(parse_lca("x+x", 2), ParseError);
    CHECK_THROWS_AS(parse_lca("1 x", 2), ParseError);
    CHECK_THROWS_AS(LcaPolynomial::lca(2, {{0, 1}}), std::invalid_argument);
}
