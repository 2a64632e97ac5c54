#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "lcarand/errors.hpp"
#include "lcarand/model_io.hpp"

using namespace lcarand;

namespace {

bool same(const MeasureModel& a, const MeasureModel& b) {
    if (a.index() != b.index()) return false;
    return std::visit([&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, BernoulliMeasure>) return x.p == y.p && x.s == y.s && x.weights == y.weights;
        else if constexpr (std::is_same_v<T, MarkovMeasure>) return x.p == y.p && x.s == y.s && x.chain.Q == y.chain.Q;
        else if constexpr (std::is_same_v<T, QuasiMarkovMeasure>)
            return x.p == y.p && x.s == y.s && x.hidden.Q == y.hidden.Q && x.left == y.left && x.right == y.right &&
                   x.psi == y.psi;
        else return x.alpha == y.alpha && x.nmax == y.nmax;
    }, a);
}

}  // namespace

TEST_CASE("parse the documented sections") {
    auto m = parse_model("# demo chain\n[markov]\np=2\ns=1\nQ=2/3,1/3; 1/3,2/3\n");
    REQUIRE(std::holds_alternative<MarkovMeasure>(m));
    const auto& mk = std::get<MarkovMeasure>(m);
    CHECK(mk.chain.Q(0, 1) == doctest::Approx(1.0 / 3));
    CHECK(mk.chain.pi[0] == doctest::Approx(0.5));

    auto b = parse_model("[bernoulli]\np=3\ns=1\nweights=0.2, 0.3, 0.5  # trailing comment\n");
    CHECK(std::get<BernoulliMeasure>(b).weights[2] == 0.5);

    auto q = parse_model("[quasi]\np=2\ns=1\nhidden_states=3\nhidden_Q=1/2,0,1/2;1/2,0,1/2;0,1,0\nleft=0\nright=0\npsi=0,1,1\n");
    CHECK(same(q, MeasureModel{even_shift()}));

    auto ir = parse_model("[irdi]\nalpha=0.8\n");
    CHECK(std::get<IrdiMeasure>(ir).nmax == 24);
    CHECK(std::get<IrdiMeasure>(ir).alpha == 0.8);

    auto withpi = parse_model("[markov]\np=2\ns=1\nQ=0,1;1,0\npi=1/2,1/2\n");
    CHECK(std::get<MarkovMeasure>(withpi).chain.pi[1] == 0.5);
}

TEST_CASE("round trip") {
    std::vector<MeasureModel> models{even_shift(), mrf_demo_chain(), bernoulli_uniform(5), point_mass_zero(3, 2),
                                     IrdiMeasure{0.75, 20}};
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> U(0.01, 1);
    for (int i = 0; i < 20; ++i) {
        Eigen::MatrixXd Q(4, 4);
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) Q(r, c) = U(g);
            Q.row(r) /= Q.row(r).sum();
        }
        models.push_back(markov_measure(2, 2, Q));
    }
    for (const auto& m : models) {
        auto text = serialize_model(m);
        auto back = parse_model(text);
        CHECK(same(m, back));
        CHECK(serialize_model(back) == text);
    }
}

TEST_CASE("load from file") {
    const std::string path = "model_io_test.ini";
    {
        std::ofstream f(path);
        f << serialize_model(mrf_demo_chain());
    }
    CHECK(same(load_model(path), MeasureModel{mrf_demo_chain()}));
    std::remove(path.c_str());
    CHECK_THROWS(load_model("does/not/exist.ini"));
}

TEST_CASE("errors carry positions") {
    auto pos_of = [](const std::string& text) -> long {
        try {
            parse_model(text);
        } catch (const ParseError& e) {
            return static_cast<long>(e.position());
        }
        return -1;
    };
    CHECK(pos_of("") >= 0);
    CHECK(pos_of("[markov\np=2\n") >= 0);
    CHECK(pos_of("[weird]\n") >= 0);
    CHECK(pos_of("[markov]\np=2\ns=1\nQ=1,0;x,1\n") >= 0);
    CHECK(pos_of("[markov]\np=2\ns=1\n") >= 0);                       // missing Q
    CHECK(pos_of("[markov]\np=2\ns=1\nQ=1,0;0,1\nQ=1,0;0,1\n") >= 0);  // duplicate key
    CHECK(pos_of("[irdi]\nalpha=0.8\n[irdi]\nalpha=0.7\n") >= 0);      // two sections
    CHECK(pos_of("[bernoulli]\np=2\ns=1\nweights=1/0,1\n") >= 0);
    CHECK(pos_of("[irdi]\nalpha=0.8\nfoo=1\n") >= 0);                 // unknown key
    // semantic problems are reported as invalid input too
    CHECK_THROWS_AS(parse_model("[bernoulli]\np=2\ns=1\nweights=0.3,0.3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model("[markov]\np=4\ns=1\nQ=1,0,0,0;0,1,0,0;0,0,1,0;0,0,0,1\n"), std::invalid_argument);
}

TEST_CASE("presets") {
    for (const auto& name : preset_names()) CHECK_NOTHROW(validate(preset(name)));
    CHECK(model_kind(preset("even-shift")) == "quasi");
    CHECK(model_kind(preset("irdi")) == "irdi");
    CHECK(model_p(preset("bernoulli", 5)) == 5);
    CHECK_THROWS(preset("nope"));
}
