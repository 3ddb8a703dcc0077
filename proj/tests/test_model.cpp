#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "temlab/extra_models.hpp"
#include "temlab/model.hpp"

using namespace temlab;

TEST_CASE("vq2 coefficients at reference points") {
    const ModelSpec m = builtin_vq2();
    CHECK(m.arity() == 3);
    CHECK(m.tau() == 1.0);
    CHECK(m.initial_segment(-1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(m.initial_segment(0.0) == 2.0);
    CHECK(m.alpha1(1.0) == -1.0);
    CHECK(m.alpha2(1.0) == -7.0);
    const std::array<double, 3> args = {1.0, 1.0, 1.0};
    CHECK(m.alpha3(args) == 6.0);
    CHECK(m.drift(args) == -2.0);
    CHECK(m.beta(4.0) == 8.0);
    CHECK_NOTHROW(m.validate());
}

TEST_CASE("vix32 risk-neutral drift") {
    const ModelSpec m = builtin_vix32(2.0, -3.0, 1.0, 1.0);
    CHECK(m.arity() == 1);
    const std::array<double, 1> v1 = {1.0};
    // alpha1(1) = -1, alpha2(1) = 2 - 3 = -1.
    CHECK(m.drift(v1) == -2.0);
    CHECK(m.beta(4.0) == 8.0);
    CHECK(m.beta(-4.0) == 8.0);
    // V|V| keeps one-sided Lipschitz structure on the negative axis.
    CHECK(m.alpha2(-1.0) == -2.0 + 3.0);
    CHECK_THROWS_AS((void)builtin_vix32(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("multi-delay family layout") {
    const ModelSpec m = builtin_multi_delay(512);
    CHECK(m.name == "mul512");
    CHECK(m.arity() == 513);
    CHECK(m.delays[1] == 0x1p-9);
    CHECK(m.tau() == 512.0 * 0x1p-9);
    CHECK(m.initial_segment(-0.5) == 1.0);
    std::vector<double> ones(513, 1.0);
    CHECK(m.alpha3(ones) == 513.0);
    CHECK(m.alpha2(2.0) == -32.0);
    CHECK_THROWS_AS((void)builtin_multi_delay(0), std::invalid_argument);
}

TEST_CASE("model_by_name parses the builtin names") {
    CHECK(model_by_name("vq2").name == "vq2");
    CHECK(model_by_name("mul256").arity() == 257);
    CHECK(model_by_name("vix32", 2.0, -3.0, 1.0, 1.0).name == "vix32");
    CHECK_THROWS_AS((void)model_by_name("heston"), std::invalid_argument);
    CHECK_THROWS_AS((void)model_by_name("mul"), std::invalid_argument);
}

TEST_CASE("validate rejects malformed specs") {
    ModelSpec m = builtin_vq2();
    m.delays = {0.25, 1.0};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = builtin_vq2();
    m.delays = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = builtin_vq2();
    m.eta = 1.5;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = builtin_vq2();
    m.sigma = 0.25;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = builtin_vq2();
    m.p_check = 1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("assumption checks pass for the builtin models") {
    for (const ModelSpec& m :
         {builtin_vq2(), builtin_vix32(2.0, -3.0, 1.0, 1.0), builtin_multi_delay(3),
          builtin_cubic(), builtin_additive()}) {
        const AssumptionReport rep = check_assumptions(m, -10.0, 10.0, 20000, 1234);
        INFO("model ", m.name);
        CHECK(rep.max_violation() <= 1e-9);
        CHECK(rep.records.size() == 7);
        CHECK(rep["alpha2_one_sided"].n_samples == 20000);
    }
}

TEST_CASE("assumption checks catch a wrongly declared diffusion") {
    // beta(x) = x^2 declared as 1/2-Hoelder with l3 = 0 is false on [-10,10].
    ModelSpec m = builtin_additive();
    m.name = "bad_beta";
    m.beta = [](double x) { return x * x; };
    m.l3 = 0.0;
    m.L3 = 1.0;
    const AssumptionReport rep = check_assumptions(m, -10.0, 10.0, 20000, 1234);
    CHECK(rep["beta_holder"].max_violation > 1e-9);
    CHECK(rep["beta_holder"].fitted_constant > 1.0);
    CHECK(rep["beta_holder"].witness.size() == 2);
}

TEST_CASE("assumption checks are deterministic in the seed") {
    const ModelSpec m = builtin_vq2();
    const AssumptionReport a = check_assumptions(m, -5.0, 5.0, 5000, 77);
    const AssumptionReport b = check_assumptions(m, -5.0, 5.0, 5000, 77);
    const AssumptionReport c = check_assumptions(m, -5.0, 5.0, 5000, 78);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].max_violation == b.records[i].max_violation);
        CHECK(a.records[i].fitted_constant == b.records[i].fitted_constant);
    }
    bool any_diff = false;
    for (std::size_t i = 0; i < a.records.size(); ++i)
        if (a.records[i].fitted_constant != c.records[i].fitted_constant) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("degenerate sampling boxes are rejected") {
    const ModelSpec m = builtin_vq2();
    CHECK_THROWS_AS((void)check_assumptions(m, 1.0, 1.0, 100, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)check_assumptions(m, -1.0, 1.0, 1, 0), std::invalid_argument);
}
