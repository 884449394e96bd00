#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ctl/levy.hpp"

using namespace ctl;

TEST_CASE("scale function against an independent Volterra solve") {
    auto w = scale_function(2.0, 1e-4);
    CHECK(w(0.0) == 1.0);
    CHECK(w(1.0) == doctest::Approx(1.598314075009056).epsilon(1e-6));
    CHECK(w(2.0) == doctest::Approx(1.9533357030751528).epsilon(1e-6));
}

TEST_CASE("fast and reference solvers agree") {
    auto a = scale_function(20.0, 0.01), b = scale_function_reference(20.0, 0.01);
    auto va = a.values(), vb = b.values();
    REQUIRE(va.size() == vb.size());
    double worst = 0;
    for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("exit and crossing probabilities") {
    auto w = scale_function(3.0, 1e-3);
    CHECK(exit_probability(1.0, 1.0, w) == doctest::Approx(w(1.0) / w(2.0)));
    CHECK(crossing_probability_q(1.0, w) == doctest::Approx(1.0 - 1.0 / w(1.0)));
}

TEST_CASE("undershoot law integrates to one and its cdf is monotone") {
    auto w = scale_function(2.0, 1e-4);
    UndershootLaw law(1.0, w);
    CHECK(law.cdf(0.0) == doctest::Approx(0.0));
    CHECK(law.cdf(1.0) == doctest::Approx(1.0));
    double prev = 0;
    for (double v = 0.05; v < 1.0; v += 0.05) {
        CHECK(law.cdf(v) >= prev);
        prev = law.cdf(v);
    }
}

TEST_CASE("closed-form limits") {
    CHECK(limit_rate_gstar(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(limit_density_h(1.0, 1.0) == doctest::Approx(3.0 / (4.0 * std::numbers::pi)));
    CHECK(initial_jump_sf(4.0) == doctest::Approx(13.0 / 27.0));
    CHECK(ladder_height_sf(4.0) == doctest::Approx(1.0 / 3.0));
    CHECK(gstar_mass(1.0) == doctest::Approx(std::numbers::pi - 2.0));
    CHECK(scale_asymptote_constant() == doctest::Approx(0.9003163161571061));
}

TEST_CASE("jump samplers invert their tails") {
    Rng r(12);
    int above = 0, v_above = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        above += jump_sample(r) > 4.0;
        v_above += initial_jump_sample(r) > 4.0;
    }
    CHECK(above / double(n) == doctest::Approx(jump_sf(4.0)).epsilon(0.05));
    CHECK(v_above / double(n) == doctest::Approx(initial_jump_sf(4.0)).epsilon(0.02));
    for (int i = 0; i < 100; ++i) CHECK(jump_sample_above(3.0, r) > 3.0);
}

TEST_CASE("exit records respect the interval") {
    Rng r(2);
    for (int i = 0; i < 500; ++i) {
        ExitRecord e = exit_interval_record(1.0, 0.0, 2.0, r);
        if (e.above) {
            CHECK(e.overshoot > 0.0);
            CHECK(e.undershoot >= 0.0);
            CHECK(e.undershoot <= 2.0);
        }
    }
}
