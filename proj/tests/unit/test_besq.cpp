#include <doctest.h>

#include <cmath>

#include "ctl/besq.hpp"
#include "ctl/parallel.hpp"

using namespace ctl;

TEST_CASE("hitting-time law against frozen values") {
    CHECK(hitting_time_cdf(1.0, 1.0, 1.0) == doctest::Approx(0.8012519569012009).epsilon(1e-12));
    CHECK(hitting_time_cdf(1.0, 1.0, 0.0) == 0.0);
    CHECK_THROWS(hitting_time_cdf(1.0, -2.0, 1.0));
}

TEST_CASE("exact dimension -1 moments") {
    Moments m = besq_minus_one_moments(1.0, 0.5);
    CHECK(m.mean == doctest::Approx(0.628904145185155).epsilon(1e-9));
    CHECK(m.second == doctest::Approx(1.78605701073).epsilon(1e-8));
}

TEST_CASE("sampler matches its cdf") {
    auto t = replicate(20000, 4, [](std::size_t, Rng& r) { return hitting_time_sampler(1.0, 1.0, r); });
    CHECK(ks_statistic("T0", t, [](double s) { return hitting_time_cdf(1.0, 1.0, s); }).pass);
}

TEST_CASE("ladder levels share the Brownian path") {
    Rng a(6), b(6);
    auto t = besq_absorption_ladder(-1.0, 1.0, 1e-3, 1, 50.0, a);
    DiffusionPath p = simulate_besq(-1.0, 1.0, 1e-3, 50.0, b);
    REQUIRE(p.absorbed_at);
    CHECK(t[0] == doctest::Approx(*p.absorbed_at));
}

TEST_CASE("simplex proportions sum to one") {
    Rng r(8);
    auto a = simulate_besq(-1.0, 1.0, 1e-3, 1.0, r);
    auto b = simulate_besq(-1.0, 2.0, 1e-3, 1.0, r);
    auto c = simulate_besq(-1.0, 0.5, 1e-3, 1.0, r);
    SimplexPath s = nwf_time_change(a, b, c);
    CHECK(s.max_sum_error() < 1e-12);
    CHECK(s.clock.front() == 0.0);
    for (std::size_t k = 1; k < s.clock.size(); ++k) CHECK(s.clock[k] > s.clock[k - 1]);
}

TEST_CASE("duality histogram passes") {
    CHECK(besq_duality_check(1.0, 0.5, 3.0, 12, 4000, 1e-3, 17).pass);
}
