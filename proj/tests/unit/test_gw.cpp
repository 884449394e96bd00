#include <doctest.h>

#include <cmath>
#include <limits>

#include "ctl/gw.hpp"
#include "ctl/parallel.hpp"

using namespace ctl;

TEST_CASE("extinction-time transform against quadrature") {
    CHECK(laplace_psi(0.5) == doctest::Approx(0.77282068038252352).epsilon(1e-12));
    CHECK(laplace_psi(1.0) == doctest::Approx(0.65567954241879847).epsilon(1e-12));
    CHECK(laplace_psi(2.0) == doctest::Approx(0.51574431228262421).epsilon(1e-12));
    CHECK(laplace_psi(5.0) == doctest::Approx(0.32696293257551148).epsilon(1e-12));
    CHECK(laplace_psi_continued_fraction(2.0, 200).value == doctest::Approx(laplace_psi(2.0)).epsilon(1e-10));
}

TEST_CASE("survival and density") {
    CHECK(survival_sf(0.0) == 1.0);
    CHECK(survival_sf(4.0) == doctest::Approx(1.0 / 27.0));
    CHECK(survival_cdf(1.5) == doctest::Approx(1.0 - 0.125));
    CHECK(extinction_density_2sigma(0.0) == doctest::Approx(1.5));
    CHECK(conditional_mean(2.0) == doctest::Approx(5.0));
}

TEST_CASE("martingales start at one and vanish at extinction") {
    CHECK(scale_martingale_value(1) == doctest::Approx(1.0));
    CHECK(scale_martingale_value(0) == 0.0);
    CHECK(laguerre_martingale_value(0.1, 1, 0.0) == doctest::Approx(1.0));
    CHECK(laguerre_martingale_value(0.1, 0, 1.0) == 0.0);
}

TEST_CASE("simulated path is consistent with the outcome") {
    Rng r(4);
    GWPath p = simulate_gw(3, std::nullopt, r);
    REQUIRE(p.extinction_time);
    CHECK(p.populations.back() == 0);
    for (std::size_t i = 1; i < p.populations.size(); ++i)
        CHECK(std::abs(p.populations[i] - p.populations[i - 1]) == 1);
    CHECK(p.event_times.back() == doctest::Approx(*p.extinction_time));
}

TEST_CASE("mean population decays like (1+2t)^(-1/2)") {
    auto z = replicate(40000, 8, [](std::size_t, Rng& r) { return static_cast<double>(run_gw(1, 1.5, r).population); });
    double m = 0, m2 = 0;
    for (double v : z) {
        m += v;
        m2 += v * v;
    }
    m /= z.size();
    double se = std::sqrt((m2 / z.size() - m * m) / z.size());
    CHECK(std::abs(m - 0.5) < 4 * se);
}
