#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ctl/parallel.hpp"
#include "ctl/rng.hpp"
#include "ctl/special.hpp"
#include "ctl/stats.hpp"

using namespace ctl;

TEST_CASE("philox streams are reproducible and distinct") {
    Rng a(derive_key(7, "x")), b(derive_key(7, "x")), c(derive_key(7, "y"));
    for (int i = 0; i < 100; ++i) {
        auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
}

TEST_CASE("replicate does not depend on thread count") {
    auto f = [](std::size_t, Rng& r) { return r.normal() + r.exponential(); };
    auto s = replicate_serial(500, 11, f);
    CHECK(replicate(500, 11, f, 1) == s);
    CHECK(replicate(500, 11, f, 4) == s);
}

TEST_CASE("samplers match their first moments") {
    Rng r(3);
    const int n = 200000;
    double e = 0, g = 0, p = 0, u = 0;
    for (int i = 0; i < n; ++i) {
        e += r.exponential(2.0);
        g += r.gamma(1.5);
        p += static_cast<double>(r.poisson(3.7));
        u += r.uniform();
    }
    CHECK(e / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(g / n == doctest::Approx(1.5).epsilon(0.01));
    CHECK(p / n == doctest::Approx(3.7).epsilon(0.01));
    CHECK(u / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("special functions against frozen values") {
    CHECK(gamma_q(1.5, 2.0) == doctest::Approx(0.26146412994911117).epsilon(1e-12));
    CHECK(gamma_p(2.5, 1.3) == doctest::Approx(0.23863473215498604).epsilon(1e-12));
    CHECK(laguerre(5, 1.5, 0.7) == doctest::Approx(0.9186473333333334).epsilon(1e-12));
    CHECK(chi_square_quantile(0.99, 14) == doctest::Approx(29.141237740672796).epsilon(1e-8));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-9));
}

TEST_CASE("ks and chi-square plumbing") {
    std::vector<double> x{0.1, 0.4, 0.7};
    CHECK(ks_two_sample_distance(x, x) == 0.0);
    Rng r(5);
    std::vector<double> u(20000);
    for (auto& v : u) v = r.uniform();
    CHECK(ks_statistic("uniform", u, [](double t) { return std::clamp(t, 0.0, 1.0); }).pass);
    std::vector<double> counts{98, 103, 99, 100}, expected{1, 1, 1, 1};
    CHECK(chi_square_gof("flat", counts, expected).pass);
    std::vector<double> skewed{200, 50, 50, 100};
    CHECK_FALSE(chi_square_gof("skewed", skewed, expected).pass);
}

TEST_CASE("poisson dispersion calibration") {
    int rejects = 0;
    const int reps = 400;
    for (int k = 0; k < reps; ++k) {
        Rng r(derive_key(99, static_cast<std::uint64_t>(k)));
        std::vector<double> c(500);
        for (auto& v : c) v = static_cast<double>(r.poisson(1.0));
        rejects += !poisson_dispersion("p", c, 0.01).pass;
    }
    CHECK(rejects <= 0.01 * reps + 2.0 * std::sqrt(0.01 / reps) * reps + 2);
}
