#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ctl/rng.hpp"

namespace ctl {

// Binary branching at rate 2 per individual with emigration at rate 1.
struct GWPath {
    std::vector<double> event_times;          // first entry is time 0
    std::vector<std::int64_t> populations;    // population after each event
    std::optional<double> extinction_time;
};

GWPath simulate_gw(std::int64_t start, std::optional<double> horizon, Rng& rng);

// Path-free run: extinction time (infinity if alive at horizon) and population at the horizon.
struct GWOutcome {
    double extinction_time = std::numeric_limits<double>::infinity();
    std::int64_t population = 0;
};
GWOutcome run_gw(std::int64_t start, double horizon, Rng& rng);

double survival_sf(double u);                  // (1+2u)^{-3/2}
double survival_cdf(double u);                 // 1 - survival_sf
double extinction_density_2sigma(double s);    // (3/2)(1+s)^{-5/2}
double laplace_psi(double theta);

struct FractionValue {
    double value = 0.0;
    bool converged = true;
};
FractionValue laplace_psi_continued_fraction(double theta, int depth);

double conditional_mean(double t);
double scale_martingale_value(std::int64_t z);
double laguerre_martingale_value(double x, std::int64_t z, double t);

// Samples of Z_{nt}/(2nt) given survival to nt, by plain rejection.
struct YaglomBatch {
    std::vector<double> samples;
    std::uint64_t attempts = 0;
};
YaglomBatch yaglom_samples(double n, double t, std::size_t count, std::uint64_t key);

}  // namespace ctl
