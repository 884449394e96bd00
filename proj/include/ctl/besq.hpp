#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctl/rng.hpp"
#include "ctl/stats.hpp"

namespace ctl {

// Values on the grid t_k = k * dt; constant 0 after absorption.
struct DiffusionPath {
    double dt = 0.0;
    std::vector<double> values;
    std::optional<double> absorbed_at;

    double time(std::size_t k) const { return dt * static_cast<double>(k); }
    std::string to_csv() const;
};

// Euler scheme for dZ = 2 sqrt(Z) dB + theta dt with max(Z, 0) under the root.
// For theta <= 0 the first nonpositive grid value absorbs the path.
DiffusionPath simulate_besq(double theta, double x0, double dt, double horizon, Rng& rng);

// Absorption times of one Brownian path discretized at dt * 2^(levels-1), ..., 2 dt, dt
// (coarsest first). Coarse increments are sums of fine ones. Infinity if not absorbed.
std::vector<double> besq_absorption_ladder(double theta, double x0, double dt, int levels,
                                           double horizon, Rng& rng);

// Hitting time of 0 for the process of dimension -theta: x / (2G), G ~ Gamma(theta/2 + 1).
double hitting_time_sampler(double x, double theta, Rng& rng);
double hitting_time_cdf(double x, double theta, double t);

// Exact E[Z_t] and E[Z_t^2] for dimension -1 started at x, from the hitting-time law.
struct Moments {
    double mean = 0.0;
    double second = 0.0;
};
Moments besq_minus_one_moments(double x, double t);

struct MomentRow {
    double t = 0.0;
    double gw_mean = 0.0, gw_mean_se = 0.0;
    double gw_second = 0.0, gw_second_se = 0.0;
    double besq_mean = 0.0, besq_mean_se = 0.0;
    double besq_second = 0.0, besq_second_se = 0.0;
    double exact_mean = 0.0, exact_second = 0.0;
    double mean_z = 0.0;    // |difference| / joint se
    double second_z = 0.0;
};
struct ConvergenceReport {
    double n = 0.0;
    double x = 0.0;
    std::size_t replicas = 0;
    std::vector<MomentRow> rows;
    double worst_z() const;
};
// GW(-1) from n x individuals read at times n t and divided by n, against Euler paths
// of the dimension -1 process.
ConvergenceReport gw_besq_convergence_check(double n, double x, const std::vector<double>& times,
                                            std::size_t replicas, std::uint64_t key,
                                            double besq_dt = 1e-3);

// Proportions z_i / (z_1 + z_2 + z_3) on the clock 4 C_t, C_t = int_0^t ds / zeta(s),
// up to the first absorption.
struct SimplexPath {
    std::vector<double> clock;  // 4 C_t
    std::vector<std::array<double, 3>> mu;
    std::size_t tau_index = 0;
    double max_sum_error() const;
};
SimplexPath nwf_time_change(const DiffusionPath& z1, const DiffusionPath& z2, const DiffusionPath& z3);

// Law of Z_t under dimension -1 from x, binned on [0, y_max), compared with the
// dimension 5 density read backwards: p_t(x, y) against p5_t(y, x).
TestReport besq_duality_check(double x, double t, double y_max, std::size_t bins,
                              std::size_t samples, double dt, std::uint64_t key, double alpha = 0.01);

}  // namespace ctl
