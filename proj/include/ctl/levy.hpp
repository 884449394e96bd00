#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "ctl/rng.hpp"

namespace ctl {

// Jump law L: survival (1+2u)^{-3/2}.
double jump_sample(Rng& rng);
double jump_sf(double u);
double jump_cdf(double u);
// Jump conditioned to exceed lo, by inversion on the tail.
double jump_sample_above(double lo, Rng& rng);

double laplace_exponent(double theta);
double ladder_height_sf(double u);  // (1+2u)^{-1/2}
double ladder_height_sample(Rng& rng);

enum class StopReason { horizon, passed_above, exited_above, exited_below, budget };

struct CompoundPoissonPath {
    double start = 0.0;
    std::vector<double> jump_times;
    std::vector<double> jump_sizes;
    double end_time = 0.0;
    StopReason stop_reason = StopReason::horizon;

    double value(double t) const;           // right-continuous
    double value_before(std::size_t k) const;  // X at jump k, just before it
    double end_value() const { return value(end_time); }
};

struct Horizon {
    double t;
};
struct FirstPassageAbove {
    double level;
};
struct ExitInterval {
    double lo, hi;
};
using StopRule = std::variant<Horizon, FirstPassageAbove, ExitInterval>;

// Exact event-driven simulation. max_jumps guards rules that trigger only a.s.
CompoundPoissonPath simulate_levy(double start, const StopRule& rule, Rng& rng,
                                  std::uint64_t max_jumps = 1ull << 32);

struct CrossingRecord {
    double level = 0.0;
    double tau = 0.0;
    double undershoot = 0.0;  // J
    double overshoot = 0.0;   // I
    std::uint64_t jumps = 0;
    bool complete = false;    // false if the jump budget ran out
};

CrossingRecord first_passage_record(double start, double level, Rng& rng,
                                    std::uint64_t max_jumps = 1ull << 32);

struct ExitRecord {
    bool above = false;
    double tau = 0.0;
    double undershoot = 0.0;
    double overshoot = 0.0;
};
// Exit of [lo, hi] from start in [lo, hi]: through lo by drift or above hi by a jump.
ExitRecord exit_interval_record(double start, double lo, double hi, Rng& rng);

class ScaleFunctionTable {
public:
    ScaleFunctionTable() = default;
    ScaleFunctionTable(double step, std::vector<double> values);

    double step() const { return step_; }
    double x_max() const { return step_ * static_cast<double>(values_.size() - 1); }
    std::span<const double> values() const { return values_; }
    double operator()(double x) const;  // linear interpolation

private:
    double step_ = 0.0;
    std::vector<double> values_;
};

// W = 1 + W*Lbar by trapezoid stepping. The fast solver does the history sums with
// an FFT-based online convolution; the reference does them directly in O(N^2).
ScaleFunctionTable scale_function(double x_max, double step);
ScaleFunctionTable scale_function_reference(double x_max, double step);

// Trapezoid Laplace transform of W on the table plus a tail correction.
double scale_laplace_transform(const ScaleFunctionTable& w, double theta);

double exit_probability(double x, double y, const ScaleFunctionTable& w);
double crossing_probability_q(double a, const ScaleFunctionTable& w);
double undershoot_density_j(double a, double v, const ScaleFunctionTable& w);
double joint_density_IJ(double a, double u, double v, const ScaleFunctionTable& w);
double conditional_undershoot_density_r(double a, double v, const ScaleFunctionTable& w);

// Conditioned undershoot law r_a on (0,a) tabulated for cdf and inverse sampling.
class UndershootLaw {
public:
    UndershootLaw(double a, const ScaleFunctionTable& w);
    double level() const { return a_; }
    double cdf(double v) const;
    double sample(Rng& rng) const;
    double sample_below(double cap, Rng& rng) const;
    double total_mass() const { return mass_; }  // integral before normalizing

private:
    double a_;
    double dv_;
    std::vector<double> cdf_;
    double mass_ = 0.0;
};

double limit_rate_gstar(double a, double v);
double limit_density_h(double a, double v);
double limit_density_hstar(double a0, double a1, double v);
double gstar_mass(double a);                       // (pi-2)/sqrt(a)
double gstar_sample(double a, Rng& rng);           // from g*_a normalized
double stable_overshoot_cdf(double a, double u);

// Finite-n counterparts computed from the scale-function table.
double finite_n_g(double a, double v, double n, const ScaleFunctionTable& w);
double finite_n_h(double a, double v, double n, const ScaleFunctionTable& w);
double finite_n_hstar(double a0, double a1, double v, double n, const ScaleFunctionTable& w);

// Limits of the finite-n counterparts under W(x) ~ (2 sqrt 2/pi) sqrt(x).
double scale_asymptote_constant();
double corrected_limit_g(double a, double v);
double corrected_limit_h(double a, double v);
double corrected_limit_hstar(double a0, double a1, double v);

// Overshoot above na of a random walk with increments of survival Gbar, divided by n.
double random_walk_overshoot(double a, double n, Rng& rng);

// Initial jump law: survival x Lbar(x) + Gbar(x).
double initial_jump_sf(double x);
double initial_jump_sample(Rng& rng);

}  // namespace ctl
