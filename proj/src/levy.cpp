#include "ctl/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ctl/special.hpp"

namespace ctl {

double jump_sample(Rng& rng) { return 0.5 * (std::pow(rng.uniform_pos(), -2.0 / 3.0) - 1.0); }

double jump_sf(double u) { return u <= 0.0 ? 1.0 : std::pow(1.0 + 2.0 * u, -1.5); }

double jump_cdf(double u) { return 1.0 - jump_sf(u); }

double jump_sample_above(double lo, Rng& rng) {
    if (lo <= 0.0) return jump_sample(rng);
    // P(zeta > x | zeta > lo) = ((1+2x)/(1+2lo))^{-3/2}
    double base = 1.0 + 2.0 * lo;
    return 0.5 * (base * std::pow(rng.uniform_pos(), -2.0 / 3.0) - 1.0);
}

double laplace_exponent(double theta) {
    if (theta < 0.0) throw std::domain_error("laplace_exponent: negative theta");
    if (theta == 0.0) return 0.0;
    return std::pow(theta, 1.5) / std::sqrt(2.0) * upper_gamma_scaled(0.5, 0.5 * theta);
}

double ladder_height_sf(double u) { return u <= 0.0 ? 1.0 : 1.0 / std::sqrt(1.0 + 2.0 * u); }

double ladder_height_sample(Rng& rng) {
    double u = rng.uniform_pos();
    return 0.5 * (1.0 / (u * u) - 1.0);
}

double CompoundPoissonPath::value(double t) const {
    double x = start - t;
    for (std::size_t k = 0; k < jump_times.size() && jump_times[k] <= t; ++k) x += jump_sizes[k];
    return x;
}

double CompoundPoissonPath::value_before(std::size_t k) const {
    double x = start - jump_times.at(k);
    for (std::size_t i = 0; i < k; ++i) x += jump_sizes[i];
    return x;
}

CompoundPoissonPath simulate_levy(double start, const StopRule& rule, Rng& rng,
                                  std::uint64_t max_jumps) {
    CompoundPoissonPath p;
    p.start = start;
    double t = 0.0, x = start;
    double horizon = std::numeric_limits<double>::infinity();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool passage = false;
    if (auto* h = std::get_if<Horizon>(&rule)) {
        horizon = h->t;
    } else if (auto* f = std::get_if<FirstPassageAbove>(&rule)) {
        hi = f->level;
        passage = true;
        if (start > hi) {
            p.stop_reason = StopReason::passed_above;
            return p;
        }
    } else {
        const auto& e = std::get<ExitInterval>(rule);
        if (!(e.lo < e.hi) || start < e.lo || start > e.hi)
            throw std::invalid_argument("simulate_levy: start outside interval");
        lo = e.lo;
        hi = e.hi;
    }
    for (std::uint64_t k = 0;; ++k) {
        if (k >= max_jumps) {
            p.end_time = t;
            p.stop_reason = StopReason::budget;
            return p;
        }
        double e = rng.exponential();
        if (x - e <= lo) {
            p.end_time = t + (x - lo);
            p.stop_reason = StopReason::exited_below;
            return p;
        }
        if (t + e > horizon) {
            p.end_time = horizon;
            p.stop_reason = StopReason::horizon;
            return p;
        }
        t += e;
        x -= e;
        double z = jump_sample(rng);
        p.jump_times.push_back(t);
        p.jump_sizes.push_back(z);
        x += z;
        if (x > hi) {
            p.end_time = t;
            p.stop_reason = passage ? StopReason::passed_above : StopReason::exited_above;
            return p;
        }
    }
}

CrossingRecord first_passage_record(double start, double level, Rng& rng, std::uint64_t max_jumps) {
    if (start > level) throw std::invalid_argument("first_passage_record: start above level");
    CrossingRecord r;
    r.level = level;
    double t = 0.0, x = start;
    for (std::uint64_t k = 0; k < max_jumps; ++k) {
        double e = rng.exponential();
        t += e;
        x -= e;
        double z = jump_sample(rng);
        if (x + z > level) {
            r.tau = t;
            r.undershoot = level - x;
            r.overshoot = x + z - level;
            r.jumps = k + 1;
            r.complete = true;
            return r;
        }
        x += z;
    }
    r.tau = t;
    r.jumps = max_jumps;
    return r;
}

ExitRecord exit_interval_record(double start, double lo, double hi, Rng& rng) {
    if (!(lo < hi) || start < lo || start > hi) throw std::invalid_argument("exit_interval_record");
    ExitRecord r;
    double t = 0.0, x = start;
    for (;;) {
        double e = rng.exponential();
        if (x - e <= lo) {
            r.tau = t + (x - lo);
            return r;
        }
        t += e;
        x -= e;
        double z = jump_sample(rng);
        if (x + z > hi) {
            r.above = true;
            r.tau = t;
            r.undershoot = hi - x;
            r.overshoot = x + z - hi;
            return r;
        }
        x += z;
    }
}

ScaleFunctionTable::ScaleFunctionTable(double step, std::vector<double> values)
    : step_(step), values_(std::move(values)) {
    if (!(step_ > 0.0) || values_.empty()) throw std::invalid_argument("ScaleFunctionTable");
}

double ScaleFunctionTable::operator()(double x) const {
    if (x < 0.0) throw std::domain_error("scale function: negative argument");
    double pos = x / step_;
    auto i = static_cast<std::size_t>(pos);
    if (i >= values_.size() - 1) {
        if (i == values_.size() - 1 && pos - static_cast<double>(i) < 1e-9) return values_.back();
        throw std::out_of_range("scale function: argument beyond table");
    }
    double f = pos - static_cast<double>(i);
    return values_[i] + f * (values_[i + 1] - values_[i]);
}

double scale_laplace_transform(const ScaleFunctionTable& w, double theta) {
    auto v = w.values();
    const double h = w.step();
    double s = 0.5 * v.front();
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += std::exp(-theta * h * static_cast<double>(i)) * v[i];
    double xm = w.x_max();
    s += 0.5 * std::exp(-theta * xm) * v.back();
    s *= h;
    // tail beyond x_max with W held at its last value
    s += std::exp(-theta * xm) * v.back() / theta;
    return s;
}

double exit_probability(double x, double y, const ScaleFunctionTable& w) {
    if (!(x > 0.0) || y < 0.0) throw std::domain_error("exit_probability");
    return w(x) / w(x + y);
}

double crossing_probability_q(double a, const ScaleFunctionTable& w) {
    if (a < 0.0) throw std::domain_error("crossing_probability_q");
    return 1.0 - 1.0 / w(a);
}

double undershoot_density_j(double a, double v, const ScaleFunctionTable& w) {
    if (!(v > 0.0) || a < 0.0) throw std::domain_error("undershoot_density_j");
    double occ = w(a) - w(a - std::min(a, v)) + (v >= a ? 1.0 : 0.0);
    return occ * jump_sf(v);
}

double joint_density_IJ(double a, double u, double v, const ScaleFunctionTable& w) {
    if (!(u > 0.0) || !(v > 0.0) || a < 0.0) throw std::domain_error("joint_density_IJ");
    double occ = w(a) - w(a - std::min(a, v)) + (v >= a ? 1.0 : 0.0);
    return 3.0 * std::pow(1.0 + 2.0 * (u + v), -2.5) * occ;
}

double conditional_undershoot_density_r(double a, double v, const ScaleFunctionTable& w) {
    if (!(v > 0.0 && v < a)) throw std::domain_error("conditional_undershoot_density_r: v outside (0,a)");
    double wa = w(a);
    double q = 1.0 - 1.0 / wa;
    return w(a - v) / wa * jump_sf(v) / q;
}

UndershootLaw::UndershootLaw(double a, const ScaleFunctionTable& w) : a_(a) {
    if (!(a > 0.0) || a > w.x_max()) throw std::domain_error("UndershootLaw: level outside table");
    auto cells = static_cast<std::size_t>(std::ceil(a / std::min(w.step(), a / 4000.0)));
    dv_ = a / static_cast<double>(cells);
    const double wa = w(a);
    const double q = 1.0 - 1.0 / wa;
    auto dens = [&](double v) { return w(std::max(0.0, a - v)) / wa * jump_sf(v) / q; };
    cdf_.assign(cells + 1, 0.0);
    double prev = dens(0.0);
    for (std::size_t i = 1; i <= cells; ++i) {
        double cur = dens(dv_ * static_cast<double>(i));
        cdf_[i] = cdf_[i - 1] + 0.5 * dv_ * (prev + cur);
        prev = cur;
    }
    mass_ = cdf_.back();
    for (double& c : cdf_) c /= mass_;
}

double UndershootLaw::cdf(double v) const {
    if (v <= 0.0) return 0.0;
    if (v >= a_) return 1.0;
    double pos = v / dv_;
    auto i = static_cast<std::size_t>(pos);
    double f = pos - static_cast<double>(i);
    return cdf_[i] + f * (cdf_[i + 1] - cdf_[i]);
}

double UndershootLaw::sample(Rng& rng) const { return sample_below(a_, rng); }

double UndershootLaw::sample_below(double cap, Rng& rng) const {
    double u = rng.uniform() * cdf(std::min(cap, a_));
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    if (i == 0) return 0.0;
    if (i >= cdf_.size()) return a_;
    double lo = cdf_[i - 1], hi = cdf_[i];
    double f = hi > lo ? (u - lo) / (hi - lo) : 0.0;
    return dv_ * (static_cast<double>(i - 1) + f);
}

double limit_rate_gstar(double a, double v) {
    if (!(v > 0.0 && v <= a)) throw std::domain_error("limit_rate_gstar: v outside (0,a]");
    return (1.0 - std::sqrt((a - v) / a)) * std::pow(v, -1.5);
}

double limit_density_h(double a, double v) {
    if (!(v > 0.0) || a < 0.0) throw std::domain_error("limit_density_h");
    return 3.0 / (4.0 * std::numbers::pi) * std::pow(v, -1.5) *
           (std::sqrt(a) - std::sqrt(a - std::min(a, v)));
}

double limit_density_hstar(double a0, double a1, double v) {
    if (!(0.0 < a0 && a0 < a1)) throw std::domain_error("limit_density_hstar: need 0 < a0 < a1");
    double rho = std::sqrt((a1 - a0) / a1);
    return (1.0 - rho) * (limit_density_h(a1 - a0, v) - rho * limit_density_h(a1, v));
}

double gstar_mass(double a) { return (std::numbers::pi - 2.0) / std::sqrt(a); }

double gstar_sample(double a, Rng& rng) {
    for (;;) {
        double u = rng.uniform_pos();
        double s = u * u;
        if (rng.uniform() * (1.0 + std::sqrt(1.0 - s)) < 1.0) return a * s;
    }
}

double stable_overshoot_cdf(double a, double u) {
    if (!(a > 0.0)) throw std::domain_error("stable_overshoot_cdf");
    if (u <= 0.0) return 0.0;
    return 2.0 / std::numbers::pi * std::atan(std::sqrt(u / a));
}

double finite_n_g(double a, double v, double n, const ScaleFunctionTable& w) {
    return std::sqrt(2.0 * n * n * n) * conditional_undershoot_density_r(n * a, n * v, w);
}

double finite_n_h(double a, double v, double n, const ScaleFunctionTable& w) {
    return n * undershoot_density_j(n * a, n * v, w);
}

double finite_n_hstar(double a0, double a1, double v, double n, const ScaleFunctionTable& w) {
    if (!(0.0 < a0 && a0 < a1)) throw std::domain_error("finite_n_hstar: need 0 < a0 < a1");
    double rho = w(n * (a1 - a0)) / w(n * a1);
    return (finite_n_h(a1 - a0, v, n, w) - rho * finite_n_h(a1, v, n, w)) / (1.0 - rho);
}

double scale_asymptote_constant() { return 2.0 * std::numbers::sqrt2 / std::numbers::pi; }

double corrected_limit_g(double a, double v) {
    if (!(v > 0.0 && v < a)) throw std::domain_error("corrected_limit_g");
    return 0.5 * std::sqrt((a - v) / a) * std::pow(v, -1.5);
}

double corrected_limit_h(double a, double v) {
    return 1.0 / std::numbers::pi * std::pow(v, -1.5) * (std::sqrt(a) - std::sqrt(a - std::min(a, v)));
}

double corrected_limit_hstar(double a0, double a1, double v) {
    double rho = std::sqrt((a1 - a0) / a1);
    return (corrected_limit_h(a1 - a0, v) - rho * corrected_limit_h(a1, v)) / (1.0 - rho);
}

double random_walk_overshoot(double a, double n, Rng& rng) {
    const double level = a * n;
    double s = 0.0;
    while (s <= level) s += ladder_height_sample(rng);
    return (s - level) / n;
}

double initial_jump_sf(double x) {
    if (x <= 0.0) return 1.0;
    return x * jump_sf(x) + ladder_height_sf(x);
}

double initial_jump_sample(Rng& rng) {
    // With t = (1+2x)^{-1/2} the survival is 1.5 t - 0.5 t^3; invert the cubic.
    double u = rng.uniform_pos();
    double t = 2.0 * std::cos(std::acos(-u) / 3.0 - 2.0 * std::numbers::pi / 3.0);
    for (int i = 0; i < 2; ++i) {
        double f = t * t * t - 3.0 * t + 2.0 * u;
        double df = 3.0 * t * t - 3.0;
        if (df != 0.0) t -= f / df;
    }
    t = std::clamp(t, 1e-300, 1.0);
    return 0.5 * (1.0 / (t * t) - 1.0);
}

}  // namespace ctl
