#include "ctl/besq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "ctl/gw.hpp"
#include "ctl/parallel.hpp"
#include "ctl/special.hpp"

namespace ctl {

std::string DiffusionPath::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,value\n";
    for (std::size_t k = 0; k < values.size(); ++k) os << time(k) << ',' << values[k] << '\n';
    return os.str();
}

DiffusionPath simulate_besq(double theta, double x0, double dt, double horizon, Rng& rng) {
    if (!(x0 > 0.0) || !(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("simulate_besq");
    DiffusionPath p;
    p.dt = dt;
    auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    p.values.reserve(steps + 1);
    p.values.push_back(x0);
    const double sq = std::sqrt(dt);
    double z = x0;
    for (std::size_t k = 1; k <= steps; ++k) {
        if (p.absorbed_at) {
            p.values.push_back(0.0);
            continue;
        }
        z += 2.0 * std::sqrt(std::max(z, 0.0)) * sq * rng.normal() + theta * dt;
        if (z <= 0.0) {
            if (theta <= 0.0) {
                p.absorbed_at = p.time(k);
                z = 0.0;
            } else {
                z = std::max(z, 0.0);
            }
        }
        p.values.push_back(z);
    }
    return p;
}

std::vector<double> besq_absorption_ladder(double theta, double x0, double dt, int levels, double horizon,
                                           Rng& rng) {
    if (levels < 1 || !(x0 > 0.0) || !(dt > 0.0) || theta > 0.0)
        throw std::invalid_argument("besq_absorption_ladder");
    const auto L = static_cast<std::size_t>(levels);
    std::vector<double> z(L, x0), db(L, 0.0), t(L, std::numeric_limits<double>::infinity());
    std::vector<double> h(L);
    std::vector<std::uint64_t> every(L);
    for (std::size_t j = 0; j < L; ++j) {
        every[j] = 1ull << (L - 1 - j);
        h[j] = dt * static_cast<double>(every[j]);
    }
    std::size_t alive = L;
    const double sq = std::sqrt(dt);
    for (std::uint64_t k = 1; alive > 0 && dt * static_cast<double>(k) <= horizon + 1e-12; ++k) {
        const double dw = sq * rng.normal();
        for (std::size_t j = 0; j < L; ++j) {
            if (std::isfinite(t[j])) continue;
            db[j] += dw;
            if (k % every[j] != 0) continue;
            z[j] += 2.0 * std::sqrt(std::max(z[j], 0.0)) * db[j] + theta * h[j];
            db[j] = 0.0;
            if (z[j] <= 0.0) {
                t[j] = dt * static_cast<double>(k);
                --alive;
            }
        }
    }
    return t;
}

namespace {

void check_theta(double theta) {
    if (!(theta > -2.0 && theta <= 2.0)) throw std::invalid_argument("hitting time: theta must lie in (-2, 2]");
}

}  // namespace

double hitting_time_sampler(double x, double theta, Rng& rng) {
    check_theta(theta);
    if (!(x > 0.0)) throw std::invalid_argument("hitting_time_sampler: x must be positive");
    return x / (2.0 * rng.gamma(0.5 * theta + 1.0));
}

double hitting_time_cdf(double x, double theta, double t) {
    check_theta(theta);
    if (t <= 0.0) return 0.0;
    return gamma_q(0.5 * theta + 1.0, x / (2.0 * t));
}

Moments besq_minus_one_moments(double x, double t) {
    if (!(x > 0.0) || t < 0.0) throw std::invalid_argument("besq_minus_one_moments");
    // E Z_s = x - int_0^s P(T > u) du and E Z_t^2 = x^2 + 2 int_0^t E Z_s ds
    const int cells = 4000;
    const double h = t / cells;
    auto survive = [&](double u) { return u <= 0.0 ? 1.0 : 1.0 - hitting_time_cdf(x, 1.0, u); };
    double mean = x, integral = 0.0, prev_mean = x;
    for (int i = 1; i <= cells; ++i) {
        double a = h * (i - 1), b = h * i;
        mean -= h / 6.0 * (survive(a) + 4.0 * survive(0.5 * (a + b)) + survive(b));
        integral += 0.5 * h * (prev_mean + mean);
        prev_mean = mean;
    }
    return {mean, x * x + 2.0 * integral};
}

double ConvergenceReport::worst_z() const {
    double w = 0.0;
    for (const auto& r : rows) w = std::max({w, r.mean_z, r.second_z});
    return w;
}

ConvergenceReport gw_besq_convergence_check(double n, double x, const std::vector<double>& times,
                                            std::size_t replicas, std::uint64_t key, double besq_dt) {
    const double start = n * x;
    if (!(n > 0.0) || start < 1.0 || std::abs(start - std::round(start)) > 1e-9)
        throw std::invalid_argument("gw_besq_convergence_check: n x must be a positive integer");
    if (times.empty() || !std::is_sorted(times.begin(), times.end()) || times.front() <= 0.0)
        throw std::invalid_argument("gw_besq_convergence_check: need increasing positive times");
    const auto z0 = static_cast<std::int64_t>(std::llround(start));
    const double horizon = times.back();
    auto gw = replicate(replicas, derive_key(key, "gw"), [&](std::size_t, Rng& rng) {
        std::vector<double> out;
        out.reserve(times.size());
        std::int64_t z = z0;
        double prev = 0.0;
        for (double t : times) {
            GWOutcome o = run_gw(z, n * (t - prev), rng);
            z = o.population;
            prev = t;
            out.push_back(static_cast<double>(z) / n);
        }
        return out;
    });
    auto bq = replicate(replicas, derive_key(key, "besq"), [&](std::size_t, Rng& rng) {
        DiffusionPath p = simulate_besq(-1.0, x, besq_dt, horizon, rng);
        std::vector<double> out;
        for (double t : times) {
            auto k = static_cast<std::size_t>(std::llround(t / besq_dt));
            out.push_back(p.values[std::min(k, p.values.size() - 1)]);
        }
        return out;
    });
    ConvergenceReport rep;
    rep.n = n;
    rep.x = x;
    rep.replicas = replicas;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> a, a2, b, b2;
        for (std::size_t r = 0; r < replicas; ++r) {
            a.push_back(gw[r][i]);
            a2.push_back(gw[r][i] * gw[r][i]);
            b.push_back(bq[r][i]);
            b2.push_back(bq[r][i] * bq[r][i]);
        }
        Summary sa = summarize(a), sa2 = summarize(a2), sb = summarize(b), sb2 = summarize(b2);
        Moments ex = besq_minus_one_moments(x, times[i]);
        MomentRow row;
        row.t = times[i];
        row.gw_mean = sa.mean;
        row.gw_mean_se = sa.se();
        row.gw_second = sa2.mean;
        row.gw_second_se = sa2.se();
        row.besq_mean = sb.mean;
        row.besq_mean_se = sb.se();
        row.besq_second = sb2.mean;
        row.besq_second_se = sb2.se();
        row.exact_mean = ex.mean;
        row.exact_second = ex.second;
        row.mean_z = std::abs(sa.mean - sb.mean) / std::hypot(sa.se(), sb.se());
        row.second_z = std::abs(sa2.mean - sb2.mean) / std::hypot(sa2.se(), sb2.se());
        rep.rows.push_back(row);
    }
    return rep;
}

double SimplexPath::max_sum_error() const {
    double e = 0.0;
    for (const auto& m : mu) e = std::max(e, std::abs(m[0] + m[1] + m[2] - 1.0));
    return e;
}

SimplexPath nwf_time_change(const DiffusionPath& z1, const DiffusionPath& z2, const DiffusionPath& z3) {
    const DiffusionPath* z[3] = {&z1, &z2, &z3};
    const std::size_t len = z1.values.size();
    for (auto* p : z) {
        if (p->values.size() != len || p->dt != z1.dt) throw std::invalid_argument("nwf_time_change: grids differ");
        if (!(p->values.front() > 0.0)) throw std::invalid_argument("nwf_time_change: coordinate dead at 0");
    }
    SimplexPath out;
    std::size_t tau = len - 1;
    for (std::size_t k = 0; k < len && tau == len - 1; ++k)
        for (auto* p : z)
            if (p->values[k] <= 0.0) {
                tau = k;
                break;
            }
    out.tau_index = tau;
    double c = 0.0, prev = 0.0;
    for (std::size_t k = 0; k <= tau; ++k) {
        const double zeta = z1.values[k] + z2.values[k] + z3.values[k];
        if (!(zeta > 0.0)) throw std::runtime_error("nwf_time_change: total mass vanished before absorption");
        const double inv = 1.0 / zeta;
        if (k > 0) c += 0.5 * z1.dt * (prev + inv);
        prev = inv;
        out.clock.push_back(4.0 * c);
        out.mu.push_back({z1.values[k] / zeta, z2.values[k] / zeta, z3.values[k] / zeta});
    }
    return out;
}

TestReport besq_duality_check(double x, double t, double y_max, std::size_t bins, std::size_t samples,
                              double dt, std::uint64_t key, double alpha) {
    if (bins == 0 || !(y_max > 0.0)) throw std::invalid_argument("besq_duality_check");
    // cells: bins on [0, y_max), tail beyond y_max, absorbed before t
    std::vector<double> counts(bins + 2, 0.0);
    auto ends = replicate(samples, key, [&](std::size_t, Rng& rng) {
        DiffusionPath p = simulate_besq(-1.0, x, dt, t, rng);
        return p.absorbed_at ? -1.0 : p.values.back();
    });
    const double width = y_max / static_cast<double>(bins);
    for (double y : ends) {
        if (y < 0.0) counts[bins + 1] += 1.0;
        else if (y >= y_max) counts[bins] += 1.0;
        else counts[static_cast<std::size_t>(y / width)] += 1.0;
    }
    // p5_t(y, x) as a function of y: Z_t / t is noncentral chi-square(5, y / t)
    auto dual = [&](double y) {
        boost::math::non_central_chi_squared d(5.0, y / t);
        return boost::math::pdf(d, x / t) / t;
    };
    std::vector<double> expected(bins + 2, 0.0);
    double inside = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = width * static_cast<double>(b);
        const int sub = 32;
        const double h = width / sub;
        double s = 0.0;
        for (int i = 0; i < sub; ++i) {
            double a = lo + h * i;
            s += h / 6.0 * (dual(a) + 4.0 * dual(a + 0.5 * h) + dual(a + h));
        }
        expected[b] = s;
        inside += s;
    }
    const double dead = hitting_time_cdf(x, 1.0, t);
    expected[bins] = std::max(0.0, 1.0 - dead - inside);
    expected[bins + 1] = dead;
    TestReport rep = chi_square_gof("besq duality histogram", counts, expected, alpha);
    rep.metadata["x"] = x;
    rep.metadata["t"] = t;
    rep.metadata["dt"] = dt;
    rep.metadata["absorbed_fraction"] = counts[bins + 1] / static_cast<double>(samples);
    rep.metadata["absorbed_exact"] = dead;
    return rep;
}

}  // namespace ctl
