#include "ctl/gw.hpp"

#include <cmath>
#include <stdexcept>

#include "ctl/parallel.hpp"
#include "ctl/special.hpp"

namespace ctl {

GWPath simulate_gw(std::int64_t start, std::optional<double> horizon, Rng& rng) {
    if (start < 0) throw std::invalid_argument("simulate_gw: negative start");
    GWPath path;
    path.event_times.push_back(0.0);
    path.populations.push_back(start);
    if (start == 0) {
        path.extinction_time = 0.0;
        return path;
    }
    const double limit = horizon.value_or(std::numeric_limits<double>::infinity());
    double t = 0.0;
    std::int64_t x = start;
    while (x > 0) {
        const double rate = 4.0 * static_cast<double>(x) + 1.0;
        t += rng.exponential() / rate;
        if (t > limit) break;
        if (rng.uniform() * rate < 2.0 * static_cast<double>(x))
            ++x;
        else
            --x;
        path.event_times.push_back(t);
        path.populations.push_back(x);
    }
    if (x == 0) path.extinction_time = t;
    return path;
}

GWOutcome run_gw(std::int64_t start, double horizon, Rng& rng) {
    GWOutcome out;
    if (start <= 0) {
        out.extinction_time = 0.0;
        return out;
    }
    double t = 0.0;
    std::int64_t x = start;
    for (;;) {
        const double up = 2.0 * static_cast<double>(x);
        const double rate = 2.0 * up + 1.0;
        t += rng.exponential() / rate;
        if (t > horizon) break;
        if (rng.uniform() * rate < up) {
            ++x;
        } else if (--x == 0) {
            out.extinction_time = t;
            break;
        }
    }
    out.population = x;
    return out;
}

double survival_sf(double u) {
    if (u < 0.0) throw std::domain_error("survival_sf: negative argument");
    return std::pow(1.0 + 2.0 * u, -1.5);
}

double survival_cdf(double u) { return u <= 0.0 ? 0.0 : 1.0 - survival_sf(u); }

double extinction_density_2sigma(double s) {
    if (s < 0.0) throw std::domain_error("extinction_density_2sigma: negative argument");
    return 1.5 * std::pow(1.0 + s, -2.5);
}

double laplace_psi(double theta) {
    if (theta < 0.0) throw std::domain_error("laplace_psi: negative theta");
    if (theta == 0.0) return 1.0;
    return 1.0 - theta +
           std::pow(theta, 1.5) / std::sqrt(2.0) * upper_gamma_scaled(0.5, 0.5 * theta);
}

namespace {

double fraction_at_depth(double theta, int depth) {
    double f = 0.0;
    for (int r = depth - 1; r >= 0; --r)
        f = (r + 1.5) / ((2.0 * r + 2.5 + 0.5 * theta) - (r + 1.0) * f);
    return f;
}

}  // namespace

FractionValue laplace_psi_continued_fraction(double theta, int depth) {
    if (!(theta > 0.0) || depth < 1) throw std::domain_error("continued fraction: bad arguments");
    FractionValue out;
    out.value = fraction_at_depth(theta, depth);
    if (depth >= 200) {
        double prev = fraction_at_depth(theta, depth - 1);
        out.converged = std::fabs(out.value - prev) <= 1e-10;
    }
    return out;
}

double conditional_mean(double t) { return 1.0 + 2.0 * t; }

double scale_martingale_value(std::int64_t z) {
    if (z <= 0) return 0.0;
    const double zz = static_cast<double>(z);
    return std::exp(std::lgamma(zz + 1.5) - std::lgamma(zz) - std::lgamma(2.5));
}

double laguerre_martingale_value(double x, std::int64_t z, double t) {
    if (z <= 0) return 0.0;
    return std::exp(2.0 * x * t) * laguerre(static_cast<int>(z - 1), 1.5, x);
}

YaglomBatch yaglom_samples(double n, double t, std::size_t count, std::uint64_t key) {
    if (!(n >= 1.0) || !(t > 0.0)) throw std::domain_error("yaglom_samples: need n >= 1, t > 0");
    if (n * t > 500.0) throw std::domain_error("yaglom_samples: n*t > 500, rejection infeasible");
    const double horizon = n * t;
    const double p = survival_sf(horizon);
    // about 32 acceptances per batch
    const auto batch = static_cast<std::uint64_t>(std::ceil(32.0 / p));
    const std::size_t round = 64;
    YaglomBatch out;
    std::uint64_t next_batch = 0;
    while (out.samples.size() < count) {
        auto got = replicate(round, derive_key(key, next_batch), [&](std::size_t, Rng& rng) {
            std::vector<double> acc;
            for (std::uint64_t i = 0; i < batch; ++i) {
                GWOutcome o = run_gw(1, horizon, rng);
                if (o.population > 0) acc.push_back(static_cast<double>(o.population) / (2.0 * horizon));
            }
            return acc;
        });
        for (auto& g : got) {
            out.attempts += batch;
            out.samples.insert(out.samples.end(), g.begin(), g.end());
            if (out.samples.size() >= count) break;
        }
        ++next_batch;
    }
    out.samples.resize(count);
    return out;
}

}  // namespace ctl
