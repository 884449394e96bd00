#include "ctl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ctl/special.hpp"

namespace ctl {

nlohmann::json to_json(const TestReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["statistic"] = r.statistic;
    j["threshold"] = r.threshold;
    j["n_samples"] = r.n_samples;
    j["pass"] = r.pass;
    j["metadata"] = r.metadata;
    return j;
}

std::string to_json_line(const TestReport& r) { return to_json(r).dump(); }

std::string csv_header() { return "name,statistic,threshold,n_samples,pass"; }

std::string to_csv_line(const TestReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.name << ',' << r.statistic << ',' << r.threshold << ',' << r.n_samples << ','
       << (r.pass ? 1 : 0);
    return os.str();
}

double Summary::se() const { return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0; }

Summary summarize(std::span<const double> xs) {
    Summary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    // Welford
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double x : xs) {
        ++k;
        double d = x - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (x - mean);
    }
    s.mean = mean;
    s.variance = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
    return s;
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("correlation: size");
    Summary a = summarize(xs), b = summarize(ys);
    double c = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) c += (xs[i] - a.mean) * (ys[i] - b.mean);
    c /= static_cast<double>(xs.size() - 1);
    double den = std::sqrt(a.variance * b.variance);
    return den > 0.0 ? c / den : 0.0;
}

double ks_critical_value(double alpha) {
    struct Row {
        double alpha, c;
    };
    static constexpr Row table[] = {{0.2, 1.0727}, {0.1, 1.2238},  {0.05, 1.3581}, {0.025, 1.4802},
                                    {0.01, 1.6276}, {0.005, 1.7308}, {0.001, 1.9495}};
    for (const Row& r : table)
        if (std::fabs(r.alpha - alpha) < 1e-12) return r.c;
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("ks alpha");
    return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

namespace {

std::vector<double> sorted_checked(std::span<const double> xs) {
    std::vector<double> v(xs.begin(), xs.end());
    for (double x : v)
        if (std::isnan(x)) throw std::invalid_argument("NaN sample");
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
    auto v = sorted_checked(samples);
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double f = cdf(v[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_two_sample_distance(std::span<const double> a, std::span<const double> b) {
    auto x = sorted_checked(a);
    auto y = sorted_checked(b);
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

TestReport ks_statistic(std::string name, std::span<const double> samples,
                        const std::function<double(double)>& cdf, double alpha) {
    if (samples.size() < 30) throw std::invalid_argument("ks_statistic: need >= 30 samples");
    TestReport r;
    r.name = std::move(name);
    r.statistic = ks_distance(samples, cdf);
    r.n_samples = samples.size();
    r.threshold = ks_critical_value(alpha) / std::sqrt(static_cast<double>(samples.size()));
    r.pass = r.statistic <= r.threshold;
    r.metadata["alpha"] = alpha;
    return r;
}

TestReport ks_bound(std::string name, std::span<const double> samples,
                    const std::function<double(double)>& cdf, double bound) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = ks_distance(samples, cdf);
    r.n_samples = samples.size();
    r.threshold = bound;
    r.pass = r.statistic <= r.threshold;
    return r;
}

TestReport two_sample_ks(std::string name, std::span<const double> a, std::span<const double> b,
                         double alpha) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
    TestReport r;
    r.name = std::move(name);
    r.statistic = ks_two_sample_distance(a, b);
    const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
    r.threshold = ks_critical_value(alpha) * std::sqrt((n + m) / (n * m));
    r.n_samples = a.size() + b.size();
    r.pass = r.statistic <= r.threshold;
    r.metadata["alpha"] = alpha;
    r.metadata["n_a"] = a.size();
    r.metadata["n_b"] = b.size();
    return r;
}

TestReport chi_square_gof(std::string name, std::span<const double> counts,
                          std::span<const double> expected, double alpha) {
    if (counts.size() != expected.size() || counts.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    double total = 0.0, etotal = 0.0;
    for (double c : counts) total += c;
    for (double e : expected) etotal += e;
    if (!(etotal > 0.0)) throw std::invalid_argument("chi_square_gof: zero expectation");

    std::vector<double> oc, ec;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        o_acc += counts[i];
        e_acc += expected[i] * total / etotal;
        if (e_acc >= 5.0) {
            oc.push_back(o_acc);
            ec.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (ec.empty()) {
            oc.push_back(o_acc);
            ec.push_back(e_acc);
        } else {
            oc.back() += o_acc;
            ec.back() += e_acc;
        }
    }
    if (oc.size() < 2) throw std::invalid_argument("chi_square_gof: insufficient counts after merging");

    double stat = 0.0;
    for (std::size_t i = 0; i < oc.size(); ++i) stat += (oc[i] - ec[i]) * (oc[i] - ec[i]) / ec[i];
    TestReport r;
    r.name = std::move(name);
    r.statistic = stat;
    r.threshold = chi_square_quantile(1.0 - alpha, static_cast<double>(oc.size() - 1));
    r.n_samples = static_cast<std::size_t>(total);
    r.pass = r.statistic <= r.threshold;
    r.metadata["alpha"] = alpha;
    r.metadata["cells"] = oc.size();
    return r;
}

TestReport poisson_dispersion(std::string name, std::span<const double> counts, double alpha) {
    if (counts.size() < 2) throw std::invalid_argument("poisson_dispersion: need >= 2 counts");
    Summary s = summarize(counts);
    TestReport r;
    r.name = std::move(name);
    r.n_samples = counts.size();
    const double dof = static_cast<double>(counts.size() - 1);
    if (s.mean <= 0.0) {
        r.statistic = 0.0;
        r.threshold = normal_quantile(1.0 - alpha / 2.0);
        r.pass = true;
        return r;
    }
    double index = s.variance * dof / s.mean;  // ~ chi2(dof)
    r.statistic = std::fabs(index - dof) / std::sqrt(2.0 * dof);
    r.threshold = normal_quantile(1.0 - alpha / 2.0);
    r.pass = r.statistic <= r.threshold;
    r.metadata["alpha"] = alpha;
    r.metadata["variance_over_mean"] = s.variance / s.mean;
    r.metadata["mean"] = s.mean;
    return r;
}

TestReport z_check(std::string name, double estimate, double target, double se, double k,
                   std::size_t n) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = se > 0.0 ? std::fabs(estimate - target) / se
                           : (estimate == target ? 0.0 : std::numeric_limits<double>::infinity());
    r.threshold = k;
    r.n_samples = n;
    r.pass = r.statistic <= r.threshold;
    r.metadata["estimate"] = estimate;
    r.metadata["target"] = target;
    r.metadata["se"] = se;
    return r;
}

TestReport bound_check(std::string name, double value, double bound, std::size_t n) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = value;
    r.threshold = bound;
    r.n_samples = n;
    r.pass = value <= bound;
    return r;
}

TestReport interval_check(std::string name, double value, double lo, double hi) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = std::max({lo - value, value - hi, 0.0});
    r.threshold = 0.0;
    r.pass = value >= lo && value <= hi;
    r.metadata["value"] = value;
    r.metadata["lo"] = lo;
    r.metadata["hi"] = hi;
    return r;
}

TestReport flag_check(std::string name, bool ok, double value) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = ok ? 0.0 : 1.0;
    r.threshold = 0.0;
    r.pass = ok;
    r.metadata["value"] = value;
    return r;
}

}  // namespace ctl
