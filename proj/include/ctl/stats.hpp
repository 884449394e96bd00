#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace ctl {

// pass <=> statistic <= threshold
struct TestReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    std::size_t n_samples = 0;
    bool pass = false;
    nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json to_json(const TestReport& r);
std::string to_json_line(const TestReport& r);
std::string to_csv_line(const TestReport& r);
std::string csv_header();

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se() const;
};

Summary summarize(std::span<const double> xs);
double correlation(std::span<const double> xs, std::span<const double> ys);

double ks_critical_value(double alpha);

// sup |F_emp - F|
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);
double ks_two_sample_distance(std::span<const double> a, std::span<const double> b);

TestReport ks_statistic(std::string name, std::span<const double> samples,
                        const std::function<double(double)>& cdf, double alpha = 0.01);
// Fixed threshold instead of c(alpha)/sqrt(N).
TestReport ks_bound(std::string name, std::span<const double> samples,
                    const std::function<double(double)>& cdf, double bound);
TestReport two_sample_ks(std::string name, std::span<const double> a, std::span<const double> b,
                         double alpha = 0.01);

// Expected given as probabilities (normalized internally) or counts; cells with
// expected < 5 are merged with their neighbours.
TestReport chi_square_gof(std::string name, std::span<const double> counts,
                          std::span<const double> expected, double alpha = 0.01);

TestReport poisson_dispersion(std::string name, std::span<const double> counts, double alpha = 0.01);

// |estimate - target| / se <= k
TestReport z_check(std::string name, double estimate, double target, double se, double k = 3.0,
                   std::size_t n = 0);
TestReport bound_check(std::string name, double value, double bound, std::size_t n = 0);
TestReport interval_check(std::string name, double value, double lo, double hi);
TestReport flag_check(std::string name, bool ok, double value = 0.0);

}  // namespace ctl
