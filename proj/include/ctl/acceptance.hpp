#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctl/stats.hpp"

namespace ctl {

struct AcceptanceConfig {
    std::uint64_t seed = 1;
    double effort = 1.0;  // multiplies sample counts; thresholds stay fixed
    double alpha = 0.01;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<TestReport> checks;
    bool pass() const;
};

constexpr int criterion_count = 17;

CriterionResult run_criterion(int id, const AcceptanceConfig& cfg);

// Single line: "[PASS] 7 ladder laws: name stat<=thr; ..."
std::string summary_line(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);

}  // namespace ctl
