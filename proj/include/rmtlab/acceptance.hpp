#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rmtlab::acceptance {

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

/// Names of the full verification battery, in run order.
std::vector<std::string> criterion_names();

/// Runs one named criterion with its pinned sizes, seeds and tolerances.
CriterionResult run_criterion(const std::string& name, int threads = 0);

/// Runs all criteria; prints one pass/fail line per criterion to stdout when
/// verbose.
std::vector<CriterionResult> run_all(int threads = 0, bool verbose = true);

nlohmann::json to_json(const std::vector<CriterionResult>& results);

} // namespace rmtlab::acceptance
