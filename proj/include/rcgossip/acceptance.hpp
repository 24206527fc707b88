#pragma once

#include <string>
#include <vector>

namespace rcgossip {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // deterministic: no timings
    double seconds = 0.0;
};

/// Runs the acceptance criteria in order. Each result carries its own
/// runtime budget check where one applies.
std::vector<CriterionResult> run_acceptance();

/// "[PASS] 1 name (detail) 0.42s" per criterion.
std::string format_results(const std::vector<CriterionResult>& results);

/// criterion,name,passed,detail with no timing column, so two runs with
/// the same seeds produce identical bytes.
std::string results_csv(const std::vector<CriterionResult>& results);

}  // namespace rcgossip
