#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kpsh {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;          // the measured numbers and tolerances
    double seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> csv_outputs; // name, content
};

struct SuiteResult {
    std::uint64_t seed = 0;
    std::vector<CriterionResult> criteria;
    bool all_passed() const;
    std::string to_json() const;
};

/// Runs the full verification battery (11 criteria) with the given seed.
/// Deterministic: identical seeds produce byte-identical CSV payloads.
SuiteResult run_suite(std::uint64_t seed);

} // namespace kpsh
