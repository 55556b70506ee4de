#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gdnls/experiments.hpp"

namespace gdnls::verify {

struct CriterionResult {
    std::string id;
    std::string label;
    bool pass = false;
    std::string detail;   // the measured numbers, human-readable
    double seconds = 0.0;
};

struct Options {
    int threads = 1;
    std::uint64_t seed = 20240801ull;
    bool include_long = true;          // criteria 2/3/11 (minutes of runtime)
    std::vector<std::string> only;     // when nonempty, run just these ids
};

/// Runs every acceptance criterion and returns one result per criterion.
/// Criteria never throw for numerical failures; they report pass = false.
std::vector<CriterionResult> run_all(const Options& opt);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace gdnls::verify
