#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Built-in verification suite: eleven numbered checks covering the
// symplectic map core, generator extraction, slice products, Gaussian
// propagation, comb eigenstates, spectra, and output determinism. Each
// check reports pass/fail with a one-line measurement summary.

namespace parres::selftest {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Runs every criterion in order. The seed drives the randomized suites;
// identical seeds give identical results and identical report text.
std::vector<CriterionResult> run_all(std::uint64_t seed);

// One line per criterion: "criterion NN name: PASS/FAIL (detail)".
std::string report(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace parres::selftest
