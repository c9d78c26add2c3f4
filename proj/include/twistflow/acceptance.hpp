#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// End-to-end verification suite: each criterion runs at its stated scale and
// tolerance and reports one pass/fail line.

namespace twistflow::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs all criteria (or the subset whose ids are listed), streaming one line
// per criterion to `out`. Returns the results.
std::vector<CriterionResult> run_all(std::ostream& out, const std::vector<int>& only = {});

}  // namespace twistflow::acceptance
