#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tfem {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;  // error measure, check-specific
    double threshold = 0.0;
    std::string detail;
};

// Built-in verification suite: patch test, uniaxial bar, cantilever
// convergence against the Timoshenko tip deflection, rigid-body
// nullspace and ramp linearity. Prints one line per check to `log`
// when given.
std::vector<CheckResult> run_verification_suite(std::ostream* log = nullptr);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace tfem
