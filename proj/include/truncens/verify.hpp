#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace truncens {

struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
};

// Runs every registered oracle check against the closed forms: quadrature,
// finite differences, algebraic identities and Monte Carlo moments.
// Deterministic for a fixed seed.
std::vector<CheckResult> run_verification(std::uint64_t seed = 20240901);

// One line per check: name, PASS/FAIL, observed vs expected.
void print_report(std::ostream& out, const std::vector<CheckResult>& results);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace truncens
