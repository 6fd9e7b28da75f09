#pragma once

// Invariant suites behind `verify --suite`. Each check reports the measured
// value against its bound.

#include <ostream>
#include <string>
#include <vector>

namespace dirac::cli {

struct Check {
    std::string suite;
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string note;
};

/// "all", "ode", "spectrum", "gradient", "isospectral" or "surgery".
/// ConfigError for an unknown suite name.
std::vector<Check> run_suite(const std::string& suite);

/// One `PASS`/`FAIL` line per check; returns true iff all passed.
bool print_checks(std::ostream& os, const std::vector<Check>& checks, bool color);

}  // namespace dirac::cli
