#pragma once

// Subcommand bodies. Each returns the exit status; library errors propagate
// to the caller, which reports them and exits nonzero.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "dirac/cli/config.hpp"

namespace dirac::cli {

struct Options {
    std::string config;  ///< empty: free finite-interval problem
    std::string out;
    int n_min = -5;
    int n_max = 5;
    int n = 0;
    int m = 0;
    double t = 0.0;
    double mu = 0.0;
    double c = 1.0;
    std::optional<double> window;
    bool check_fd = false;
    double eps = 1e-3;
    std::uint64_t seed = 1;
    bool verify = false;
    std::string schedule;
    std::string plan;
    std::string target;
    std::string history;
    int iters = 200;
    double lr = 1.0;
    std::string suite = "all";
};

RunConfig resolve_config(const Options& opt);

int cmd_solve(const Options& opt, std::ostream& log);
int cmd_gradient(const Options& opt, std::ostream& log);
int cmd_deform(const Options& opt, std::ostream& log);
int cmd_deform_seq(const Options& opt, std::ostream& log);
/// sub: add, remove, scale or plan.
int cmd_surgery(const Options& opt, const std::string& sub, std::ostream& log);
int cmd_fit(const Options& opt, std::ostream& log);
int cmd_verify(const Options& opt, std::ostream& log, bool color);

}  // namespace dirac::cli
