#pragma once

// Run configuration: a flat `key = value` file with dotted keys.
//
//   mode              = finite-interval | half-line-window
//   boundary.alpha    = 0.0          (radians)
//   boundary.beta     = 0.0
//   potential.kind    = zero | constant | fourier | gauss-bumps | sampled
//   potential.p0, potential.q0                 constant family
//   potential.p_cos, p_sin, q_cos, q_sin       comma lists (cos from k = 0, sin from k = 1)
//   potential.bumps   = p:0.6:1.2:0.4; q:-0.4:2.0:0.3   channel:amplitude:center:width
//   potential.file    = samples.csv              x,p,q table (relative to the config)
//   grid.n_points, grid.x_end
//   solver.scan_step, solver.refine_tol
//   window.theta_floor
//
// In half-line-window mode grid.x_end is the window end X and boundary.beta
// only closes the truncated problem there.
//
// '#' starts a comment.

#include <optional>
#include <string>

#include "dirac/model.hpp"
#include "dirac/spectrum.hpp"

namespace dirac::cli {

enum class RunMode { finite_interval, half_line_window };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::zero;
    double p0 = 0.0;
    double q0 = 0.0;
    FourierSeries series;
    std::vector<Bump> bumps;
    std::string file;  ///< resolved path for the sampled kind
};

struct RunConfig {
    RunMode mode = RunMode::finite_interval;
    BoundaryParams boundary;
    PotentialSpec potential;
    std::optional<std::size_t> n_points;
    std::optional<double> x_end;
    double scan_step = 0.05;
    double refine_tol = 1e-11;
    double theta_floor = 1e-8;

    bool window_mode() const { return mode == RunMode::half_line_window; }
    /// Working grid: [0, pi] with 4001 nodes by default; windows default to
    /// spacing <= pi/4000. A sampled file fixes the grid to its own nodes.
    Grid grid() const;
    CanonicalPotential build_potential() const;
    spectrum::SearchWindow search(int n_min, int n_max) const;
};

/// Throws ConfigError naming the origin and line.
RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Default configuration (free finite-interval problem) when no file is given.
RunConfig default_config();

}  // namespace dirac::cli
