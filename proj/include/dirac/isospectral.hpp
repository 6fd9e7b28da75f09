#pragma once

// Rank-one potential transforms
//   Omega -> Omega + gamma / theta * (B h h^T - h h^T B),   theta = 1 + gamma * int_0^x |h|^2,
// which shift one norming constant while keeping every eigenvalue, and their
// schedule-driven composition over several indices.

#include <optional>
#include <vector>

#include "dirac/model.hpp"
#include "dirac/ode.hpp"

namespace dirac::isospectral {

struct ThetaFunction {
    Grid grid;
    std::vector<double> values;
    double gamma = 0.0;  ///< theta = 1 + gamma * accumulated |h|^2
    double t = 0.0;
    int m = 0;
};

/// theta = 1 + (e^t - 1) * int_0^x |h_m|^2 for a normalized h_m.
/// PreconditionError if ||h_m|| differs from 1 by more than 1e-8.
ThetaFunction theta(const VectorSolution& h_m, double t, int m = 0);

/// theta = 1 + gamma * h.norm_accum, no normalization requirement.
ThetaFunction theta_from_gamma(const VectorSolution& h, double gamma);

struct RankOneUpdate {
    CanonicalPotential potential;
    std::vector<Mat2> increment;  ///< gamma/theta * (B h h^T - h h^T B) per node
    ThetaFunction theta;
};

/// Applies the rank-one term node-wise. The increment must come out
/// symmetric and trace-free within 1e-10 (StructureError otherwise).
RankOneUpdate rank_one_update(const CanonicalPotential& pot, const VectorSolution& h,
                              const ThetaFunction& theta);

/// w = h / theta with derivative and accumulator; the new system at h.lambda
/// is solved by w.
VectorSolution transformed_eigenfunction(const VectorSolution& h, const ThetaFunction& theta);

/// max over interior nodes of |B w' + Omega w - lambda w| with w' from
/// fourth-order central differences. With `theta` and `min_theta`, only nodes
/// where theta >= min_theta count.
double intertwining_residual(const CanonicalPotential& pot, const VectorSolution& w, double lambda,
                             const ThetaFunction* theta = nullptr, double min_theta = 0.0);

struct Stage {
    int stage = 0;
    int target = 0;
    double t = 0.0;
    bool active() const { return t != 0.0; }
};

/// Stages 0 .. max_stage-1 (or as many as the stored indices need when
/// max_stage < 0), touching indices 0, 1, -1, 2, -2, ...
std::vector<Stage> schedule(const DeformationSchedule& sched);

/// Folds one rank-one stage per active schedule entry, recomputing the target
/// eigenfunction from the already-deformed potential. Requires beta = 0.
CanonicalPotential deform_sequence(const CanonicalPotential& pot, const BoundaryParams& boundary,
                                   const DeformationSchedule& sched, const Grid& grid);

/// Single-index deformation: a_m scales by e^{-t}, everything else unchanged.
CanonicalPotential deform_single(const CanonicalPotential& pot, const BoundaryParams& boundary, int m,
                                 double t, const Grid& grid);

/// deform_single plus the intermediate pieces (theta, h_m, increment).
struct SingleDeformation {
    RankOneUpdate update;
    VectorSolution h;
    double lambda = 0.0;
};
SingleDeformation deform_single_detailed(const CanonicalPotential& pot,
                                         const BoundaryParams& boundary, int m, double t,
                                         const Grid& grid);

}  // namespace dirac::isospectral
