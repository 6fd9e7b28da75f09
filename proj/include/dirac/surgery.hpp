#pragma once

// Spectral surgery on a truncated half-line window [0, X]: add a level,
// remove one, rescale a norming constant, or chain such steps. All integrals
// run over the window; claims about the half-line object hold for the
// truncated problem only.

#include <vector>

#include "dirac/isospectral.hpp"
#include "dirac/model.hpp"
#include "dirac/spectrum.hpp"

namespace dirac::surgery {

struct WindowContext {
    Grid grid;
    double theta_floor = 1e-8;
    /// Boundary angle closing the truncated problem at X (eigen-solves only).
    double beta_end = 0.0;

    /// Grid on [0, X] with spacing <= pi/4000.
    explicit WindowContext(double window_end, double floor = 1e-8, double beta = 0.0);
    WindowContext(Grid g, double floor, double beta);

    double window_end() const { return grid.x_end(); }
    BoundaryParams boundary(double alpha) const { return {alpha, beta_end}; }
};

/// The potential seen on [0, X]; DomainError if it does not reach X.
CanonicalPotential on_window(const CanonicalPotential& pot, const WindowContext& ctx);

/// c * phi(., nu, alpha) with accumulator scaled by c^2.
VectorSolution window_solution(const CanonicalPotential& pot, double alpha, double nu, double c,
                               const WindowContext& ctx);

/// Eigenpair of the truncated problem nearest `nu`, normalized over the window.
struct WindowLevel {
    double lambda = 0.0;
    double a = 0.0;  ///< window norming constant ||phi||^2 on [0, X]
    VectorSolution h;
};
WindowLevel window_level(const CanonicalPotential& pot, double alpha, double nu,
                         const WindowContext& ctx, double search_radius = 2.0);

/// Truncated-problem eigenvalues in [lo, hi] with their window norming constants.
std::vector<std::pair<double, double>> window_spectrum(const CanonicalPotential& pot, double alpha,
                                                       const WindowContext& ctx, double lo,
                                                       double hi);

struct SurgeryResult {
    CanonicalPotential potential;
    VectorSolution h;  ///< the solution driving the transform
    isospectral::ThetaFunction theta;
    VectorSolution w;  ///< h / theta, solves the new system at nu
    double nu = 0.0;
    double gamma = 0.0;
};

/// gamma / theta rank-one step with theta = 1 + gamma * acc(h). Throws
/// SingularityError at the first node where theta < ctx.theta_floor.
SurgeryResult apply_rank_one(const CanonicalPotential& pot, const VectorSolution& h, double nu,
                             double gamma, const WindowContext& ctx);

SurgeryResult add_eigenvalue(const CanonicalPotential& pot, double alpha, double mu, double c,
                             const WindowContext& ctx);

/// h: normalized eigenfunction at lambda0 with its window accumulator.
SurgeryResult remove_eigenvalue(const CanonicalPotential& pot, double alpha, double lambda0,
                                const VectorSolution& h, const WindowContext& ctx);

/// gamma = e^{-t} - 1; the level's norming constant is multiplied by e^{t}.
SurgeryResult scale_norming(const CanonicalPotential& pot, double alpha, double lambda0, double t,
                            const VectorSolution& h, const WindowContext& ctx);

/// (1/gamma) (1/theta(0) - 1/theta(X)): exact value of ||h/theta||^2 on the
/// window (||h||^2 itself when gamma = 0).
double expected_norm(const SurgeryResult& r);

/// Last node index where theta >= min_theta holds on the whole prefix.
std::size_t certified_prefix(const isospectral::ThetaFunction& theta, double min_theta);

/// Context on the prefix [0, x(last)] of ctx.grid (same spacing), and a
/// solution cut to that prefix. Used to work on a certified sub-window.
WindowContext sub_window(const WindowContext& ctx, std::size_t last);
VectorSolution truncated(const VectorSolution& s, std::size_t last);

/// A failing step inside compose_surgery.
class StepError : public Error {
public:
    StepError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

struct ComposeResult {
    CanonicalPotential potential;
    std::vector<CanonicalPotential> intermediates;  ///< Omega_1 .. Omega_k
    std::vector<SurgeryResult> steps;
};

/// Applies the plan in order against the running potential. Remove and scale
/// steps act on the truncated level nearest nu; a remove step uses c times the
/// window-normalized eigenfunction (c = 1 puts theta(X) at zero). Singularities
/// are rethrown as SingularityError naming the step; other failures as StepError.
ComposeResult compose_surgery(const CanonicalPotential& pot, double alpha, const SurgeryPlan& plan,
                              const WindowContext& ctx);

}  // namespace dirac::surgery
