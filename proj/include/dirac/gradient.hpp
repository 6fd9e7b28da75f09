#pragma once

// Eigenvalue gradients with respect to the boundary angles and the two
// potential channels, the matrix form B * dlambda/dOmega used by the
// rank-one transforms, a central-difference oracle that re-solves the
// spectrum, and a first-order spectral fitter built on these gradients.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dirac/model.hpp"
#include "dirac/spectrum.hpp"

namespace dirac::gradient {

/// Finite interval with both boundary conditions, or a truncated half-line
/// window where the right boundary only closes the numerical problem.
enum class Mode { finite_interval, half_line_window };

/// B h h^T - h h^T B, built from the matrix products.
Mat2 rank_one_term(const Vec2& h);

/// (-|h(0)|^2, |h(x_end)|^2) from the left-normalized eigenfunction; the
/// second entry is absent in window mode.
std::pair<double, std::optional<double>> grad_boundary(const VectorSolution& h, Mode mode);
std::pair<double, std::optional<double>> grad_boundary(const CanonicalPotential& pot,
                                                       const BoundaryParams& boundary,
                                                       const SpectralDatum& datum, const Grid& grid,
                                                       Mode mode = Mode::finite_interval);

/// d_p = h1^2 - h2^2 and d_q = 2 h1 h2 at every node.
std::pair<std::vector<double>, std::vector<double>> grad_potential(const VectorSolution& h);
std::pair<std::vector<double>, std::vector<double>> grad_potential(const CanonicalPotential& pot,
                                                                   const BoundaryParams& boundary,
                                                                   const SpectralDatum& datum,
                                                                   const Grid& grid);

/// [[d_q, -d_p], [-d_p, -d_q]] node-wise. ShapeError on length mismatch.
std::vector<Mat2> grad_matrix(std::span<const double> d_p, std::span<const double> d_q);

GradientBundle gradient_bundle(const CanonicalPotential& pot, const BoundaryParams& boundary,
                               const SpectralDatum& datum, const Grid& grid,
                               Mode mode = Mode::finite_interval);

/// Trapezoid integral of d * v over the grid.
double pairing(std::span<const double> d, std::span<const double> v, const Grid& grid);

/// Eigenvalue nearest `seed` for the given potential, refined to 1e-14.
double tracked_eigenvalue(const CanonicalPotential& pot, const BoundaryParams& boundary,
                          double seed, const Grid& grid);

/// [lambda_n(g + eps v) - lambda_n(g - eps v)] / (2 eps), each side taken as
/// the root nearest the unperturbed lambda_n.
double directional_derivative_fd(const CanonicalPotential& pot, const BoundaryParams& boundary,
                                 int n, const Perturbation& pert, const Grid& grid);

enum class Angle { alpha, beta };

/// Central difference of lambda_n over one boundary angle.
double boundary_derivative_fd(const CanonicalPotential& pot, const BoundaryParams& boundary, int n,
                              Angle which, double eps, const Grid& grid);

struct ChannelMask {
    bool p = true;
    bool q = true;
};

struct FitProblem {
    std::vector<std::pair<int, double>> target;
    CanonicalPotential init = CanonicalPotential::zero();
    BoundaryParams boundary;
    Grid grid = Grid::default_interval();
    double learn_rate = 1.0;
    int max_iters = 200;
    double misfit_tol = 1e-12;
    ChannelMask channel_mask;
};

struct FitResult {
    CanonicalPotential potential;
    std::vector<double> misfit_history;  ///< entry 0 is the initial misfit
    int iterations = 0;
};

/// Backtracking reached its floor without lowering the misfit.
class FitDivergence : public FitError {
public:
    FitDivergence(const std::string& what, FitResult last_stable)
        : FitError(what), last_(std::move(last_stable)) {}
    const FitResult& last_stable() const { return last_; }

private:
    FitResult last_;
};

/// Gradient descent on sum_k (lambda_{n_k} - target_k)^2. A step that does
/// not lower the misfit is retried with half the rate.
FitResult fit_spectrum(const FitProblem& problem);

}  // namespace dirac::gradient
