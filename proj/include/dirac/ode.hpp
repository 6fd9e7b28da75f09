#pragma once

// Fixed-step integration of  B y' + Omega(x) y = lambda y  written as
// y' = A(x) y with A = -B (lambda - Omega). Each step applies the fourth-order
// Magnus propagator built from the two Gauss-Legendre points of the step,
// exponentiated in closed form (A is trace-free, so exp stays in SL(2)).
// The running integral of |y|^2 uses the Hermite-corrected trapezoid rule,
// which shares the scheme's O(h^4) global error.

#include <cstddef>
#include <vector>

#include "dirac/model.hpp"

namespace dirac::ode {

enum class Direction { left_to_right, right_to_left };

struct IntegratorSettings {
    Direction direction = Direction::left_to_right;
    std::size_t n_steps = 0;
    static constexpr int order = 4;
};

/// Potential samples at every node and at both Gauss points of every step.
/// Independent of lambda, so one instance serves a whole spectral scan.
class Discretization {
public:
    Discretization(const CanonicalPotential& pot, const Grid& grid);

    const Grid& grid() const { return grid_; }
    PQ node(std::size_t i) const { return nodes_[i]; }
    PQ gauss_lo(std::size_t step) const { return lo_[step]; }
    PQ gauss_hi(std::size_t step) const { return hi_[step]; }

private:
    Grid grid_;
    std::vector<PQ> nodes_, lo_, hi_;
};

/// A(x) for the given potential value.
Mat2 system_matrix(PQ v, double lambda);

/// exp(M) for trace-free 2x2 M.
Mat2 expm_traceless(const Mat2& m);

/// Maps y(x_step) to y(x_step + h).
Mat2 step_propagator(const Discretization& disc, std::size_t step, double lambda);

/// phi(., lambda, alpha): y(0) = (sin alpha, -cos alpha).
VectorSolution integrate_left(const Discretization& disc, double alpha, double lambda);
/// psi(., lambda, beta): y(x_end) = (sin beta, -cos beta); norm_accum still runs from 0.
VectorSolution integrate_right(const Discretization& disc, double beta, double lambda);

/// phi(x_end) only, without storing the trajectory.
Vec2 shoot_left_end(const Discretization& disc, double alpha, double lambda);

/// chi(lambda) = phi1(x_end) cos beta + phi2(x_end) sin beta.
double characteristic(const Discretization& disc, double alpha, double beta, double lambda);

VectorSolution integrate_left(const CanonicalPotential& pot, double alpha, double lambda,
                              const Grid& grid);
VectorSolution integrate_right(const CanonicalPotential& pot, double beta, double lambda,
                               const Grid& grid);
double characteristic(const CanonicalPotential& pot, double alpha, double beta, double lambda,
                      const Grid& grid);

/// phi1 psi2 - phi2 psi1 at every node.
std::vector<double> lagrange_bracket(const VectorSolution& phi, const VectorSolution& psi);

/// Cumulative integral of f from x_0, given f and f' at the nodes (Hermite rule).
std::vector<double> hermite_cumulative(const Grid& grid, const std::vector<double>& f,
                                       const std::vector<double>& df);

/// Cumulative trapezoid integral of f from x_0.
std::vector<double> trapezoid_cumulative(const Grid& grid, const std::vector<double>& f);

}  // namespace dirac::ode
