#pragma once

#include <utility>
#include <vector>

#include "dirac/model.hpp"
#include "dirac/ode.hpp"

namespace dirac::spectrum {

/// Index range to resolve and the scan/refine controls. The scan covers
/// [n_min + shift - 1, n_max + shift + 1] (widened to include zero) where
/// shift = (beta - alpha)/pi is the free-case offset.
struct SearchWindow {
    int n_min = -5;
    int n_max = 5;
    double scan_step = 0.05;
    double refine_tol = 1e-11;
    /// Flag gaps > 2.5 between consecutive roots as missed roots. Off for
    /// window problems whose level spacing is not close to one.
    bool check_spacing = true;

    static double guess_shift(const BoundaryParams& b) { return (b.beta() - b.alpha()) / kPi; }
};

enum class Side { left, right };

/// Eigenfunction assembled from the left and right shooting solutions.
struct EigenPair {
    double lambda = 0.0;
    double a = 0.0;
    double b = 0.0;
    /// phi_n = ratio * psi_n
    double ratio = 0.0;
    /// phi_n glued with ratio * psi_n at the matching node, with derivatives and accumulator.
    VectorSolution phi;
};

/// All sign-change roots of chi in [lo, hi], refined and sorted.
std::vector<double> roots_in_range(const ode::Discretization& disc, const BoundaryParams& boundary,
                                   double lo, double hi, double scan_step, double refine_tol);

/// Bracket-and-refine chi on [lo, hi] where chi(lo), chi(hi) differ in sign.
double refine_root(const ode::Discretization& disc, const BoundaryParams& boundary, double lo,
                   double hi, double refine_tol);

/// Root of chi nearest to `seed`, searched outward up to `max_radius`.
/// Throws TrackingError if none is bracketed.
double track_root(const ode::Discretization& disc, const BoundaryParams& boundary, double seed,
                  double max_radius, double refine_tol);

/// Left/right solutions at an eigenvalue, glued at the node where the
/// eigenfunction peaks. Throws PreconditionError if lambda is not an eigenvalue.
EigenPair eigenpair(const ode::Discretization& disc, const BoundaryParams& boundary, double lambda);

SpectrumTable locate_eigenvalues(const ode::Discretization& disc, const BoundaryParams& boundary,
                                 const SearchWindow& window, const std::string& provenance = {});
SpectrumTable locate_eigenvalues(const CanonicalPotential& pot, const BoundaryParams& boundary,
                                 const SearchWindow& window, const Grid& grid);

/// (a, b): squared norms of phi(., lambda) and psi(., lambda).
std::pair<double, double> norming_constants(const CanonicalPotential& pot,
                                            const BoundaryParams& boundary, double lambda,
                                            const Grid& grid);

/// h = phi/sqrt(a) (left) or psi/sqrt(b) (right).
VectorSolution normalized_eigenfunction(const ode::Discretization& disc,
                                        const BoundaryParams& boundary, const SpectralDatum& datum,
                                        Side side);
VectorSolution normalized_eigenfunction(const CanonicalPotential& pot,
                                        const BoundaryParams& boundary, const SpectralDatum& datum,
                                        Side side, const Grid& grid);

/// Scales a solution (samples, derivatives) by k and its accumulator by k^2.
VectorSolution scaled(const VectorSolution& s, double k);

struct RemainderRow {
    int n = 0;
    double r = 0.0;
    double c = 0.0;
};

struct RemainderReport {
    std::vector<RemainderRow> rows;
    int tail_from = 0;
    double max_tail_r = 0.0;  ///< max |r_n| over |n| >= tail_from
    double sum_c2 = 0.0;      ///< partial sum of c_n^2 over the table
};

RemainderReport asymptotic_remainders(const SpectrumTable& table, int tail_from = 0);

/// max |r_n| over stored indices with lo <= |n| <= hi; 0 if none.
double max_abs_remainder(const SpectrumTable& table, int lo, int hi);

/// pi * mean(n - lambda_n) over |n| >= tail_from; the table must have beta = 0.
double estimate_boundary_alpha(const SpectrumTable& table, int tail_from);

}  // namespace dirac::spectrum
