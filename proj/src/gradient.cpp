#include "dirac/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dirac::gradient {

namespace {

constexpr double kTightTol = 1e-14;
constexpr double kTrackRadius = 0.25;

SpectralDatum solve_index(const ode::Discretization& disc, const BoundaryParams& boundary, int n) {
    spectrum::SearchWindow w;
    w.n_min = w.n_max = n;
    w.refine_tol = kTightTol;
    return spectrum::locate_eigenvalues(disc, boundary, w).at(n);
}

}  // namespace

Mat2 rank_one_term(const Vec2& h) {
    const Mat2 hh{h.y1 * h.y1, h.y1 * h.y2, h.y2 * h.y1, h.y2 * h.y2};
    return CanonicalMatrices::B * hh - hh * CanonicalMatrices::B;
}

std::pair<double, std::optional<double>> grad_boundary(const VectorSolution& h, Mode mode) {
    const double d_alpha = -h.at(0).norm2();
    if (mode == Mode::half_line_window) return {d_alpha, std::nullopt};
    return {d_alpha, h.at(h.y1.size() - 1).norm2()};
}

std::pair<double, std::optional<double>> grad_boundary(const CanonicalPotential& pot,
                                                       const BoundaryParams& boundary,
                                                       const SpectralDatum& datum, const Grid& grid,
                                                       Mode mode) {
    return grad_boundary(
        spectrum::normalized_eigenfunction(pot, boundary, datum, spectrum::Side::left, grid), mode);
}

std::pair<std::vector<double>, std::vector<double>> grad_potential(const VectorSolution& h) {
    std::vector<double> dp(h.y1.size()), dq(h.y1.size());
    for (std::size_t i = 0; i < dp.size(); ++i) {
        dp[i] = h.y1[i] * h.y1[i] - h.y2[i] * h.y2[i];
        dq[i] = 2.0 * h.y1[i] * h.y2[i];
    }
    return {std::move(dp), std::move(dq)};
}

std::pair<std::vector<double>, std::vector<double>> grad_potential(const CanonicalPotential& pot,
                                                                   const BoundaryParams& boundary,
                                                                   const SpectralDatum& datum,
                                                                   const Grid& grid) {
    return grad_potential(
        spectrum::normalized_eigenfunction(pot, boundary, datum, spectrum::Side::left, grid));
}

std::vector<Mat2> grad_matrix(std::span<const double> d_p, std::span<const double> d_q) {
    if (d_p.size() != d_q.size()) throw ShapeError("d_p and d_q have different lengths");
    std::vector<Mat2> out(d_p.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {d_q[i], -d_p[i], -d_p[i], -d_q[i]};
    return out;
}

GradientBundle gradient_bundle(const CanonicalPotential& pot, const BoundaryParams& boundary,
                               const SpectralDatum& datum, const Grid& grid, Mode mode) {
    const VectorSolution h =
        spectrum::normalized_eigenfunction(pot, boundary, datum, spectrum::Side::left, grid);
    auto [d_alpha, d_beta] = grad_boundary(h, mode);
    auto [dp, dq] = grad_potential(h);
    GradientBundle g{d_alpha, d_beta, grid, std::move(dp), std::move(dq), {}};
    g.matrix_field = grad_matrix(g.d_p, g.d_q);
    return g;
}

double pairing(std::span<const double> d, std::span<const double> v, const Grid& grid) {
    if (d.size() != grid.size() || v.size() != grid.size())
        throw ShapeError("pairing operands do not match the grid");
    double s = 0.5 * (d.front() * v.front() + d.back() * v.back());
    for (std::size_t i = 1; i + 1 < d.size(); ++i) s += d[i] * v[i];
    return s * grid.spacing();
}

double tracked_eigenvalue(const CanonicalPotential& pot, const BoundaryParams& boundary,
                          double seed, const Grid& grid) {
    return spectrum::track_root(ode::Discretization(pot, grid), boundary, seed, kTrackRadius,
                                kTightTol);
}

double directional_derivative_fd(const CanonicalPotential& pot, const BoundaryParams& boundary,
                                 int n, const Perturbation& pert, const Grid& grid) {
    if (pert.v.size() != grid.size()) throw ShapeError("perturbation does not match the grid");
    const double lambda = solve_index(ode::Discretization(pot, grid), boundary, n).lambda;
    const std::vector<double> zeros(grid.size(), 0.0);
    auto shifted = [&](double sign) {
        std::vector<double> dv(pert.v);
        for (double& x : dv) x *= sign * pert.eps;
        const auto perturbed = pert.channel == Channel::p ? pot.with_correction(grid, dv, zeros)
                                                          : pot.with_correction(grid, zeros, dv);
        return tracked_eigenvalue(perturbed, boundary, lambda, grid);
    };
    return (shifted(1.0) - shifted(-1.0)) / (2.0 * pert.eps);
}

double boundary_derivative_fd(const CanonicalPotential& pot, const BoundaryParams& boundary, int n,
                              Angle which, double eps, const Grid& grid) {
    const ode::Discretization disc(pot, grid);
    const double lambda = solve_index(disc, boundary, n).lambda;
    auto at = [&](double sign) {
        const BoundaryParams b = which == Angle::alpha
                                     ? BoundaryParams(boundary.alpha() + sign * eps, boundary.beta())
                                     : BoundaryParams(boundary.alpha(), boundary.beta() + sign * eps);
        return spectrum::track_root(disc, b, lambda, kTrackRadius, kTightTol);
    };
    return (at(1.0) - at(-1.0)) / (2.0 * eps);
}

namespace {

struct Evaluation {
    double misfit = 0.0;
    std::vector<double> step_p, step_q;  // unscaled descent direction
};

Evaluation evaluate_fit(const FitProblem& pr, const CanonicalPotential& pot) {
    const ode::Discretization disc(pot, pr.grid);
    spectrum::SearchWindow w;
    w.n_min = pr.target.front().first;
    w.n_max = pr.target.front().first;
    for (const auto& [n, lam] : pr.target) {
        w.n_min = std::min(w.n_min, n);
        w.n_max = std::max(w.n_max, n);
    }
    const SpectrumTable table = spectrum::locate_eigenvalues(disc, pr.boundary, w);
    Evaluation ev;
    ev.step_p.assign(pr.grid.size(), 0.0);
    ev.step_q.assign(pr.grid.size(), 0.0);
    for (const auto& [n, target] : pr.target) {
        const SpectralDatum& d = table.at(n);
        const double residual = d.lambda - target;
        ev.misfit += residual * residual;
        if (residual == 0.0) continue;
        const auto h = spectrum::normalized_eigenfunction(disc, pr.boundary, d, spectrum::Side::left);
        const auto [dp, dq] = grad_potential(h);
        for (std::size_t i = 0; i < dp.size(); ++i) {
            if (pr.channel_mask.p) ev.step_p[i] -= 2.0 * residual * dp[i];
            if (pr.channel_mask.q) ev.step_q[i] -= 2.0 * residual * dq[i];
        }
    }
    return ev;
}

void validate(const FitProblem& pr) {
    if (pr.target.empty()) throw PreconditionError("fit needs at least one target eigenvalue");
    if (!(pr.learn_rate > 0.0)) throw PreconditionError("learn rate must be positive");
    std::set<int> seen;
    for (const auto& [n, lam] : pr.target)
        if (!seen.insert(n).second)
            throw PreconditionError("duplicate target index " + std::to_string(n));
    auto sorted = pr.target;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k)
        if (!(sorted[k].second < sorted[k + 1].second))
            throw PreconditionError("target eigenvalues must increase with index");
}

}  // namespace

FitResult fit_spectrum(const FitProblem& problem) {
    validate(problem);
    FitResult result{problem.init, {}, 0};
    Evaluation current = evaluate_fit(problem, result.potential);
    result.misfit_history.push_back(current.misfit);
    double rate = problem.learn_rate;
    const double rate_floor = problem.learn_rate * std::ldexp(1.0, -40);

    while (result.iterations < problem.max_iters && current.misfit > problem.misfit_tol) {
        std::vector<double> dp(current.step_p), dq(current.step_q);
        for (double& x : dp) x *= rate;
        for (double& x : dq) x *= rate;
        const auto candidate = result.potential.with_correction(problem.grid, dp, dq);
        std::optional<Evaluation> next;
        try {
            next = evaluate_fit(problem, candidate);
        } catch (const EnumerationError&) {
            // step too large to keep the indexing; treated as an increase
        }
        if (next && next->misfit < current.misfit) {
            result.potential = candidate;
            current = std::move(*next);
            result.misfit_history.push_back(current.misfit);
            ++result.iterations;
            continue;
        }
        rate *= 0.5;
        if (rate < rate_floor) {
            std::ostringstream os;
            os << "fit stalled at misfit " << current.misfit << " after " << result.iterations
               << " iterations (learn rate fell below " << rate_floor << ")";
            throw FitDivergence(os.str(), result);
        }
    }
    return result;
}

}  // namespace dirac::gradient
