#include "dirac/isospectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirac/gradient.hpp"
#include "dirac/spectrum.hpp"

namespace dirac::isospectral {

namespace {

void require_beta_zero(const BoundaryParams& boundary) {
    if (boundary.beta() != 0.0) {
        std::ostringstream os;
        os << "isospectral deformations are defined for the problem with beta = 0 (got beta = "
           << boundary.beta() << ")";
        throw PreconditionError(os.str());
    }
}

}  // namespace

ThetaFunction theta_from_gamma(const VectorSolution& h, double gamma) {
    const double t = gamma > -1.0 ? std::log1p(gamma) : 0.0;
    ThetaFunction th{h.grid, std::vector<double>(h.norm_accum.size()), gamma, t, 0};
    for (std::size_t i = 0; i < th.values.size(); ++i) th.values[i] = 1.0 + gamma * h.norm_accum[i];
    return th;
}

ThetaFunction theta(const VectorSolution& h_m, double t, int m) {
    if (std::abs(h_m.total_norm() - 1.0) > 1e-8) {
        std::ostringstream os;
        os.precision(17);
        os << "theta needs a normalized eigenfunction (||h||^2 = " << h_m.total_norm() << ")";
        throw PreconditionError(os.str());
    }
    ThetaFunction th = theta_from_gamma(h_m, std::expm1(t));
    th.t = t;
    th.m = m;
    return th;
}

RankOneUpdate rank_one_update(const CanonicalPotential& pot, const VectorSolution& h,
                              const ThetaFunction& theta) {
    if (!(h.grid == theta.grid)) throw ShapeError("eigenfunction and theta live on different grids");
    const std::size_t n = h.y1.size();
    std::vector<Mat2> inc(n);
    std::vector<double> dp(n), dq(n);
    for (std::size_t i = 0; i < n; ++i) {
        inc[i] = (theta.gamma / theta.values[i]) * gradient::rank_one_term(h.at(i));
        const Mat2& m = inc[i];
        const double scale = std::max(1.0, std::abs(m.a11) + std::abs(m.a12));
        if (std::abs(m.a12 - m.a21) > 1e-10 * scale || std::abs(m.trace()) > 1e-10 * scale) {
            std::ostringstream os;
            os << "rank-one increment at x = " << h.grid.x(i) << " is not canonical";
            throw StructureError(os.str());
        }
        dp[i] = m.a11;
        dq[i] = m.a12;
    }
    return {pot.with_correction(h.grid, dp, dq), std::move(inc), theta};
}

VectorSolution transformed_eigenfunction(const VectorSolution& h, const ThetaFunction& theta) {
    if (!(h.grid == theta.grid)) throw ShapeError("eigenfunction and theta live on different grids");
    VectorSolution w(h.grid, h.lambda);
    const std::size_t n = h.y1.size();
    std::vector<double> f(n), df(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = theta.values[i];
        const double dth = theta.gamma * h.at(i).norm2();
        w.y1[i] = h.y1[i] / th;
        w.y2[i] = h.y2[i] / th;
        w.dy1[i] = h.dy1[i] / th - h.y1[i] * dth / (th * th);
        w.dy2[i] = h.dy2[i] / th - h.y2[i] * dth / (th * th);
        f[i] = w.at(i).norm2();
        df[i] = 2.0 * (w.y1[i] * w.dy1[i] + w.y2[i] * w.dy2[i]);
    }
    w.norm_accum = ode::hermite_cumulative(h.grid, f, df);
    return w;
}

double intertwining_residual(const CanonicalPotential& pot, const VectorSolution& w, double lambda,
                             const ThetaFunction* theta, double min_theta) {
    const std::size_t n = w.y1.size();
    if (n < 5) throw ShapeError("residual needs at least 5 nodes");
    if (theta && !(theta->grid == w.grid)) throw ShapeError("theta lives on a different grid");
    const double inv12h = 1.0 / (12.0 * w.grid.spacing());
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        if (theta && theta->values[i] < min_theta) continue;
        const double d1 = (-w.y1[i + 2] + 8.0 * w.y1[i + 1] - 8.0 * w.y1[i - 1] + w.y1[i - 2]) * inv12h;
        const double d2 = (-w.y2[i + 2] + 8.0 * w.y2[i + 1] - 8.0 * w.y2[i - 1] + w.y2[i - 2]) * inv12h;
        const PQ v = pot.evaluate(w.grid.x(i));
        const double r1 = d2 + v.p * w.y1[i] + v.q * w.y2[i] - lambda * w.y1[i];
        const double r2 = -d1 + v.q * w.y1[i] - v.p * w.y2[i] - lambda * w.y2[i];
        worst = std::max(worst, std::hypot(r1, r2));
    }
    return worst;
}

std::vector<Stage> schedule(const DeformationSchedule& sched) {
    const int stages =
        sched.max_stage >= 0 ? sched.max_stage : DeformationSchedule::stages_needed(sched.t);
    std::vector<Stage> out;
    out.reserve(static_cast<std::size_t>(stages));
    for (int m = 0; m < stages; ++m) {
        const int target = DeformationSchedule::stage_target(m);
        out.push_back({m, target, sched.t_at(target)});
    }
    return out;
}

namespace {

struct StageResult {
    RankOneUpdate update;
    VectorSolution h;
    double lambda;
};

StageResult apply_stage(const CanonicalPotential& current, const BoundaryParams& boundary,
                        const Stage& st, double seed, const Grid& grid) {
    const ode::Discretization disc(current, grid);
    const double lambda = spectrum::track_root(disc, boundary, seed, 0.25, 1e-14);
    SpectralDatum d;
    d.n = st.target;
    d.lambda = lambda;
    VectorSolution h = spectrum::normalized_eigenfunction(disc, boundary, d, spectrum::Side::left);
    ThetaFunction th = theta(h, st.t, st.target);
    RankOneUpdate up = rank_one_update(current, h, th);
    return {std::move(up), std::move(h), lambda};
}

SpectrumTable original_levels(const CanonicalPotential& pot, const BoundaryParams& boundary,
                              const std::vector<Stage>& active, const Grid& grid) {
    spectrum::SearchWindow w;
    w.n_min = w.n_max = active.front().target;
    for (const auto& st : active) {
        w.n_min = std::min(w.n_min, st.target);
        w.n_max = std::max(w.n_max, st.target);
    }
    w.refine_tol = 1e-14;
    return spectrum::locate_eigenvalues(pot, boundary, w, grid);
}

}  // namespace

CanonicalPotential deform_sequence(const CanonicalPotential& pot, const BoundaryParams& boundary,
                                   const DeformationSchedule& sched, const Grid& grid) {
    require_beta_zero(boundary);
    std::vector<Stage> active;
    for (const auto& st : schedule(sched))
        if (st.active()) active.push_back(st);
    if (active.empty()) return pot;

    const SpectrumTable levels = original_levels(pot, boundary, active, grid);
    CanonicalPotential current = pot;
    for (const auto& st : active) {
        try {
            current = apply_stage(current, boundary, st, levels.at(st.target).lambda, grid).update.potential;
        } catch (const Error& e) {
            std::ostringstream os;
            os << "deformation stage " << st.stage << " (index " << st.target << ") failed: " << e.what();
            throw RootError(os.str());
        }
    }
    return current;
}

CanonicalPotential deform_single(const CanonicalPotential& pot, const BoundaryParams& boundary, int m,
                                 double t, const Grid& grid) {
    DeformationSchedule sched;
    sched.t[m] = t;
    return deform_sequence(pot, boundary, sched, grid);
}

SingleDeformation deform_single_detailed(const CanonicalPotential& pot,
                                         const BoundaryParams& boundary, int m, double t,
                                         const Grid& grid) {
    require_beta_zero(boundary);
    const Stage st{0, m, t};
    const SpectrumTable levels = original_levels(pot, boundary, {st}, grid);
    StageResult r = apply_stage(pot, boundary, st, levels.at(m).lambda, grid);
    return {std::move(r.update), std::move(r.h), r.lambda};
}

}  // namespace dirac::isospectral
