#include "dirac/surgery.hpp"

#include <cmath>
#include <sstream>

namespace dirac::surgery {

namespace {

constexpr double kTightTol = 1e-14;

void check_context(double x_end, double floor) {
    if (!(x_end > 0.0) || !std::isfinite(x_end)) throw DomainError("window end must be positive");
    if (!(floor > 0.0)) throw PreconditionError("theta floor must be positive");
}

}  // namespace

WindowContext::WindowContext(double window_end, double floor, double beta)
    : grid(Grid::with_max_spacing(window_end, kPi / 4000.0)), theta_floor(floor), beta_end(beta) {
    check_context(window_end, floor);
    check_angle(beta, "beta_end");
}

WindowContext::WindowContext(Grid g, double floor, double beta)
    : grid(std::move(g)), theta_floor(floor), beta_end(beta) {
    check_context(grid.x_end(), floor);
    check_angle(beta, "beta_end");
}

CanonicalPotential on_window(const CanonicalPotential& pot, const WindowContext& ctx) {
    const double x_end = ctx.window_end();
    if (std::abs(pot.domain_end() - x_end) <= 1e-12 * x_end) return pot;
    if (pot.domain_end() > x_end) return pot.restricted(x_end);
    std::ostringstream os;
    os << "potential is defined up to " << pot.domain_end() << " but the window ends at " << x_end;
    throw DomainError(os.str());
}

VectorSolution window_solution(const CanonicalPotential& pot, double alpha, double nu, double c,
                               const WindowContext& ctx) {
    if (!(c > 0.0)) throw PreconditionError("normalization constant c must be positive");
    check_angle(alpha, "alpha");
    const VectorSolution phi = ode::integrate_left(on_window(pot, ctx), alpha, nu, ctx.grid);
    return c == 1.0 ? phi : spectrum::scaled(phi, c);
}

WindowLevel window_level(const CanonicalPotential& pot, double alpha, double nu,
                         const WindowContext& ctx, double search_radius) {
    const ode::Discretization disc(on_window(pot, ctx), ctx.grid);
    const BoundaryParams b = ctx.boundary(alpha);
    const double lambda = spectrum::track_root(disc, b, nu, search_radius, kTightTol);
    spectrum::EigenPair ep = spectrum::eigenpair(disc, b, lambda);
    WindowLevel lvl{lambda, ep.a, spectrum::scaled(ep.phi, 1.0 / std::sqrt(ep.a))};
    return lvl;
}

std::vector<std::pair<double, double>> window_spectrum(const CanonicalPotential& pot, double alpha,
                                                       const WindowContext& ctx, double lo,
                                                       double hi) {
    const ode::Discretization disc(on_window(pot, ctx), ctx.grid);
    const BoundaryParams b = ctx.boundary(alpha);
    std::vector<std::pair<double, double>> out;
    for (double lam : spectrum::roots_in_range(disc, b, lo, hi, 0.05, kTightTol))
        out.emplace_back(lam, spectrum::eigenpair(disc, b, lam).a);
    return out;
}

SurgeryResult apply_rank_one(const CanonicalPotential& pot, const VectorSolution& h, double nu,
                             double gamma, const WindowContext& ctx) {
    if (!(h.grid == ctx.grid)) throw ShapeError("solution does not live on the window grid");
    isospectral::ThetaFunction th = isospectral::theta_from_gamma(h, gamma);
    for (std::size_t i = 0; i < th.values.size(); ++i) {
        if (!(th.values[i] >= ctx.theta_floor)) {
            std::ostringstream os;
            os.precision(10);
            os << "theta = " << th.values[i] << " falls below the floor " << ctx.theta_floor
               << " at x = " << h.grid.x(i);
            throw SingularityError(os.str(), h.grid.x(i));
        }
    }
    auto up = isospectral::rank_one_update(on_window(pot, ctx), h, th);
    VectorSolution w = isospectral::transformed_eigenfunction(h, th);
    return {std::move(up.potential), h, std::move(th), std::move(w), nu, gamma};
}

SurgeryResult add_eigenvalue(const CanonicalPotential& pot, double alpha, double mu, double c,
                             const WindowContext& ctx) {
    return apply_rank_one(pot, window_solution(pot, alpha, mu, c, ctx), mu, 1.0, ctx);
}

SurgeryResult remove_eigenvalue(const CanonicalPotential& pot, double alpha, double lambda0,
                                const VectorSolution& h, const WindowContext& ctx) {
    check_angle(alpha, "alpha");
    return apply_rank_one(pot, h, lambda0, -1.0, ctx);
}

SurgeryResult scale_norming(const CanonicalPotential& pot, double alpha, double lambda0, double t,
                            const VectorSolution& h, const WindowContext& ctx) {
    check_angle(alpha, "alpha");
    SurgeryResult r = apply_rank_one(pot, h, lambda0, std::expm1(-t), ctx);
    r.theta.t = t;
    return r;
}

double expected_norm(const SurgeryResult& r) {
    if (r.gamma == 0.0) return r.h.total_norm();
    return (1.0 / r.theta.values.front() - 1.0 / r.theta.values.back()) / r.gamma;
}

std::size_t certified_prefix(const isospectral::ThetaFunction& theta, double min_theta) {
    std::size_t i = 0;
    while (i + 1 < theta.values.size() && theta.values[i + 1] >= min_theta) ++i;
    return i;
}

WindowContext sub_window(const WindowContext& ctx, std::size_t last) {
    if (last < 4 || last >= ctx.grid.size()) throw RangeError("sub-window needs 5 nodes inside the window");
    return WindowContext(Grid(ctx.grid.x(last), last + 1), ctx.theta_floor, ctx.beta_end);
}

VectorSolution truncated(const VectorSolution& s, std::size_t last) {
    if (last < 4 || last >= s.grid.size()) throw RangeError("truncation index outside the grid");
    VectorSolution out(Grid(s.grid.x(last), last + 1), s.lambda);
    const auto cut = [last](const std::vector<double>& v) {
        return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    };
    out.y1 = cut(s.y1);
    out.y2 = cut(s.y2);
    out.dy1 = cut(s.dy1);
    out.dy2 = cut(s.dy2);
    out.norm_accum = cut(s.norm_accum);
    return out;
}

ComposeResult compose_surgery(const CanonicalPotential& pot, double alpha, const SurgeryPlan& plan,
                              const WindowContext& ctx) {
    if (std::abs(plan.window_end - ctx.window_end()) > 1e-12 * ctx.window_end())
        throw PreconditionError("plan window does not match the window context");
    ComposeResult out{on_window(pot, ctx), {}, {}};
    for (std::size_t k = 0; k < plan.steps.size(); ++k) {
        const SurgeryStep& st = plan.steps[k];
        auto label = [&] {
            std::ostringstream os;
            os << "surgery step " << k + 1 << " (" << to_string(st.op) << " at nu = " << st.nu << ")";
            return os.str();
        };
        try {
            SurgeryResult r = [&] {
                if (st.op == SurgeryOp::add)
                    return add_eigenvalue(out.potential, alpha, st.nu, st.c, ctx);
                const WindowLevel lvl = window_level(out.potential, alpha, st.nu, ctx);
                if (st.op == SurgeryOp::remove) {
                    if (!(st.c > 0.0)) throw PreconditionError("c must be positive");
                    return remove_eigenvalue(out.potential, alpha, lvl.lambda,
                                             spectrum::scaled(lvl.h, st.c), ctx);
                }
                return scale_norming(out.potential, alpha, lvl.lambda, st.t, lvl.h, ctx);
            }();
            out.potential = r.potential;
            out.intermediates.push_back(r.potential);
            out.steps.push_back(std::move(r));
        } catch (const SingularityError& e) {
            throw SingularityError(label() + ": " + e.what(), e.where());
        } catch (const Error& e) {
            throw StepError(label() + ": " + e.what(), k + 1);
        }
    }
    return out;
}

}  // namespace dirac::surgery
