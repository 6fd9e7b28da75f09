#include "dirac/cli/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "dirac/cli/lcg.hpp"
#include "dirac/gradient.hpp"
#include "dirac/isospectral.hpp"
#include "dirac/spectrum.hpp"
#include "dirac/surgery.hpp"

namespace dirac::cli {

namespace {

class Recorder {
public:
    Recorder(std::string suite, std::vector<Check>& out) : suite_(std::move(suite)), out_(out) {}

    /// value <= bound
    void le(const std::string& name, double value, double bound, std::string note = {}) {
        out_.push_back({suite_, name, value, bound, value <= bound, std::move(note)});
    }
    /// value >= bound
    void ge(const std::string& name, double value, double bound, std::string note = {}) {
        out_.push_back({suite_, name, value, bound, value >= bound, std::move(note)});
    }
    /// Runs `body`; an escaping library error becomes a failed check.
    void guard(const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            out_.push_back({suite_, name, NAN, 0.0, false, e.what()});
        }
    }

private:
    std::string suite_;
    std::vector<Check>& out_;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

CanonicalPotential bump_model(double end = kPi) {
    return CanonicalPotential::gauss_bumps(
        {{Channel::p, 0.6, 1.2, 0.4}, {Channel::q, -0.4, 2.0, 0.3}}, end);
}

SpectrumTable solve(const CanonicalPotential& pot, const BoundaryParams& b, int lo, int hi,
                    const Grid& grid, double tol = 1e-14) {
    spectrum::SearchWindow w;
    w.n_min = lo;
    w.n_max = hi;
    w.refine_tol = tol;
    return spectrum::locate_eigenvalues(pot, b, w, grid);
}

// -- ode --------------------------------------------------------------------

void ode_suite(std::vector<Check>& out) {
    Recorder r("ode", out);
    const Grid g = Grid::default_interval();
    r.guard("free closed form", [&] {
        const double lam = 2.7, alpha = 0.4;
        const auto phi = ode::integrate_left(CanonicalPotential::zero(), alpha, lam, g);
        double err = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.x(i);
            err = std::max({err, std::abs(phi.y1[i] - std::sin(lam * x + alpha)),
                            std::abs(phi.y2[i] + std::cos(lam * x + alpha))});
            acc = std::max(acc, std::abs(phi.norm_accum[i] - x));
        }
        r.le("free closed form", err, 1e-12);
        r.le("free accumulator equals x", acc, 1e-12);
    });
    r.guard("constant closed form", [&] {
        const double p = 0.5, q = 0.2, lam = 1.3;
        const auto phi = ode::integrate_left(CanonicalPotential::constant(p, q), 0.0, lam, g);
        const double w = std::sqrt(lam * lam - p * p - q * q);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.x(i), c = std::cos(w * x), s = std::sin(w * x) / w;
            // y(0) = (0, -1); exp(Ax) = cos(wx) I + sin(wx)/w A
            const double y1 = -s * -(lam + p), y2 = -(c + s * -q);
            err = std::max({err, std::abs(phi.y1[i] - y1), std::abs(phi.y2[i] - y2)});
        }
        r.le("constant-coefficient closed form", err, 1e-11);
    });
    r.guard("lagrange bracket", [&] {
        const auto pot = bump_model();
        const auto phi = ode::integrate_left(pot, 0.3, 1.7, g);
        const auto psi = ode::integrate_right(pot, -0.2, 1.7, g);
        const auto br = ode::lagrange_bracket(phi, psi);
        double dev = 0.0;
        for (double v : br) dev = std::max(dev, std::abs(v - br.front()));
        r.le("Lagrange bracket constant along x", dev, 1e-10);
    });
    r.guard("order", [&] {
        const auto pot = bump_model();
        const Vec2 ref = ode::shoot_left_end(ode::Discretization(pot, Grid(kPi, 12801)), 0.0, 4.0);
        auto err = [&](std::size_t n) {
            const Vec2 y = ode::shoot_left_end(ode::Discretization(pot, Grid(kPi, n)), 0.0, 4.0);
            return std::hypot(y.y1 - ref.y1, y.y2 - ref.y2);
        };
        r.ge("halving h cuts the error (ratio, bump potential)", err(101) / err(201), 8.0);
    });
}

// -- spectrum ---------------------------------------------------------------

void spectrum_suite(std::vector<Check>& out) {
    Recorder r("spectrum", out);
    const Grid g = Grid::default_interval();
    r.guard("free spectrum", [&] {
        const auto t0 = Clock::now();
        spectrum::SearchWindow w;
        w.n_min = -20;
        w.n_max = 20;
        const auto tab = spectrum::locate_eigenvalues(CanonicalPotential::zero(), {0.0, 0.0}, w, g);
        const double dt = seconds_since(t0);
        double el = 0.0, ea = 0.0, eb = 0.0;
        for (const auto& [n, d] : tab.data()) {
            el = std::max(el, std::abs(d.lambda - n));
            ea = std::max(ea, std::abs(d.a - kPi));
            eb = std::max(eb, std::abs(d.b - kPi));
        }
        r.le("free |lambda_n - n|, |n| <= 20", el, 1e-9);
        r.le("free |a_n - pi|", ea, 1e-8);
        r.le("free |b_n - pi|", eb, 1e-7);
        r.le("free spectrum runtime [s]", dt, 5.0);
    });
    for (double c : {0.3, 0.5}) {
        r.guard("constant", [&] {
            const auto tab = solve(CanonicalPotential::constant(c, 0.0), {0.0, 0.0}, -1, 1, g, 1e-11);
            const double s = std::sqrt(1.0 + c * c);
            char name[64];
            std::snprintf(name, sizeof name, "constant p=%.1f: lambda_0, lambda_+-1", c);
            r.le(name,
                 std::max({std::abs(tab.at(0).lambda + c), std::abs(tab.at(1).lambda - s),
                           std::abs(tab.at(-1).lambda + s)}),
                 1e-8);
        });
    }
    r.guard("alpha estimator", [&] {
        const auto free = solve(CanonicalPotential::zero(), {kPi / 4, 0.0}, -12, 12, g, 1e-11);
        r.le("free alpha=pi/4 recovered from |n| >= 5",
             std::abs(spectrum::estimate_boundary_alpha(free, 5) - kPi / 4), 1e-8);
        const auto bump = solve(bump_model(), {0.3, 0.0}, -30, 30, g, 1e-11);
        r.le("bump alpha=0.3 recovered from |n| >= 10",
             std::abs(spectrum::estimate_boundary_alpha(bump, 10) - 0.3), 5e-3);
    });
}

// -- gradient ---------------------------------------------------------------

void gradient_suite(std::vector<Check>& out) {
    Recorder r("gradient", out);
    const Grid g = Grid::default_interval();
    const BoundaryParams b0{0.0, 0.0};
    r.guard("free boundary gradients", [&] {
        const auto tab = solve(CanonicalPotential::zero(), b0, -2, 2, g);
        double err = 0.0;
        for (const auto& [n, d] : tab.data()) {
            const auto [da, db] = gradient::grad_boundary(CanonicalPotential::zero(), b0, d, g);
            err = std::max({err, std::abs(da + 1.0 / kPi), std::abs(*db - 1.0 / kPi)});
        }
        r.le("free (dl/dalpha, dl/dbeta) = (-1/pi, 1/pi)", err, 1e-8);
    });
    const auto bump = bump_model();
    r.guard("boundary FD", [&] {
        const auto tab = solve(bump, b0, -2, 2, g);
        double err = 0.0;
        for (int n = -2; n <= 2; ++n) {
            const auto [da, db] = gradient::grad_boundary(bump, b0, tab.at(n), g);
            err = std::max(err, std::abs(gradient::boundary_derivative_fd(bump, b0, n, gradient::Angle::alpha, 1e-4, g) - da));
            err = std::max(err, std::abs(gradient::boundary_derivative_fd(bump, b0, n, gradient::Angle::beta, 1e-4, g) - *db));
        }
        r.le("bump boundary gradients vs FD(1e-4), n in [-2,2]", err, 1e-5);
    });
    r.guard("potential FD", [&] {
        const auto tab = solve(bump, b0, -3, 3, g);
        Lcg rng(1);
        std::vector<std::vector<double>> dirs;
        for (int k = 0; k < 3; ++k) dirs.push_back(trig_direction(g, rng));
        double err = 0.0;
        bool canonical = true;
        for (int n = -3; n <= 3; ++n) {
            const auto bundle = gradient::gradient_bundle(bump, b0, tab.at(n), g);
            for (const auto& m : bundle.matrix_field)
                canonical = canonical && m.a12 == m.a21 && m.trace() == 0.0;
            for (const Channel ch : {Channel::p, Channel::q})
                for (const auto& v : dirs) {
                    const double an = gradient::pairing(ch == Channel::p ? bundle.d_p : bundle.d_q, v, g);
                    const double fd = gradient::directional_derivative_fd(bump, b0, n, Perturbation(v, 1e-3, ch), g);
                    err = std::max(err, std::abs(fd - an) / std::max(1.0, std::abs(an)));
                }
        }
        r.le("potential gradient vs FD(1e-3), 3 directions x 2 channels, n in [-3,3]", err, 1e-4);
        r.le("gradient matrix field symmetric trace-free", canonical ? 0.0 : 1.0, 0.0);
    });
    r.guard("constant direction", [&] {
        const auto pot = CanonicalPotential::constant(0.3, 0.0);
        const auto tab = solve(pot, b0, 0, 0, g);
        const auto [dp, dq] = gradient::grad_potential(pot, b0, tab.at(0), g);
        const std::vector<double> one(g.size(), 1.0);
        r.le("constant model: d lambda_0 / d p0 = -1", std::abs(gradient::pairing(dp, one, g) + 1.0), 1e-6);
    });
    r.guard("fit", [&] {
        gradient::FitProblem fp;
        fp.boundary = b0;
        const auto target = solve(CanonicalPotential::constant(0.3, 0.0), b0, -3, 3, g, 1e-11);
        for (const auto& [n, d] : target.data()) fp.target.emplace_back(n, d.lambda);
        const auto res = gradient::fit_spectrum(fp);
        r.ge("fit p=0.3 from zero: misfit reduction (orders)",
             std::log10(res.misfit_history.front() / std::max(res.misfit_history.back(), 1e-300)), 4.0);
    });
}

// -- isospectral ------------------------------------------------------------

double max_ratio_error(const SpectrumTable& before, const SpectrumTable& after,
                       const std::function<double(int)>& expected, double* drift) {
    double err = 0.0;
    *drift = 0.0;
    for (const auto& [n, d] : before.data()) {
        *drift = std::max(*drift, std::abs(after.at(n).lambda - d.lambda));
        err = std::max(err, std::abs(after.at(n).a / d.a - expected(n)));
    }
    return err;
}

void isospectral_suite(std::vector<Check>& out) {
    Recorder r("isospectral", out);
    const Grid g = Grid::default_interval();
    const BoundaryParams b0{0.0, 0.0};
    for (double t : {std::log(2.0), -1.0}) {
        r.guard("closed form", [&] {
            const auto d = isospectral::deform_single_detailed(CanonicalPotential::zero(), b0, 0, t, g);
            const double gam = std::expm1(t);
            double eq = 0.0, ep = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double x = g.x(i);
                const PQ v = d.update.potential.evaluate(x);
                eq = std::max(eq, std::abs(v.q - gam / (kPi + gam * x)));
                ep = std::max(ep, std::abs(v.p));
            }
            char name[80];
            std::snprintf(name, sizeof name, "zero potential, t=%.4f: q = g/(pi+g x)", t);
            r.le(name, eq, 1e-10);
            r.le(std::string(name) + ", p == 0", ep, 0.0);
            const auto w = isospectral::transformed_eigenfunction(d.h, d.update.theta);
            r.le(std::string(name) + ", residual of h/theta",
                 isospectral::intertwining_residual(d.update.potential, w, d.lambda), 1e-6);
        });
    }
    const auto bump = bump_model();
    r.guard("single", [&] {
        const auto t0 = Clock::now();
        const auto before = solve(bump, b0, -8, 8, g);
        const auto d = isospectral::deform_single_detailed(bump, b0, 0, 1.0, g);
        const auto after = solve(d.update.potential, b0, -8, 8, g);
        const double dt = seconds_since(t0);
        double drift = 0.0;
        const double e0 = std::abs(after.at(0).a / before.at(0).a - std::exp(-1.0));
        const double eo = max_ratio_error(before, after, [&](int n) {
            return n == 0 ? after.at(0).a / before.at(0).a : 1.0;
        }, &drift);
        r.le("bump m=0 t=1: eigenvalue drift, |n| <= 8", drift, 1e-7);
        r.le("bump m=0 t=1: a_0 ratio vs e^-1", e0, 1e-6);
        r.le("bump m=0 t=1: other a_n ratios vs 1", eo, 1e-6);
        r.le("bump m=0 t=1: runtime [s]", dt, 60.0);
        const auto w = isospectral::transformed_eigenfunction(d.h, d.update.theta);
        r.le("bump m=0 t=1: residual of h/theta",
             isospectral::intertwining_residual(d.update.potential, w, d.lambda), 1e-6);
        const auto& th = d.update.theta.values;
        const double expect = (1.0 / th.front() - 1.0 / th.back()) / d.update.theta.gamma;
        r.le("bump m=0 t=1: ||h/theta||^2 identity", std::abs(w.total_norm() - expect), 1e-6);
    });
    r.guard("sequence", [&] {
        DeformationSchedule sched;
        sched.t = {{0, 0.4}, {1, -0.3}, {-1, 0.6}};
        const auto before = solve(bump, b0, -8, 8, g);
        const auto after = solve(isospectral::deform_sequence(bump, b0, sched, g), b0, -8, 8, g);
        double drift = 0.0;
        const double err = max_ratio_error(before, after, [&](int n) { return std::exp(-sched.t_at(n)); }, &drift);
        r.le("schedule {0:0.4, 1:-0.3, -1:0.6}: a_n ratios vs e^-t_n", err, 1e-5);
        r.le("schedule {0:0.4, 1:-0.3, -1:0.6}: eigenvalue drift", drift, 1e-6);
    });
}

// -- surgery ----------------------------------------------------------------

/// p(x) = x, q = 0 sampled on the window grid.
CanonicalPotential confining(const surgery::WindowContext& ctx) {
    const auto xs = ctx.grid.nodes();
    return CanonicalPotential::sampled(SampledField(ctx.grid, xs, std::vector<double>(xs.size(), 0.0)));
}

void report_step(Recorder& r, const std::string& name, const surgery::SurgeryResult& s, double floor) {
    r.le(name + ": residual of h/theta",
         isospectral::intertwining_residual(s.potential, s.w, s.nu, &s.theta, 10.0 * floor), 1e-6);
    r.le(name + ": ||h/theta||^2 identity", std::abs(s.w.total_norm() - surgery::expected_norm(s)), 1e-6);
}

void surgery_suite(std::vector<Check>& out) {
    Recorder r("surgery", out);
    r.guard("add closed form", [&] {
        const surgery::WindowContext ctx(40.0);
        const auto s = surgery::add_eigenvalue(CanonicalPotential::zero(40.0), 0.0, 1.0, 1.0, ctx);
        double err = 0.0;
        for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
            const double x = ctx.grid.x(i);
            const PQ v = s.potential.evaluate(x);
            err = std::max({err, std::abs(v.p + std::sin(2 * x) / (1 + x)), std::abs(v.q - std::cos(2 * x) / (1 + x))});
        }
        r.le("add mu=1 on zero, X=40: closed form", err, 1e-9);
        r.le("add mu=1 on zero, X=40: ||w||^2 = 1 - 1/41", std::abs(s.w.total_norm() - (1.0 - 1.0 / 41.0)), 1e-6);
        report_step(r, "add mu=1 on zero", s, ctx.theta_floor);
    });
    const surgery::WindowContext ctx(12.0);
    const auto conf = confining(ctx);
    r.guard("scale", [&] {
        const auto before = surgery::window_spectrum(conf, 0.0, ctx, -3.5, 3.5);
        std::size_t k0 = 0;  // level nearest zero
        for (std::size_t k = 1; k < before.size(); ++k)
            if (std::abs(before[k].first) < std::abs(before[k0].first)) k0 = k;
        const auto lvl = surgery::window_level(conf, 0.0, before[k0].first, ctx);
        const auto s = surgery::scale_norming(conf, 0.0, lvl.lambda, 0.5, lvl.h, ctx);
        const auto after = surgery::window_spectrum(s.potential, 0.0, ctx, -3.5, 3.5);
        double drift = after.size() == before.size() ? 0.0 : INFINITY;
        for (std::size_t k = 0; k < before.size() && k < after.size(); ++k)
            drift = std::max(drift, std::abs(after[k].first - before[k].first));
        r.le("confining X=12, scale level nearest 0 by t=0.5: spectrum drift", drift, 1e-4);
        r.le("confining X=12, scale level nearest 0 by t=0.5: a ratio vs e^{+0.5}",
             std::abs(after.at(k0).second / before[k0].second - std::exp(0.5)), 1e-3);
        report_step(r, "scale t=0.5", s, ctx.theta_floor);
    });
    r.guard("remove", [&] {
        const auto lvl = surgery::window_level(conf, 0.0, 0.0, ctx);
        const auto s = surgery::remove_eigenvalue(conf, 0.0, lvl.lambda, spectrum::scaled(lvl.h, std::sqrt(0.9)), ctx);
        r.le("remove with norm_accum(X)=0.9: |theta(X) - 0.1|", std::abs(s.theta.values.back() - 0.1), 1e-9);
        report_step(r, "remove 0.9", s, ctx.theta_floor);
        double where = NAN;
        try {
            (void)surgery::remove_eigenvalue(conf, 0.0, lvl.lambda, lvl.h, ctx);
        } catch (const SingularityError& e) {
            where = e.where();
        }
        r.ge("remove with window-normalized h: singularity reported (x)", std::isnan(where) ? -1.0 : where, 0.0);
    });
    r.guard("compose", [&] {
        const SurgeryPlan plan{{{SurgeryOp::add, 0.7, 0.0, 1.0}, {SurgeryOp::scale, 0.7, 1.0, 1.0}}, ctx.window_end()};
        const auto res = surgery::compose_surgery(conf, 0.0, plan, ctx);
        auto nearest = [&](const CanonicalPotential& pot) {
            const auto sp = surgery::window_spectrum(pot, 0.0, ctx, -0.3, 1.7);
            std::pair<double, double> best{INFINITY, 0.0};
            for (const auto& l : sp)
                if (std::abs(l.first - 0.7) < std::abs(best.first - 0.7)) best = l;
            return best;
        };
        const auto added = nearest(res.intermediates.at(0));
        const auto scaled = nearest(res.potential);
        r.le("plan [add 0.7, scale t=1]: new level near 0.7", std::abs(added.first - 0.7), 2e-2);
        r.le("plan [add 0.7, scale t=1]: a ratio vs e^{+1} (relative)",
             std::abs(scaled.second / added.second / std::exp(1.0) - 1.0), 1e-2);
        report_step(r, "plan step 1 (add)", res.steps.at(0), ctx.theta_floor);
        report_step(r, "plan step 2 (scale)", res.steps.at(1), ctx.theta_floor);
        const auto single = surgery::add_eigenvalue(conf, 0.0, 0.7, 1.0, ctx);
        double diff = 0.0;
        for (std::size_t i = 0; i < ctx.grid.size(); ++i) {
            const PQ a = single.potential.evaluate(ctx.grid.x(i)), b = res.steps[0].potential.evaluate(ctx.grid.x(i));
            diff = std::max({diff, std::abs(a.p - b.p), std::abs(a.q - b.q)});
        }
        r.le("single-step plan equals add_eigenvalue", diff, 0.0);
    });
    r.guard("round trip", [&] {
        const auto add = surgery::add_eigenvalue(conf, 0.0, 0.7, 1.0, ctx);
        const auto theta = isospectral::theta_from_gamma(add.w, -1.0);
        const std::size_t k = surgery::certified_prefix(theta, 10.0 * ctx.theta_floor);
        const auto sub = surgery::sub_window(ctx, k);
        const auto rem = surgery::remove_eigenvalue(add.potential, 0.0, 0.7, surgery::truncated(add.w, k), sub);
        const auto a = surgery::window_spectrum(conf, 0.0, sub, -3.5, 3.5);
        const auto b = surgery::window_spectrum(rem.potential, 0.0, sub, -3.5, 3.5);
        double drift = a.size() == b.size() ? 0.0 : INFINITY;
        for (std::size_t j = 0; j < a.size() && j < b.size(); ++j) drift = std::max(drift, std::abs(a[j].first - b[j].first));
        r.le("add-then-remove at 0.7 (certified sub-window): spectrum drift", drift, 2e-3);
        double wmax = 0.0;
        for (std::size_t i = 0; i < rem.w.y1.size(); ++i) wmax = std::max(wmax, std::sqrt(rem.w.at(i).norm2()));
        r.le("add-then-remove: residual relative to max|w|",
             isospectral::intertwining_residual(rem.potential, rem.w, 0.7, &rem.theta, 10.0 * ctx.theta_floor) / wmax,
             1e-6);
    });
}

}  // namespace

std::vector<Check> run_suite(const std::string& suite) {
    std::vector<Check> out;
    const bool all = suite == "all";
    bool known = all;
    auto run = [&](const char* name, void (*fn)(std::vector<Check>&)) {
        if (all || suite == name) {
            known = true;
            fn(out);
        }
    };
    run("ode", ode_suite);
    run("spectrum", spectrum_suite);
    run("gradient", gradient_suite);
    run("isospectral", isospectral_suite);
    run("surgery", surgery_suite);
    if (!known) throw ConfigError("unknown suite '" + suite + "' (all, ode, spectrum, gradient, isospectral, surgery)");
    return out;
}

bool print_checks(std::ostream& os, const std::vector<Check>& checks, bool color) {
    bool ok = true;
    for (const auto& c : checks) {
        ok = ok && c.pass;
        const char* tag = c.pass ? "PASS" : "FAIL";
        if (color) os << (c.pass ? "\033[32m" : "\033[31m") << tag << "\033[0m";
        else os << tag;
        char buf[96];
        std::snprintf(buf, sizeof buf, "  value=%.3e bound=%.3e", c.value, c.bound);
        os << "  [" << c.suite << "] " << c.name << buf;
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << "\n";
    }
    return ok;
}

}  // namespace dirac::cli
