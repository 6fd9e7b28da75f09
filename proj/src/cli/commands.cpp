#include "dirac/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dirac/cli/io.hpp"
#include "dirac/cli/lcg.hpp"
#include "dirac/cli/verify.hpp"
#include "dirac/gradient.hpp"
#include "dirac/isospectral.hpp"
#include "dirac/spectrum.hpp"
#include "dirac/surgery.hpp"

namespace dirac::cli {

namespace {

using Scalars = std::vector<std::pair<std::string, double>>;

const std::string& require_out(const Options& opt) {
    if (opt.out.empty()) throw ConfigError("--out is required");
    return opt.out;
}

void log_scalars(std::ostream& log, const Scalars& s) {
    for (const auto& [k, v] : s) log << k << "=" << fmt(v) << "\n";
}

SpectrumTable solve_window(const RunConfig& cfg, const CanonicalPotential& pot, const Grid& grid,
                           int lo, int hi, double tol) {
    auto w = cfg.search(lo, hi);
    w.refine_tol = std::min(w.refine_tol, tol);
    return spectrum::locate_eigenvalues(pot, cfg.boundary, w, grid);
}

/// Eigenvalue drift and norming-constant ratio errors between two tables.
Scalars compare_tables(const SpectrumTable& before, const SpectrumTable& after,
                       const DeformationSchedule& sched) {
    double drift = 0.0, touched = 0.0, other = 0.0;
    for (const auto& [n, d] : before.data()) {
        drift = std::max(drift, std::abs(after.at(n).lambda - d.lambda));
        const double t = sched.t_at(n);
        const double err = std::abs(after.at(n).a / d.a - std::exp(-t));
        (t != 0.0 ? touched : other) = std::max(t != 0.0 ? touched : other, err);
    }
    return {{"max_drift", drift}, {"max_touched_ratio_error", touched}, {"max_other_ratio_error", other}};
}

Scalars verify_deformation(const RunConfig& cfg, const CanonicalPotential& pot,
                           const CanonicalPotential& deformed, const Grid& grid,
                           const DeformationSchedule& sched) {
    int lo = -8, hi = 8;
    for (const auto& [n, t] : sched.t) {
        lo = std::min(lo, n);
        hi = std::max(hi, n);
    }
    const auto before = solve_window(cfg, pot, grid, lo, hi, 1e-14);
    const auto after = solve_window(cfg, deformed, grid, lo, hi, 1e-14);
    Scalars s = compare_tables(before, after, sched);
    for (const auto& [n, t] : sched.t) {
        if (t == 0.0) continue;
        s.emplace_back("a_" + std::to_string(n) + "_ratio", after.at(n).a / before.at(n).a);
        s.emplace_back("a_" + std::to_string(n) + "_expected", std::exp(-t));
    }
    return s;
}

}  // namespace

RunConfig resolve_config(const Options& opt) {
    RunConfig cfg = opt.config.empty() ? default_config() : load_config(opt.config);
    if (opt.window) {
        if (!(*opt.window > 0.0)) throw ConfigError("--window must be positive");
        cfg.x_end = *opt.window;
    }
    return cfg;
}

int cmd_solve(const Options& opt, std::ostream& log) {
    const RunConfig cfg = resolve_config(opt);
    const Grid grid = cfg.grid();
    const auto table = spectrum::locate_eigenvalues(cfg.build_potential(), cfg.boundary,
                                                    cfg.search(opt.n_min, opt.n_max), grid);
    for (const auto& w : table.warnings()) log << "warning: " << w << "\n";
    CsvWriter out(require_out(opt));
    out.header({"n", "lambda", "a", "b", "r", "c"});
    for (const auto& [n, d] : table.data()) out.row({static_cast<double>(n), d.lambda, d.a, d.b, d.r, d.c});
    out.close();
    log << "solved " << table.size() << " eigenvalues, n in [" << opt.n_min << ", " << opt.n_max << "]\n";
    return 0;
}

int cmd_gradient(const Options& opt, std::ostream& log) {
    const RunConfig cfg = resolve_config(opt);
    if (opt.n < opt.n_min || opt.n > opt.n_max) {
        std::ostringstream os;
        os << "index " << opt.n << " lies outside the solved window [" << opt.n_min << ", " << opt.n_max << "]";
        throw RangeError(os.str());
    }
    const Grid grid = cfg.grid();
    const auto pot = cfg.build_potential();
    const auto table = solve_window(cfg, pot, grid, opt.n_min, opt.n_max, cfg.refine_tol);
    const SpectralDatum& d = table.at(opt.n);
    const auto mode = cfg.window_mode() ? gradient::Mode::half_line_window : gradient::Mode::finite_interval;
    const auto bundle = gradient::gradient_bundle(pot, cfg.boundary, d, grid, mode);

    Scalars pre{{"n", opt.n}, {"lambda", d.lambda}, {"d_alpha", bundle.d_alpha}};
    if (bundle.d_beta) pre.emplace_back("d_beta", *bundle.d_beta);

    Scalars fd;
    if (opt.check_fd) {
        if (!(opt.eps > 0.0)) throw ConfigError("--eps must be positive");
        // re-solve the index tightly so root error stays below the FD noise
        const double lambda = solve_window(cfg, pot, grid, opt.n, opt.n, 1e-14).at(opt.n).lambda;
        Lcg rng(opt.seed);
        for (const Channel ch : {Channel::p, Channel::q}) {
            const auto& dv = ch == Channel::p ? bundle.d_p : bundle.d_q;
            const std::string tag = ch == Channel::p ? "p" : "q";
            for (int k = 1; k <= 3; ++k) {
                const auto v = trig_direction(grid, rng);
                const Perturbation pert(v, opt.eps, ch);
                const std::vector<double> zeros(grid.size(), 0.0);
                auto side = [&](double sign) {
                    std::vector<double> step(v);
                    for (double& x : step) x *= sign * pert.eps;
                    const auto moved = ch == Channel::p ? pot.with_correction(grid, step, zeros)
                                                        : pot.with_correction(grid, zeros, step);
                    return gradient::tracked_eigenvalue(moved, cfg.boundary, lambda, grid);
                };
                const double num = (side(1.0) - side(-1.0)) / (2.0 * pert.eps);
                const double an = gradient::pairing(dv, v, grid);
                const std::string key = "fd_" + tag + std::to_string(k);
                fd.emplace_back(key + "_analytic", an);
                fd.emplace_back(key + "_fd", num);
                fd.emplace_back(key + "_rel_err", std::abs(num - an) / std::max(1.0, std::abs(an)));
            }
        }
    }

    CsvWriter out(require_out(opt));
    for (const auto& [k, v] : pre) out.comment(k, v);
    out.header({"x", "d_p", "d_q"});
    for (std::size_t i = 0; i < grid.size(); ++i) out.row({grid.x(i), bundle.d_p[i], bundle.d_q[i]});
    for (const auto& [k, v] : fd) out.comment(k, v);
    out.close();
    log_scalars(log, pre);
    log_scalars(log, fd);
    return 0;
}

int cmd_deform(const Options& opt, std::ostream& log) {
    const RunConfig cfg = resolve_config(opt);
    const Grid grid = cfg.grid();
    const auto pot = cfg.build_potential();
    const auto deformed = isospectral::deform_single(pot, cfg.boundary, opt.m, opt.t, grid);
    Scalars report;
    if (opt.verify) {
        DeformationSchedule sched;
        sched.t[opt.m] = opt.t;
        report = verify_deformation(cfg, pot, deformed, grid, sched);
    }
    write_potential(require_out(opt), deformed, grid, report);
    log_scalars(log, report);
    return 0;
}

int cmd_deform_seq(const Options& opt, std::ostream& log) {
    if (opt.schedule.empty()) throw ConfigError("--schedule is required");
    const RunConfig cfg = resolve_config(opt);
    const Grid grid = cfg.grid();
    const auto pot = cfg.build_potential();
    DeformationSchedule sched;
    for (const auto& [n, t] : read_index_values(opt.schedule, "t_n")) {
        if (!sched.t.emplace(n, t).second)
            throw ConfigError(opt.schedule + ": index " + std::to_string(n) + " listed twice");
    }
    const auto deformed = isospectral::deform_sequence(pot, cfg.boundary, sched, grid);
    Scalars report;
    if (opt.verify) report = verify_deformation(cfg, pot, deformed, grid, sched);
    write_potential(require_out(opt), deformed, grid, report);
    log_scalars(log, report);
    return 0;
}

namespace {

Scalars surgery_report(const surgery::SurgeryResult& s, double floor) {
    double theta_min = s.theta.values.front();
    for (double v : s.theta.values) theta_min = std::min(theta_min, v);
    const double expected = surgery::expected_norm(s);
    return {{"nu", s.nu},
            {"gamma", s.gamma},
            {"theta_min", theta_min},
            {"max_residual", isospectral::intertwining_residual(s.potential, s.w, s.nu, &s.theta, 10.0 * floor)},
            {"norm_w", s.w.total_norm()},
            {"norm_expected", expected},
            {"norm_identity_error", std::abs(s.w.total_norm() - expected)}};
}

}  // namespace

int cmd_surgery(const Options& opt, const std::string& sub, std::ostream& log) {
    const RunConfig cfg = resolve_config(opt);
    if (!cfg.window_mode()) throw ConfigError("surgery needs mode = half-line-window in the config");
    const std::string& out = require_out(opt);
    const surgery::WindowContext ctx(cfg.grid(), cfg.theta_floor, cfg.boundary.beta());
    const auto pot = cfg.build_potential();
    const double alpha = cfg.boundary.alpha();

    if (sub == "plan") {
        if (opt.plan.empty()) throw ConfigError("--plan is required");
        const auto plan = read_plan(opt.plan, ctx.window_end());
        const auto res = surgery::compose_surgery(pot, alpha, plan, ctx);
        for (std::size_t k = 0; k < res.steps.size(); ++k) {
            const auto rep = surgery_report(res.steps[k], ctx.theta_floor);
            write_potential(sidecar_path(out, k + 1), res.intermediates[k], ctx.grid, rep);
            log << "step " << k + 1 << " (" << to_string(plan.steps[k].op) << ")\n";
            log_scalars(log, rep);
        }
        write_potential(out, res.potential, ctx.grid, {{"steps", static_cast<double>(res.steps.size())}});
        return 0;
    }

    surgery::SurgeryResult res = [&] {
        if (sub == "add") return surgery::add_eigenvalue(pot, alpha, opt.mu, opt.c, ctx);
        const auto lvl = surgery::window_level(pot, alpha, opt.mu, ctx);
        log << "level nearest " << fmt(opt.mu) << ": lambda=" << fmt(lvl.lambda) << " a=" << fmt(lvl.a) << "\n";
        if (sub == "remove") {
            if (!(opt.c > 0.0)) throw ConfigError("--c must be positive");
            return surgery::remove_eigenvalue(pot, alpha, lvl.lambda, spectrum::scaled(lvl.h, opt.c), ctx);
        }
        if (sub == "scale") return surgery::scale_norming(pot, alpha, lvl.lambda, opt.t, lvl.h, ctx);
        throw ConfigError("unknown surgery operation '" + sub + "'");
    }();
    const auto rep = surgery_report(res, ctx.theta_floor);
    write_potential(out, res.potential, ctx.grid, rep);
    log_scalars(log, rep);
    return 0;
}

int cmd_fit(const Options& opt, std::ostream& log) {
    if (opt.target.empty()) throw ConfigError("--target is required");
    const RunConfig cfg = resolve_config(opt);
    if (cfg.window_mode()) throw ConfigError("fit works on the finite-interval problem only");
    const std::string& out = require_out(opt);
    const std::string history = opt.history.empty() ? suffixed_path(out, "history") : opt.history;
    gradient::FitProblem fp;
    fp.target = read_index_values(opt.target, "lambda");
    fp.init = cfg.build_potential();
    fp.boundary = cfg.boundary;
    fp.grid = cfg.grid();
    fp.learn_rate = opt.lr;
    fp.max_iters = opt.iters;

    auto emit = [&](const gradient::FitResult& r) {
        CsvWriter h(history);
        h.header({"iter", "misfit"});
        for (std::size_t k = 0; k < r.misfit_history.size(); ++k)
            h.row({static_cast<double>(k), r.misfit_history[k]});
        h.close();
        write_potential(out, r.potential, fp.grid,
                        {{"misfit", r.misfit_history.back()}, {"iterations", static_cast<double>(r.iterations)}});
        log << "final misfit=" << fmt(r.misfit_history.back()) << " iterations=" << r.iterations << "\n";
    };
    try {
        emit(gradient::fit_spectrum(fp));
    } catch (const gradient::FitDivergence& e) {
        emit(e.last_stable());
        throw;
    }
    return 0;
}

int cmd_verify(const Options& opt, std::ostream& log, bool color) {
    return print_checks(log, run_suite(opt.suite), color) ? 0 : 1;
}

}  // namespace dirac::cli
