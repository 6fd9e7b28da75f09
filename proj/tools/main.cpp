// dirac: command-line front end (solve, gradient, deform, deform-seq,
// surgery, fit, verify).

#include <unistd.h>

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "dirac/cli/commands.hpp"
#include "dirac/errors.hpp"
#include "dirac/parallel.hpp"

namespace {

bool want_color() { return std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO); }

}  // namespace

int main(int argc, char** argv) {
    using dirac::cli::Options;
    Options opt;
    int threads = 0;

    CLI::App app{"Spectra, gradients, isospectral deformations and spectral surgery for canonical Dirac systems"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();
    app.add_option("--threads", threads, "worker threads (0 = all available)")->check(CLI::NonNegativeNumber);

    auto config = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "run configuration (key = value)")->check(CLI::ExistingFile);
        sub->add_option("--window", opt.window, "half-line window end X (overrides grid.x_end)");
    };
    auto out = [&](CLI::App* sub) { sub->add_option("--out", opt.out, "output file")->required(); };
    auto range = [&](CLI::App* sub) {
        sub->add_option("--n-min", opt.n_min, "lowest index");
        sub->add_option("--n-max", opt.n_max, "highest index");
    };

    auto* solve = app.add_subcommand("solve", "eigenvalues and norming constants");
    config(solve), out(solve), range(solve);

    auto* grad = app.add_subcommand("gradient", "eigenvalue gradient of one index");
    config(grad), out(grad), range(grad);
    grad->add_option("--n", opt.n, "index")->required();
    grad->add_flag("--check-fd", opt.check_fd, "compare with central differences along seeded directions");
    grad->add_option("--eps", opt.eps, "finite-difference step");
    grad->add_option("--seed", opt.seed, "LCG seed for the directions");

    auto* deform = app.add_subcommand("deform", "single-index isospectral deformation");
    config(deform), out(deform);
    deform->add_option("--m", opt.m, "index whose norming constant changes")->required();
    deform->add_option("--t", opt.t, "deformation parameter (a_m -> a_m e^-t)")->required();
    deform->add_flag("--verify", opt.verify, "re-solve and report drift and ratios");

    auto* seq = app.add_subcommand("deform-seq", "staged deformation from a schedule file");
    config(seq), out(seq);
    seq->add_option("--schedule", opt.schedule, "n,t_n table")->required()->check(CLI::ExistingFile);
    seq->add_flag("--verify", opt.verify, "re-solve and report drift and ratios");

    auto* surg = app.add_subcommand("surgery", "half-line spectral surgery on a window");
    surg->require_subcommand(1);
    surg->fallthrough();
    std::string surg_op;
    for (const char* name : {"add", "remove", "scale", "plan"}) {
        auto* s = surg->add_subcommand(name);
        config(s), out(s);
        s->callback([&surg_op, name] { surg_op = name; });
    }
    auto* s_add = surg->get_subcommand("add");
    s_add->description("add an eigenvalue at --mu");
    s_add->add_option("--mu", opt.mu, "new eigenvalue")->required();
    s_add->add_option("--c", opt.c, "normalization of the added solution");
    auto* s_rem = surg->get_subcommand("remove");
    s_rem->description("remove the truncated level nearest --mu");
    s_rem->add_option("--mu", opt.mu, "spectral parameter near the level")->required();
    s_rem->add_option("--c", opt.c, "scale of the window-normalized eigenfunction");
    auto* s_scl = surg->get_subcommand("scale");
    s_scl->description("rescale the norming constant of the level nearest --mu by e^t");
    s_scl->add_option("--mu", opt.mu, "spectral parameter near the level")->required();
    s_scl->add_option("--t", opt.t, "scale parameter")->required();
    auto* s_plan = surg->get_subcommand("plan");
    s_plan->description("apply an op,nu,t,c plan; intermediates go to numbered sidecar files");
    s_plan->add_option("--plan", opt.plan, "plan file")->required()->check(CLI::ExistingFile);

    auto* fit = app.add_subcommand("fit", "gradient descent towards target eigenvalues");
    config(fit), out(fit);
    fit->add_option("--target", opt.target, "n,lambda table")->required();
    fit->add_option("--iters", opt.iters, "iteration budget")->check(CLI::NonNegativeNumber);
    fit->add_option("--lr", opt.lr, "initial learning rate");
    fit->add_option("--history", opt.history, "iter,misfit output (default: <out>.history.csv)");

    auto* verify = app.add_subcommand("verify", "run the bundled invariant suites");
    verify->add_option("--suite", opt.suite, "all, ode, spectrum, gradient, isospectral or surgery")
        ->check(CLI::IsMember({"all", "ode", "spectrum", "gradient", "isospectral", "surgery"}));

    CLI11_PARSE(app, argc, argv);
    dirac::set_thread_count(static_cast<unsigned>(threads));

    try {
        if (*solve) return dirac::cli::cmd_solve(opt, std::cerr);
        if (*grad) return dirac::cli::cmd_gradient(opt, std::cout);
        if (*deform) return dirac::cli::cmd_deform(opt, std::cout);
        if (*seq) return dirac::cli::cmd_deform_seq(opt, std::cout);
        if (*surg) return dirac::cli::cmd_surgery(opt, surg_op, std::cout);
        if (*fit) return dirac::cli::cmd_fit(opt, std::cout);
        if (*verify) return dirac::cli::cmd_verify(opt, std::cout, want_color());
    } catch (const dirac::SingularityError& e) {
        std::cerr << "error: singularity at x = " << e.where() << ": " << e.what() << "\n";
        return 1;
    } catch (const dirac::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
