#include "dirac/cli/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dirac/cli/io.hpp"

namespace dirac::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

class LineContext {
public:
    LineContext(const std::string& origin, std::size_t line) : origin_(origin), line_(line) {}

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << origin_ << ":" << line_ << ": " << msg;
        throw ConfigError(os.str());
    }

    double number(const std::string& key, const std::string& v) const {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            fail("'" + key + "' expects a number, got '" + v + "'");
        }
        if (used != v.size() || !std::isfinite(x)) fail("'" + key + "' expects a number, got '" + v + "'");
        return x;
    }

    std::size_t count(const std::string& key, const std::string& v) const {
        const double x = number(key, v);
        if (x < 0 || x != std::floor(x)) fail("'" + key + "' expects a non-negative integer");
        return static_cast<std::size_t>(x);
    }

    std::vector<double> list(const std::string& key, const std::string& v) const {
        std::vector<double> out;
        if (v.empty()) return out;
        for (const auto& item : split(v, ',')) out.push_back(number(key, item));
        return out;
    }

private:
    const std::string& origin_;
    std::size_t line_;
};

PotentialKind parse_kind(const LineContext& ctx, const std::string& v) {
    if (v == "zero") return PotentialKind::zero;
    if (v == "constant") return PotentialKind::constant;
    if (v == "fourier") return PotentialKind::fourier;
    if (v == "gauss-bumps" || v == "gauss_bumps") return PotentialKind::gauss_bumps;
    if (v == "sampled") return PotentialKind::sampled;
    ctx.fail("unknown potential kind '" + v + "'");
}

std::vector<Bump> parse_bumps(const LineContext& ctx, const std::string& v) {
    std::vector<Bump> out;
    for (const auto& item : split(v, ';')) {
        if (item.empty()) continue;
        const auto f = split(item, ':');
        if (f.size() != 4 || (f[0] != "p" && f[0] != "q"))
            ctx.fail("bump '" + item + "' is not channel:amplitude:center:width");
        Bump b;
        b.channel = f[0] == "p" ? Channel::p : Channel::q;
        b.amplitude = ctx.number("potential.bumps", f[1]);
        b.center = ctx.number("potential.bumps", f[2]);
        b.width = ctx.number("potential.bumps", f[3]);
        if (!(b.width > 0.0)) ctx.fail("bump width must be positive");
        out.push_back(b);
    }
    return out;
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& text, const std::string& origin, const std::string& base_dir) {
    RunConfig cfg;
    double alpha = 0.0, beta = 0.0;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const LineContext ctx(origin, line_no);
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) ctx.fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));

        if (key == "mode") {
            if (v == "finite-interval") cfg.mode = RunMode::finite_interval;
            else if (v == "half-line-window") cfg.mode = RunMode::half_line_window;
            else ctx.fail("mode must be finite-interval or half-line-window");
        } else if (key == "boundary.alpha") {
            alpha = ctx.number(key, v);
        } else if (key == "boundary.beta") {
            beta = ctx.number(key, v);
        } else if (key == "potential.kind") {
            cfg.potential.kind = parse_kind(ctx, v);
        } else if (key == "potential.p0") {
            cfg.potential.p0 = ctx.number(key, v);
        } else if (key == "potential.q0") {
            cfg.potential.q0 = ctx.number(key, v);
        } else if (key == "potential.p_cos") {
            cfg.potential.series.p_cos = ctx.list(key, v);
        } else if (key == "potential.p_sin") {
            cfg.potential.series.p_sin = ctx.list(key, v);
        } else if (key == "potential.q_cos") {
            cfg.potential.series.q_cos = ctx.list(key, v);
        } else if (key == "potential.q_sin") {
            cfg.potential.series.q_sin = ctx.list(key, v);
        } else if (key == "potential.bumps") {
            cfg.potential.bumps = parse_bumps(ctx, v);
        } else if (key == "potential.file") {
            const std::filesystem::path p(v);
            cfg.potential.file = p.is_absolute() ? v : (std::filesystem::path(base_dir) / p).string();
        } else if (key == "grid.n_points") {
            cfg.n_points = ctx.count(key, v);
            if (*cfg.n_points < 5) ctx.fail("grid.n_points must be at least 5");
        } else if (key == "grid.x_end") {
            cfg.x_end = ctx.number(key, v);
            if (!(*cfg.x_end > 0.0)) ctx.fail("grid.x_end must be positive");
        } else if (key == "solver.scan_step") {
            cfg.scan_step = ctx.number(key, v);
            if (!(cfg.scan_step > 0.0 && cfg.scan_step <= 0.5)) ctx.fail("solver.scan_step must lie in (0, 0.5]");
        } else if (key == "solver.refine_tol") {
            cfg.refine_tol = ctx.number(key, v);
            if (!(cfg.refine_tol > 0.0)) ctx.fail("solver.refine_tol must be positive");
        } else if (key == "window.theta_floor") {
            cfg.theta_floor = ctx.number(key, v);
            if (!(cfg.theta_floor > 0.0)) ctx.fail("window.theta_floor must be positive");
        } else {
            ctx.fail("unknown key '" + key + "'");
        }
    }
    try {
        cfg.boundary = BoundaryParams(alpha, beta);
    } catch (const Error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (cfg.potential.kind == PotentialKind::sampled && cfg.potential.file.empty())
        throw ConfigError(origin + ": potential.kind = sampled needs potential.file");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(ss.str(), path, dir.empty() ? "." : dir.string());
}

Grid RunConfig::grid() const {
    if (potential.kind == PotentialKind::sampled) {
        const Grid g = read_potential(potential.file).samples()->grid;
        if (x_end && std::abs(*x_end - g.x_end()) > 1e-12 * g.x_end())
            throw ConfigError("grid.x_end disagrees with the sampled potential file");
        if (n_points && *n_points != g.size())
            throw ConfigError("grid.n_points disagrees with the sampled potential file");
        return g;
    }
    if (window_mode()) {
        if (!x_end) throw ConfigError("half-line-window mode needs grid.x_end (or --window)");
        if (n_points) return Grid(*x_end, *n_points);
        return Grid::with_max_spacing(*x_end, kPi / 4000.0);
    }
    return Grid(x_end.value_or(kPi), n_points.value_or(4001));
}

CanonicalPotential RunConfig::build_potential() const {
    const double end = grid().x_end();
    switch (potential.kind) {
        case PotentialKind::zero: return CanonicalPotential::zero(end);
        case PotentialKind::constant: return CanonicalPotential::constant(potential.p0, potential.q0, end);
        case PotentialKind::fourier: return CanonicalPotential::fourier(potential.series, end);
        case PotentialKind::gauss_bumps: return CanonicalPotential::gauss_bumps(potential.bumps, end);
        case PotentialKind::sampled: return read_potential(potential.file);
    }
    throw ConfigError("unhandled potential kind");
}

spectrum::SearchWindow RunConfig::search(int n_min, int n_max) const {
    if (n_min > n_max) throw RangeError("n-min exceeds n-max");
    spectrum::SearchWindow w;
    w.n_min = n_min;
    w.n_max = n_max;
    w.scan_step = scan_step;
    w.refine_tol = refine_tol;
    w.check_spacing = !window_mode();
    return w;
}

}  // namespace dirac::cli
