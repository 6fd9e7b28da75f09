#include "dirac/ode.hpp"

#include <cmath>
#include <sstream>

namespace dirac::ode {

namespace {

constexpr double kGaussOffset = 0.28867513459481288225;  // sqrt(3)/6
constexpr double kCommutatorWeight = 0.14433756729740644113;  // sqrt(3)/12

void check_cover(const CanonicalPotential& pot, const Grid& grid) {
    if (std::abs(grid.x_end() - pot.domain_end()) > 1e-12 * pot.domain_end()) {
        std::ostringstream os;
        os << "grid [0, " << grid.x_end() << "] does not cover potential domain [0, "
           << pot.domain_end() << "]";
        throw DomainError(os.str());
    }
}

[[noreturn]] void overflow_at(double x, double lambda) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite solution at x = " << x << " (lambda = " << lambda << ")";
    throw OverflowError(os.str(), x);
}

double norm_rate(const Vec2& y, const Vec2& dy) { return 2.0 * (y.y1 * dy.y1 + y.y2 * dy.y2); }

void store(VectorSolution& s, std::size_t i, const Vec2& y, const Mat2& a) {
    const Vec2 dy = a * y;
    s.y1[i] = y.y1;
    s.y2[i] = y.y2;
    s.dy1[i] = dy.y1;
    s.dy2[i] = dy.y2;
}

void fill_accumulator(VectorSolution& s) {
    std::vector<double> f(s.y1.size()), df(s.y1.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = s.at(i).norm2();
        df[i] = norm_rate(s.at(i), s.derivative_at(i));
    }
    s.norm_accum = hermite_cumulative(s.grid, f, df);
}

}  // namespace

Discretization::Discretization(const CanonicalPotential& pot, const Grid& grid) : grid_(grid) {
    check_cover(pot, grid);
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    nodes_.resize(n);
    lo_.resize(n - 1);
    hi_.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) nodes_[i] = pot.evaluate(grid.x(i));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double mid = grid.x(i) + 0.5 * h;
        lo_[i] = pot.evaluate(mid - kGaussOffset * h);
        hi_[i] = pot.evaluate(mid + kGaussOffset * h);
    }
}

Mat2 system_matrix(PQ v, double lambda) { return {v.q, -(lambda + v.p), lambda - v.p, -v.q}; }

Mat2 expm_traceless(const Mat2& m) {
    // m^2 = delta * I for trace-free m
    const double delta = m.a11 * m.a11 + m.a12 * m.a21;
    double c, s;
    if (std::abs(delta) < 1e-4) {
        c = 1.0 + delta * (1.0 / 2 + delta * (1.0 / 24 + delta * (1.0 / 720 + delta / 40320)));
        s = 1.0 + delta * (1.0 / 6 + delta * (1.0 / 120 + delta * (1.0 / 5040 + delta / 362880)));
    } else if (delta > 0) {
        const double r = std::sqrt(delta);
        c = std::cosh(r);
        s = std::sinh(r) / r;
    } else {
        const double r = std::sqrt(-delta);
        c = std::cos(r);
        s = std::sin(r) / r;
    }
    return {c + s * m.a11, s * m.a12, s * m.a21, c + s * m.a22};
}

Mat2 step_propagator(const Discretization& disc, std::size_t step, double lambda) {
    const double h = disc.grid().spacing();
    const Mat2 a1 = system_matrix(disc.gauss_lo(step), lambda);
    const Mat2 a2 = system_matrix(disc.gauss_hi(step), lambda);
    const Mat2 comm = a2 * a1 - a1 * a2;
    const Mat2 m = (0.5 * h) * (a1 + a2) + (kCommutatorWeight * h * h) * comm;
    return expm_traceless(m);
}

VectorSolution integrate_left(const Discretization& disc, double alpha, double lambda) {
    const Grid& grid = disc.grid();
    VectorSolution s(grid, lambda);
    Vec2 y{std::sin(alpha), -std::cos(alpha)};
    store(s, 0, y, system_matrix(disc.node(0), lambda));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        y = step_propagator(disc, i, lambda) * y;
        if (!std::isfinite(y.y1) || !std::isfinite(y.y2)) overflow_at(grid.x(i + 1), lambda);
        store(s, i + 1, y, system_matrix(disc.node(i + 1), lambda));
    }
    fill_accumulator(s);
    return s;
}

VectorSolution integrate_right(const Discretization& disc, double beta, double lambda) {
    const Grid& grid = disc.grid();
    const std::size_t n = grid.size();
    VectorSolution s(grid, lambda);
    Vec2 y{std::sin(beta), -std::cos(beta)};
    store(s, n - 1, y, system_matrix(disc.node(n - 1), lambda));
    for (std::size_t i = n - 1; i-- > 0;) {
        const Mat2 p = step_propagator(disc, i, lambda);
        // det p = 1, so the inverse is the adjugate
        const Mat2 inv{p.a22, -p.a12, -p.a21, p.a11};
        y = inv * y;
        if (!std::isfinite(y.y1) || !std::isfinite(y.y2)) overflow_at(grid.x(i), lambda);
        store(s, i, y, system_matrix(disc.node(i), lambda));
    }
    fill_accumulator(s);
    return s;
}

Vec2 shoot_left_end(const Discretization& disc, double alpha, double lambda) {
    const Grid& grid = disc.grid();
    Vec2 y{std::sin(alpha), -std::cos(alpha)};
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        y = step_propagator(disc, i, lambda) * y;
        if (!std::isfinite(y.y1) || !std::isfinite(y.y2)) overflow_at(grid.x(i + 1), lambda);
    }
    return y;
}

double characteristic(const Discretization& disc, double alpha, double beta, double lambda) {
    const Vec2 y = shoot_left_end(disc, alpha, lambda);
    return y.y1 * std::cos(beta) + y.y2 * std::sin(beta);
}

VectorSolution integrate_left(const CanonicalPotential& pot, double alpha, double lambda,
                              const Grid& grid) {
    return integrate_left(Discretization(pot, grid), alpha, lambda);
}

VectorSolution integrate_right(const CanonicalPotential& pot, double beta, double lambda,
                               const Grid& grid) {
    return integrate_right(Discretization(pot, grid), beta, lambda);
}

double characteristic(const CanonicalPotential& pot, double alpha, double beta, double lambda,
                      const Grid& grid) {
    return characteristic(Discretization(pot, grid), alpha, beta, lambda);
}

std::vector<double> lagrange_bracket(const VectorSolution& phi, const VectorSolution& psi) {
    if (!(phi.grid == psi.grid)) throw ShapeError("solutions live on different grids");
    std::vector<double> w(phi.y1.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = phi.y1[i] * psi.y2[i] - phi.y2[i] * psi.y1[i];
    return w;
}

std::vector<double> hermite_cumulative(const Grid& grid, const std::vector<double>& f,
                                       const std::vector<double>& df) {
    if (f.size() != grid.size() || df.size() != grid.size())
        throw ShapeError("integrand size does not match grid");
    const double h = grid.spacing();
    std::vector<double> acc(f.size());
    acc[0] = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        acc[i + 1] = acc[i] + 0.5 * h * (f[i] + f[i + 1]) + h * h / 12.0 * (df[i] - df[i + 1]);
    return acc;
}

std::vector<double> trapezoid_cumulative(const Grid& grid, const std::vector<double>& f) {
    if (f.size() != grid.size()) throw ShapeError("integrand size does not match grid");
    const double h = grid.spacing();
    std::vector<double> acc(f.size());
    acc[0] = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) acc[i + 1] = acc[i] + 0.5 * h * (f[i] + f[i + 1]);
    return acc;
}

}  // namespace dirac::ode
