#include <cmath>

#include "dirac/isospectral.hpp"
#include "dirac/spectrum.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace dirac;

namespace {

SpectrumTable solve(const CanonicalPotential& pot, int lo, int hi, BoundaryParams b = {}) {
    spectrum::SearchWindow w;
    w.n_min = lo;
    w.n_max = hi;
    w.refine_tol = 1e-14;
    return spectrum::locate_eigenvalues(pot, b, w, Grid::default_interval());
}

}  // namespace

TEST_CASE("free middle level deforms into a closed-form q") {
    // h_0 = (0, -1)/sqrt(pi): the increment is pure q = (e^t - 1) / (pi + (e^t - 1) x)
    const Grid g = Grid::default_interval();
    for (double t : {-1.0, 0.5, 2.0}) {
        CAPTURE(t);
        const auto d = isospectral::deform_single_detailed(CanonicalPotential::zero(), {}, 0, t, g);
        const double gm = std::expm1(t);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); i += 50) {
            const double x = g.x(i);
            const PQ v = d.update.potential.evaluate(x);
            worst = std::max({worst, std::abs(v.p), std::abs(v.q - gm / (kPi + gm * x))});
        }
        CHECK(worst < 1e-10);
        CHECK(d.update.theta.values.front() == 1.0);
        CHECK(d.update.theta.values.back() == doctest::Approx(std::exp(t)).epsilon(1e-10));
    }
}

TEST_CASE("t = 0 leaves the potential unchanged") {
    const auto pot = testsupport::bump_model();
    const auto out = isospectral::deform_single(pot, {}, 1, 0.0, Grid::default_interval());
    for (double x : {0.0, 0.5, 1.7, kPi}) {
        CHECK(out.evaluate(x).p == pot.evaluate(x).p);
        CHECK(out.evaluate(x).q == pot.evaluate(x).q);
    }
}

TEST_CASE("theta needs a normalized eigenfunction") {
    const auto phi = ode::integrate_left(CanonicalPotential::zero(), 0.0, 1.0, Grid::default_interval());
    CHECK_THROWS_AS(isospectral::theta(phi, 0.3), PreconditionError);
    const auto th = isospectral::theta_from_gamma(phi, 0.5);
    CHECK(th.values.back() == doctest::Approx(1.0 + 0.5 * kPi));
    CHECK(th.t == doctest::Approx(std::log(1.5)));
}

TEST_CASE("single deformation keeps eigenvalues and rescales one norming constant") {
    testsupport::for_all(3, 77, [](testsupport::Gen& gen) {
        const auto pot = gen.potential();
        const int m = gen.integer(-2, 2);
        const double t = gen.uniform(-1.5, 1.5);
        const auto before = solve(pot, -3, 3);
        const auto after = solve(isospectral::deform_single(pot, {}, m, t, Grid::default_interval()), -3, 3);
        for (int n = -3; n <= 3; ++n) {
            CAPTURE(n);
            CHECK(std::abs(after.at(n).lambda - before.at(n).lambda) < 1e-7);
            const double expect = n == m ? std::exp(-t) : 1.0;
            CHECK(after.at(n).a / before.at(n).a == doctest::Approx(expect).epsilon(1e-6));
        }
    });
}

TEST_CASE("transformed eigenfunction solves the new system") {
    const Grid g = Grid::default_interval();
    const auto pot = testsupport::bump_model();
    const auto d = isospectral::deform_single_detailed(pot, {}, -1, 0.8, g);
    const auto w = isospectral::transformed_eigenfunction(d.h, d.update.theta);
    CHECK(isospectral::intertwining_residual(d.update.potential, w, d.lambda) < 1e-6);
    // ||h/theta||^2 = (1/gamma)(1 - 1/theta(pi)) = e^{-t} for normalized h
    CHECK(w.total_norm() == doctest::Approx(std::exp(-0.8)).epsilon(1e-9));
    // the increment is canonical: symmetric, trace-free
    for (std::size_t i = 0; i < g.size(); i += 200) {
        const Mat2& m = d.update.increment[i];
        CHECK(std::abs(m.trace()) < 1e-12);
        CHECK(m.a12 == doctest::Approx(m.a21));
    }
}

TEST_CASE("sequence of deformations") {
    const Grid g = Grid::default_interval();
    const auto pot = testsupport::bump_model();
    SUBCASE("one entry matches the single deformation") {
        DeformationSchedule s;
        s.t[-1] = 0.6;
        const auto a = isospectral::deform_sequence(pot, {}, s, g);
        const auto b = isospectral::deform_single(pot, {}, -1, 0.6, g);
        for (double x : {0.3, 1.2, 2.9}) CHECK(a.evaluate(x).q == b.evaluate(x).q);
    }
    SUBCASE("several entries hit their own levels") {
        DeformationSchedule s;
        s.t[0] = 0.4;
        s.t[1] = -0.7;
        s.t[-2] = 1.1;
        const auto before = solve(pot, -3, 3);
        const auto after = solve(isospectral::deform_sequence(pot, {}, s, g), -3, 3);
        for (int n = -3; n <= 3; ++n) {
            CAPTURE(n);
            CHECK(std::abs(after.at(n).lambda - before.at(n).lambda) < 1e-7);
            CHECK(after.at(n).a / before.at(n).a == doctest::Approx(std::exp(-s.t_at(n))).epsilon(1e-6));
        }
    }
    SUBCASE("stage order") {
        DeformationSchedule s;
        s.t[-2] = 1.0;
        const auto st = isospectral::schedule(s);
        REQUIRE(st.size() == 5);
        CHECK(st[0].target == 0);
        CHECK(st[2].target == -1);
        CHECK(st[4].target == -2);
        CHECK(st[4].active());
        CHECK_FALSE(st[1].active());
    }
    SUBCASE("right angle must vanish") {
        DeformationSchedule s;
        s.t[0] = 0.1;
        CHECK_THROWS_AS(isospectral::deform_sequence(pot, {0.0, 0.3}, s, g), PreconditionError);
    }
}
