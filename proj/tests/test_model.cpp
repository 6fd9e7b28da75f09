#include <cmath>

#include "dirac/model.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace dirac;

TEST_CASE("canonical matrices") {
    const Mat2 B = CanonicalMatrices::B;
    CHECK(B * B == -Mat2::identity());
    const CMat2 s1 = CanonicalMatrices::sigma1();
    const CMat2 s2 = complexify(CanonicalMatrices::sigma2);
    const CMat2 s3 = complexify(CanonicalMatrices::sigma3);
    const CMat2 I = CMat2::identity();
    CHECK(s1 * s1 == I);
    CHECK(s2 * s2 == I);
    CHECK(s3 * s3 == I);
    CHECK(s1 * s2 == -(s2 * s1));
    CHECK(s1 * s3 == -(s3 * s1));
    CHECK(s2 * s3 == -(s3 * s2));
    // p sigma2 + q sigma3 is the canonical [[p, q], [q, -p]]
    CHECK(0.3 * CanonicalMatrices::sigma2 + 0.7 * CanonicalMatrices::sigma3 == canonical_matrix({0.3, 0.7}));
}

TEST_CASE("boundary angles live in (-pi/2, pi/2]") {
    CHECK_NOTHROW(BoundaryParams(kPi / 2, kPi / 2));
    CHECK_THROWS_AS(BoundaryParams(-kPi / 2, 0.0), DomainError);
    CHECK_THROWS_AS(BoundaryParams(0.0, 1.6), DomainError);
    CHECK_THROWS_AS(BoundaryParams(NAN, 0.0), DomainError);
}

TEST_CASE("grid nodes") {
    const Grid g(kPi, 4001);
    CHECK(g.x(0) == 0.0);
    CHECK(g.x(4000) == kPi);
    CHECK(g.spacing() == doctest::Approx(kPi / 4000));
    const Grid w = Grid::with_max_spacing(12.0, kPi / 4000);
    CHECK(w.spacing() <= kPi / 4000);
    CHECK(w.x(w.size() - 1) == 12.0);
    CHECK_THROWS_AS(Grid(1.0, 1), DomainError);
}

TEST_CASE("potential evaluation") {
    CHECK(CanonicalPotential::zero().evaluate(1.0).p == 0.0);
    const PQ c = CanonicalPotential::constant(0.5, 0.0).evaluate(2.0);
    CHECK(c.p == 0.5);
    CHECK(c.q == 0.0);
    const auto s = CanonicalPotential::sampled(SampledField(Grid(kPi, 2), {0.0, 1.0}, {0.0, 0.0}));
    CHECK(s.evaluate(kPi / 2).p == doctest::Approx(0.5));
    CHECK(s.evaluate(kPi / 2).q == 0.0);
    CHECK_THROWS_AS(s.evaluate(3.2), DomainError);
    CHECK_THROWS_AS(s.evaluate(-0.1), DomainError);

    FourierSeries f;
    f.p_cos = {0.1, 0.2};
    f.q_sin = {0.3};
    const PQ v = CanonicalPotential::fourier(f, kPi).evaluate(0.7);
    CHECK(v.p == doctest::Approx(0.1 + 0.2 * std::cos(0.7)));
    CHECK(v.q == doctest::Approx(0.3 * std::sin(0.7)));

    const PQ b = testsupport::bump_model().evaluate(1.2);
    CHECK(b.p == doctest::Approx(0.6 + 0.0).epsilon(1e-3));
}

TEST_CASE("matrix values are symmetric and trace-free (property)") {
    testsupport::for_all(50, 11, [](testsupport::Gen& g) {
        const auto pot = g.potential();
        for (int k = 0; k < 10; ++k) {
            const Mat2 m = pot.matrix(g.uniform(0.0, kPi));
            CHECK(m.a12 == m.a21);
            CHECK(m.trace() == 0.0);
        }
    });
}

TEST_CASE("matrix field round trip reproduces node values exactly (property)") {
    const Grid grid(kPi, 801);
    testsupport::for_all(20, 12, [&](testsupport::Gen& g) {
        const auto pot = g.potential();
        const auto field = assemble_matrix_field(pot, grid);
        const auto back = potential_from_matrix_field(field, grid);
        CHECK(back.kind() == PotentialKind::sampled);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const PQ a = pot.evaluate(grid.x(i)), b = back.evaluate(grid.x(i));
            REQUIRE(a.p == b.p);
            REQUIRE(a.q == b.q);
        }
    });
}

TEST_CASE("potential_from_matrix_field") {
    const Grid grid(kPi, 101);
    std::vector<Mat2> zero(grid.size());
    const auto z = potential_from_matrix_field(zero, grid);
    CHECK(z.evaluate(1.0).p == 0.0);

    std::vector<Mat2> field(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = 1.0 / (kPi + grid.x(i));
        field[i] = {0.0, q, q, 0.0};
    }
    const auto pot = potential_from_matrix_field(field, grid);
    CHECK(pot.evaluate(grid.x(40)).q == doctest::Approx(1.0 / (kPi + grid.x(40))));

    field[7] = {1e-3, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(potential_from_matrix_field(field, grid), StructureError);
    CHECK_THROWS_AS(potential_from_matrix_field(std::vector<Mat2>(3), grid), ShapeError);
}

TEST_CASE("additive corrections") {
    const Grid grid(kPi, 11);
    const std::vector<double> dp(grid.size(), 0.25), dq(grid.size(), -0.5);
    const auto base = testsupport::bump_model();
    const auto once = base.with_correction(grid, dp, dq);
    const auto twice = once.with_correction(grid, dp, dq);
    const PQ b = base.evaluate(1.0), t = twice.evaluate(1.0);
    CHECK(t.p == doctest::Approx(b.p + 0.5));
    CHECK(t.q == doctest::Approx(b.q - 1.0));

    // sampled potentials fold the correction into their samples
    const auto s = CanonicalPotential::sampled(SampledField(grid, dp, dq)).with_correction(grid, dp, dq);
    CHECK_FALSE(s.correction().has_value());
    CHECK(s.evaluate(grid.x(3)).p == 0.5);

    // on a prefix of the grid the old correction is resampled exactly
    const Grid prefix(grid.x(6), 7);
    std::vector<double> ramp(grid.size());
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = std::sin(3.0 * grid.x(i));
    const auto r = base.with_correction(grid, ramp, dq).restricted(prefix.x_end());
    const auto r2 = r.with_correction(prefix, std::vector<double>(7, 0.0), std::vector<double>(7, 0.0));
    for (std::size_t i = 0; i < prefix.size(); ++i)
        CHECK(r2.evaluate(prefix.x(i)).p == doctest::Approx(r.evaluate(prefix.x(i)).p).epsilon(1e-15));
    CHECK_THROWS_AS(r.evaluate(grid.x(8)), DomainError);

    CHECK_THROWS_AS(base.with_correction(grid, std::vector<double>(3), dq), ShapeError);
}

TEST_CASE("spectrum table ordering") {
    SpectrumTable t(BoundaryParams(0, 0), "test");
    SpectralDatum d;
    d.a = d.b = 1.0;
    d.n = 0;
    d.lambda = 0.0;
    t.insert(d);
    d.n = 2;
    d.lambda = 2.0;
    t.insert(d);
    d.n = 1;
    d.lambda = 2.5;
    CHECK_THROWS_AS(t.insert(d), EnumerationError);
    d.lambda = 1.0;
    t.insert(d);
    CHECK(t.min_index() == 0);
    CHECK(t.max_index() == 2);
    CHECK_THROWS_AS(t.at(5), RangeError);
    d.n = 3;
    d.lambda = 3.0;
    d.a = 0.0;
    CHECK_THROWS_AS(t.insert(d), PreconditionError);
}

TEST_CASE("schedule staging") {
    const int expect[] = {0, 1, -1, 2, -2, 3, -3};
    for (int m = 0; m < 7; ++m) CHECK(DeformationSchedule::stage_target(m) == expect[m]);
    CHECK(DeformationSchedule::stages_needed({{0, 1.0}}) == 1);
    CHECK(DeformationSchedule::stages_needed({{-1, 1.0}}) == 3);
    CHECK(DeformationSchedule::stages_needed({{2, 1.0}, {0, 0.5}}) == 4);
    DeformationSchedule s;
    s.t[1] = 0.3;
    CHECK(s.t_at(1) == 0.3);
    CHECK(s.t_at(4) == 0.0);
}

TEST_CASE("surgery step gamma") {
    CHECK(SurgeryStep{SurgeryOp::add, 0.0, 0.0, 1.0}.gamma() == 1.0);
    CHECK(SurgeryStep{SurgeryOp::remove, 0.0, 0.0, 1.0}.gamma() == -1.0);
    CHECK(SurgeryStep{SurgeryOp::scale, 0.0, 0.5, 1.0}.gamma() == doctest::Approx(std::exp(-0.5) - 1.0));
}

TEST_CASE("perturbation validation") {
    CHECK_THROWS_AS(Perturbation({1.0}, 0.0, Channel::p), DomainError);
    CHECK_THROWS_AS(Perturbation({NAN}, 1e-3, Channel::q), DomainError);
}
