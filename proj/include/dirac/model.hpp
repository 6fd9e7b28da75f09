#pragma once

// Domain types for canonical Dirac systems  B y' + Omega(x) y = lambda y,
// Omega = [[p, q], [q, -p]].  Everything here is an immutable value type.

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dirac/errors.hpp"

namespace dirac {

inline constexpr double kPi = 3.14159265358979323846;

template <class T>
struct Matrix2 {
    T a11{}, a12{}, a21{}, a22{};

    friend constexpr Matrix2 operator+(const Matrix2& l, const Matrix2& r) {
        return {l.a11 + r.a11, l.a12 + r.a12, l.a21 + r.a21, l.a22 + r.a22};
    }
    friend constexpr Matrix2 operator-(const Matrix2& l, const Matrix2& r) {
        return {l.a11 - r.a11, l.a12 - r.a12, l.a21 - r.a21, l.a22 - r.a22};
    }
    friend constexpr Matrix2 operator*(const Matrix2& l, const Matrix2& r) {
        return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
                l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
    }
    friend constexpr Matrix2 operator*(T s, const Matrix2& m) {
        return {s * m.a11, s * m.a12, s * m.a21, s * m.a22};
    }
    friend constexpr Matrix2 operator-(const Matrix2& m) { return {-m.a11, -m.a12, -m.a21, -m.a22}; }
    friend constexpr bool operator==(const Matrix2&, const Matrix2&) = default;

    constexpr T trace() const { return a11 + a22; }
    constexpr Matrix2 transposed() const { return {a11, a21, a12, a22}; }
    static constexpr Matrix2 identity() { return {T(1), T(0), T(0), T(1)}; }
};

using Mat2 = Matrix2<double>;
using CMat2 = Matrix2<std::complex<double>>;

struct Vec2 {
    double y1{}, y2{};
    double norm2() const { return y1 * y1 + y2 * y2; }
};

inline Vec2 operator*(const Mat2& m, const Vec2& v) {
    return {m.a11 * v.y1 + m.a12 * v.y2, m.a21 * v.y1 + m.a22 * v.y2};
}

/// The fixed matrices of the canonical system. Labels follow the usual
/// convention in this field: sigma2 = diag(1,-1) and sigma3 is the real
/// off-diagonal flip, so Omega = sigma2 * p + sigma3 * q.
struct CanonicalMatrices {
    static constexpr Mat2 B{0.0, 1.0, -1.0, 0.0};
    static constexpr Mat2 E = Mat2::identity();
    static CMat2 sigma1() { return {0.0, {0.0, 1.0}, {0.0, -1.0}, 0.0}; }
    static constexpr Mat2 sigma2{1.0, 0.0, 0.0, -1.0};
    static constexpr Mat2 sigma3{0.0, 1.0, 1.0, 0.0};
};

/// Lift a real matrix into the complex one, for identities mixing sigma1.
inline CMat2 complexify(const Mat2& m) { return {m.a11, m.a12, m.a21, m.a22}; }

/// Boundary angles, both in (-pi/2, pi/2].
class BoundaryParams {
public:
    BoundaryParams() = default;
    BoundaryParams(double alpha, double beta);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

private:
    double alpha_ = 0.0;
    double beta_ = 0.0;
};

/// Checks the half-open angle range; throws DomainError naming `what`.
void check_angle(double angle, const char* what);

/// Uniform grid on [0, x_end]; first node exactly 0, last node exactly x_end.
class Grid {
public:
    Grid(double x_end, std::size_t n_points);

    /// Smallest uniform grid on [0, x_end] with spacing <= max_spacing.
    static Grid with_max_spacing(double x_end, double max_spacing);
    /// 4001 nodes on [0, pi].
    static Grid default_interval() { return Grid(kPi, 4001); }

    double x_end() const { return x_end_; }
    std::size_t size() const { return n_; }
    double spacing() const { return h_; }
    double x(std::size_t i) const { return i + 1 == n_ ? x_end_ : static_cast<double>(i) * h_; }
    std::vector<double> nodes() const;

    friend bool operator==(const Grid& l, const Grid& r) {
        return l.n_ == r.n_ && l.x_end_ == r.x_end_;
    }

private:
    double x_end_;
    std::size_t n_;
    double h_;
};

struct PQ {
    double p{}, q{};
};

inline Mat2 canonical_matrix(PQ v) { return {v.p, v.q, v.q, -v.p}; }

enum class Channel { p, q };

enum class PotentialKind { zero, constant, fourier, gauss_bumps, sampled };

const char* to_string(PotentialKind kind);

/// Gaussian bump amplitude * exp(-(x - center)^2 / (2 width^2)) in one channel.
struct Bump {
    Channel channel = Channel::p;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
};

/// Trigonometric polynomial per channel. cos coefficients are indexed from
/// k = 0, sin coefficients from k = 1 (sin_coeffs[0] multiplies sin(x)).
struct FourierSeries {
    std::vector<double> p_cos, p_sin, q_cos, q_sin;
};

/// (p, q) samples on a uniform grid, linearly interpolated and clamped.
struct SampledField {
    Grid grid;
    std::vector<double> p, q;

    SampledField(Grid g, std::vector<double> p_values, std::vector<double> q_values);
    PQ at(double x) const;
};

class CanonicalPotential {
public:
    static CanonicalPotential zero(double domain_end = kPi);
    static CanonicalPotential constant(double p0, double q0, double domain_end = kPi);
    static CanonicalPotential fourier(FourierSeries series, double domain_end = kPi);
    static CanonicalPotential gauss_bumps(std::vector<Bump> bumps, double domain_end = kPi);
    static CanonicalPotential sampled(SampledField samples);

    PotentialKind kind() const { return kind_; }
    double domain_end() const { return domain_end_; }

    /// Throws DomainError outside [0, domain_end].
    PQ evaluate(double x) const;
    Mat2 matrix(double x) const { return canonical_matrix(evaluate(x)); }

    /// This potential plus a sampled additive correction (dp, dq) on `grid`.
    /// Corrections on the same grid accumulate, one on another grid is
    /// resampled at the new nodes; sampled potentials fold the correction
    /// into their samples.
    CanonicalPotential with_correction(const Grid& grid, std::span<const double> dp,
                                       std::span<const double> dq) const;

    /// Same potential seen on the shorter window [0, new_end].
    CanonicalPotential restricted(double new_end) const;

    const std::optional<SampledField>& correction() const { return correction_; }
    const std::optional<SampledField>& samples() const { return samples_; }
    double p0() const { return p0_; }
    double q0() const { return q0_; }
    const FourierSeries& series() const { return series_; }
    const std::vector<Bump>& bumps() const { return bumps_; }

    std::string describe() const;

private:
    CanonicalPotential(PotentialKind kind, double domain_end);
    PQ family_value(double x) const;

    PotentialKind kind_;
    double domain_end_;
    double p0_ = 0.0, q0_ = 0.0;
    FourierSeries series_;
    std::vector<Bump> bumps_;
    std::optional<SampledField> samples_;
    std::optional<SampledField> correction_;
};

PQ evaluate_potential(const CanonicalPotential& pot, double x);

/// Samples the potential at every grid node.
std::vector<Mat2> assemble_matrix_field(const CanonicalPotential& pot, const Grid& grid);

/// Sampled potential with p = entry(1,1), q = entry(1,2). Every matrix must be
/// symmetric and trace-free within 1e-10, otherwise StructureError.
CanonicalPotential potential_from_matrix_field(std::span<const Mat2> field, const Grid& grid);

/// Two-component solution sampled on a grid. dy holds the x-derivative at each
/// node (from the equation), norm_accum the running integral of |y|^2 from 0.
struct VectorSolution {
    Grid grid;
    double lambda = 0.0;
    std::vector<double> y1, y2, dy1, dy2, norm_accum;

    explicit VectorSolution(Grid g, double lam = 0.0);
    Vec2 at(std::size_t i) const { return {y1[i], y2[i]}; }
    Vec2 derivative_at(std::size_t i) const { return {dy1[i], dy2[i]}; }
    double total_norm() const { return norm_accum.back(); }
};

struct SpectralDatum {
    int n = 0;
    double lambda = 0.0;
    double a = 0.0;  ///< squared norm of the left-anchored eigenfunction
    double b = 0.0;  ///< squared norm of the right-anchored eigenfunction
    double r = 0.0;  ///< lambda - (n + (beta - alpha)/pi)
    double c = 0.0;  ///< a - pi
};

/// Eigenvalue records keyed by index. Construction and insertion keep the
/// table strictly increasing in index.
class SpectrumTable {
public:
    SpectrumTable(BoundaryParams boundary, std::string provenance);

    void insert(const SpectralDatum& d);
    const SpectralDatum& at(int n) const;
    bool contains(int n) const { return data_.count(n) != 0; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }
    int min_index() const;
    int max_index() const;

    const std::map<int, SpectralDatum>& data() const { return data_; }
    const BoundaryParams& boundary() const { return boundary_; }
    const std::string& provenance() const { return provenance_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    BoundaryParams boundary_;
    std::string provenance_;
    std::map<int, SpectralDatum> data_;
    std::vector<std::string> warnings_;
};

struct GradientBundle {
    double d_alpha = 0.0;
    std::optional<double> d_beta;  ///< absent in half-line window mode
    Grid grid;
    std::vector<double> d_p, d_q;
    std::vector<Mat2> matrix_field;  ///< B * dlambda/dOmega at each node
};

/// Sparse sequence {t_n} and the number of stages to apply.
struct DeformationSchedule {
    std::map<int, double> t;
    int max_stage = -1;

    /// Index touched by stage m: 0, 1, -1, 2, -2, ...
    static int stage_target(int m);
    /// Smallest stage count covering every stored index.
    static int stages_needed(const std::map<int, double>& t);
    double t_at(int n) const;
};

enum class SurgeryOp { add, remove, scale };

const char* to_string(SurgeryOp op);

struct SurgeryStep {
    SurgeryOp op = SurgeryOp::add;
    double nu = 0.0;
    double t = 0.0;  ///< scale steps only
    double c = 1.0;  ///< add and remove steps

    /// add -> 1, remove -> -1, scale -> e^{-t} - 1.
    double gamma() const;
};

struct SurgeryPlan {
    std::vector<SurgeryStep> steps;
    double window_end = 0.0;
};

/// Direction of a potential variation in one channel.
struct Perturbation {
    std::vector<double> v;
    double eps = 1e-4;
    Channel channel = Channel::p;

    Perturbation(std::vector<double> direction, double step, Channel ch);
};

}  // namespace dirac
