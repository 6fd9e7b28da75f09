#include "dirac/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dirac {

void check_angle(double angle, const char* what) {
    if (!std::isfinite(angle) || !(angle > -kPi / 2) || angle > kPi / 2) {
        std::ostringstream os;
        os << what << " = " << angle << " outside (-pi/2, pi/2]";
        throw DomainError(os.str());
    }
}

BoundaryParams::BoundaryParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    check_angle(alpha, "alpha");
    check_angle(beta, "beta");
}

Grid::Grid(double x_end, std::size_t n_points) : x_end_(x_end), n_(n_points), h_(0.0) {
    if (!(x_end > 0.0) || !std::isfinite(x_end)) throw DomainError("grid end must be positive");
    if (n_points < 2) throw DomainError("grid needs at least 2 points");
    h_ = x_end / static_cast<double>(n_points - 1);
}

Grid Grid::with_max_spacing(double x_end, double max_spacing) {
    if (!(max_spacing > 0.0)) throw DomainError("grid spacing must be positive");
    const auto intervals = static_cast<std::size_t>(std::ceil(x_end / max_spacing - 1e-9));
    return Grid(x_end, std::max<std::size_t>(intervals, 1) + 1);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
}

const char* to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::zero: return "zero";
        case PotentialKind::constant: return "constant";
        case PotentialKind::fourier: return "fourier";
        case PotentialKind::gauss_bumps: return "gauss-bumps";
        case PotentialKind::sampled: return "sampled";
    }
    return "?";
}

SampledField::SampledField(Grid g, std::vector<double> p_values, std::vector<double> q_values)
    : grid(g), p(std::move(p_values)), q(std::move(q_values)) {
    if (p.size() != grid.size() || q.size() != grid.size())
        throw ShapeError("sampled field size does not match its grid");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!std::isfinite(p[i]) || !std::isfinite(q[i]))
            throw DomainError("sampled potential values must be finite");
}

PQ SampledField::at(double x) const {
    const std::size_t n = grid.size();
    if (x <= 0.0) return {p.front(), q.front()};
    if (x >= grid.x_end()) return {p.back(), q.back()};
    const double s = x / grid.spacing();
    const double nearest = std::round(s);
    if (std::abs(s - nearest) < 1e-9) {
        const auto k = std::min(static_cast<std::size_t>(nearest), n - 1);
        return {p[k], q[k]};
    }
    auto i = static_cast<std::size_t>(s);
    if (i >= n - 1) i = n - 2;
    const double w = s - static_cast<double>(i);
    return {p[i] + w * (p[i + 1] - p[i]), q[i] + w * (q[i + 1] - q[i])};
}

CanonicalPotential::CanonicalPotential(PotentialKind kind, double domain_end)
    : kind_(kind), domain_end_(domain_end) {
    if (!(domain_end > 0.0) || !std::isfinite(domain_end))
        throw DomainError("potential domain end must be positive");
}

CanonicalPotential CanonicalPotential::zero(double domain_end) {
    return CanonicalPotential(PotentialKind::zero, domain_end);
}

CanonicalPotential CanonicalPotential::constant(double p0, double q0, double domain_end) {
    CanonicalPotential pot(PotentialKind::constant, domain_end);
    pot.p0_ = p0;
    pot.q0_ = q0;
    return pot;
}

CanonicalPotential CanonicalPotential::fourier(FourierSeries series, double domain_end) {
    CanonicalPotential pot(PotentialKind::fourier, domain_end);
    pot.series_ = std::move(series);
    return pot;
}

CanonicalPotential CanonicalPotential::gauss_bumps(std::vector<Bump> bumps, double domain_end) {
    for (const auto& b : bumps)
        if (!(b.width > 0.0)) throw DomainError("bump width must be positive");
    CanonicalPotential pot(PotentialKind::gauss_bumps, domain_end);
    pot.bumps_ = std::move(bumps);
    return pot;
}

CanonicalPotential CanonicalPotential::sampled(SampledField samples) {
    CanonicalPotential pot(PotentialKind::sampled, samples.grid.x_end());
    pot.samples_ = std::move(samples);
    return pot;
}

namespace {

double trig_sum(const std::vector<double>& cos_c, const std::vector<double>& sin_c, double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < cos_c.size(); ++k) s += cos_c[k] * std::cos(static_cast<double>(k) * x);
    for (std::size_t k = 0; k < sin_c.size(); ++k) s += sin_c[k] * std::sin(static_cast<double>(k + 1) * x);
    return s;
}

}  // namespace

PQ CanonicalPotential::family_value(double x) const {
    switch (kind_) {
        case PotentialKind::zero: return {};
        case PotentialKind::constant: return {p0_, q0_};
        case PotentialKind::fourier:
            return {trig_sum(series_.p_cos, series_.p_sin, x), trig_sum(series_.q_cos, series_.q_sin, x)};
        case PotentialKind::gauss_bumps: {
            PQ v;
            for (const auto& b : bumps_) {
                const double z = (x - b.center) / b.width;
                const double g = b.amplitude * std::exp(-0.5 * z * z);
                (b.channel == Channel::p ? v.p : v.q) += g;
            }
            return v;
        }
        case PotentialKind::sampled: return samples_->at(x);
    }
    return {};
}

PQ CanonicalPotential::evaluate(double x) const {
    const double slack = 1e-12 * domain_end_;
    if (!(x >= -slack && x <= domain_end_ + slack)) {
        std::ostringstream os;
        os << "x = " << x << " outside potential domain [0, " << domain_end_ << "]";
        throw DomainError(os.str());
    }
    PQ v = family_value(x);
    if (correction_) {
        const PQ d = correction_->at(x);
        v.p += d.p;
        v.q += d.q;
    }
    return v;
}

CanonicalPotential CanonicalPotential::with_correction(const Grid& grid, std::span<const double> dp,
                                                       std::span<const double> dq) const {
    if (dp.size() != grid.size() || dq.size() != grid.size())
        throw ShapeError("correction size does not match its grid");
    CanonicalPotential out = *this;
    if (kind_ == PotentialKind::sampled && samples_->grid == grid && !correction_) {
        auto p = samples_->p;
        auto q = samples_->q;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] += dp[i];
            q[i] += dq[i];
        }
        out.samples_ = SampledField(grid, std::move(p), std::move(q));
        return out;
    }
    std::vector<double> p(dp.begin(), dp.end()), q(dq.begin(), dq.end());
    if (correction_ && correction_->grid == grid) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] += correction_->p[i];
            q[i] += correction_->q[i];
        }
    } else if (correction_) {
        // resample the old correction; exact when the new nodes are old nodes
        for (std::size_t i = 0; i < p.size(); ++i) {
            const PQ c = correction_->at(grid.x(i));
            p[i] += c.p;
            q[i] += c.q;
        }
    }
    out.correction_ = SampledField(grid, std::move(p), std::move(q));
    return out;
}

CanonicalPotential CanonicalPotential::restricted(double new_end) const {
    if (!(new_end > 0.0) || new_end > domain_end_ * (1 + 1e-12))
        throw DomainError("restricted window must lie inside the potential domain");
    CanonicalPotential out = *this;
    out.domain_end_ = new_end;
    return out;
}

std::string CanonicalPotential::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind_) << " on [0, " << domain_end_ << "]";
    switch (kind_) {
        case PotentialKind::constant: os << " p0=" << p0_ << " q0=" << q0_; break;
        case PotentialKind::gauss_bumps: os << " bumps=" << bumps_.size(); break;
        case PotentialKind::sampled: os << " nodes=" << samples_->grid.size(); break;
        default: break;
    }
    if (correction_) os << " + sampled correction (" << correction_->grid.size() << " nodes)";
    return os.str();
}

PQ evaluate_potential(const CanonicalPotential& pot, double x) { return pot.evaluate(x); }

std::vector<Mat2> assemble_matrix_field(const CanonicalPotential& pot, const Grid& grid) {
    std::vector<Mat2> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = pot.matrix(grid.x(i));
    return out;
}

CanonicalPotential potential_from_matrix_field(std::span<const Mat2> field, const Grid& grid) {
    if (field.size() != grid.size()) throw ShapeError("matrix field size does not match grid");
    constexpr double tol = 1e-10;
    std::vector<double> p(field.size()), q(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        const Mat2& m = field[i];
        if (std::abs(m.a12 - m.a21) > tol || std::abs(m.trace()) > tol) {
            std::ostringstream os;
            os << "matrix at x = " << grid.x(i) << " is not canonical (asymmetry "
               << std::abs(m.a12 - m.a21) << ", trace " << m.trace() << ")";
            throw StructureError(os.str());
        }
        p[i] = m.a11;
        q[i] = m.a12;
    }
    return CanonicalPotential::sampled(SampledField(grid, std::move(p), std::move(q)));
}

VectorSolution::VectorSolution(Grid g, double lam)
    : grid(g), lambda(lam), y1(g.size()), y2(g.size()), dy1(g.size()), dy2(g.size()),
      norm_accum(g.size()) {}

SpectrumTable::SpectrumTable(BoundaryParams boundary, std::string provenance)
    : boundary_(boundary), provenance_(std::move(provenance)) {}

void SpectrumTable::insert(const SpectralDatum& d) {
    if (!(d.a > 0.0) || !(d.b > 0.0)) throw PreconditionError("norming constants must be positive");
    auto next = data_.lower_bound(d.n);
    if (next != data_.end() && next->first == d.n) next = data_.erase(next);
    if (next != data_.end() && !(d.lambda < next->second.lambda))
        throw EnumerationError("spectrum table would not be strictly increasing at index " +
                               std::to_string(d.n));
    if (next != data_.begin()) {
        auto prev = std::prev(next);
        if (!(prev->second.lambda < d.lambda))
            throw EnumerationError("spectrum table would not be strictly increasing at index " +
                                   std::to_string(d.n));
    }
    data_.emplace_hint(next, d.n, d);
}

const SpectralDatum& SpectrumTable::at(int n) const {
    auto it = data_.find(n);
    if (it == data_.end()) throw RangeError("index " + std::to_string(n) + " not in spectrum table");
    return it->second;
}

int SpectrumTable::min_index() const {
    if (data_.empty()) throw RangeError("empty spectrum table");
    return data_.begin()->first;
}

int SpectrumTable::max_index() const {
    if (data_.empty()) throw RangeError("empty spectrum table");
    return data_.rbegin()->first;
}

int DeformationSchedule::stage_target(int m) { return (m % 2 != 0) ? (m + 1) / 2 : -m / 2; }

int DeformationSchedule::stages_needed(const std::map<int, double>& t) {
    int stages = 0;
    for (const auto& [n, tn] : t) {
        // inverse of stage_target: n > 0 -> 2n - 1, n <= 0 -> -2n
        const int m = n > 0 ? 2 * n - 1 : -2 * n;
        stages = std::max(stages, m + 1);
    }
    return stages;
}

double DeformationSchedule::t_at(int n) const {
    auto it = t.find(n);
    return it == t.end() ? 0.0 : it->second;
}

const char* to_string(SurgeryOp op) {
    switch (op) {
        case SurgeryOp::add: return "add";
        case SurgeryOp::remove: return "remove";
        case SurgeryOp::scale: return "scale";
    }
    return "?";
}

double SurgeryStep::gamma() const {
    switch (op) {
        case SurgeryOp::add: return 1.0;
        case SurgeryOp::remove: return -1.0;
        case SurgeryOp::scale: return std::expm1(-t);
    }
    return 0.0;
}

Perturbation::Perturbation(std::vector<double> direction, double step, Channel ch)
    : v(std::move(direction)), eps(step), channel(ch) {
    if (!(eps > 0.0)) throw DomainError("perturbation step must be positive");
    for (double x : v)
        if (!std::isfinite(x)) throw DomainError("perturbation direction must be finite");
}

}  // namespace dirac
