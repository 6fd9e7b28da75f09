#include "dirac/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "dirac/parallel.hpp"

namespace dirac::spectrum {

namespace {

bool opposite(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

std::size_t argmax_norm(const VectorSolution& s) {
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t i = 0; i < s.y1.size(); ++i) {
        const double v = s.at(i).norm2();
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    return best;
}

/// Index of the root nearest zero; on a tie within 1e-12 the negative one.
std::size_t nearest_zero(const std::vector<double>& roots) {
    std::size_t k = 0;
    for (std::size_t j = 1; j < roots.size(); ++j) {
        const double d = std::abs(roots[j]) - std::abs(roots[k]);
        if (d < -1e-12 || (std::abs(d) <= 1e-12 && roots[j] < roots[k])) k = j;
    }
    return k;
}

}  // namespace

double refine_root(const ode::Discretization& disc, const BoundaryParams& boundary, double lo,
                   double hi, double refine_tol) {
    auto chi = [&](double l) { return ode::characteristic(disc, boundary.alpha(), boundary.beta(), l); };
    const double flo = chi(lo);
    const double fhi = chi(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!opposite(flo, fhi)) throw RootError("refine_root: interval does not bracket a sign change");
    std::uintmax_t max_iter = 200;
    // absolute tolerance, floored a few ulps above |lambda| so tight requests terminate
    auto tol = [refine_tol](double a, double b) {
        const double ulps = 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
        return std::abs(b - a) <= std::max(refine_tol, ulps);
    };
    const auto [a, b] = boost::math::tools::toms748_solve(chi, lo, hi, flo, fhi, tol, max_iter);
    if (max_iter >= 200) {
        std::ostringstream os;
        os << "root refinement in [" << lo << ", " << hi << "] did not converge";
        throw RootError(os.str());
    }
    return 0.5 * (a + b);
}

std::vector<double> roots_in_range(const ode::Discretization& disc, const BoundaryParams& boundary,
                                   double lo, double hi, double scan_step, double refine_tol) {
    if (!(hi > lo) || !(scan_step > 0.0)) throw RangeError("empty scan range");
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / scan_step)) + 1;
    std::vector<double> lam(n), chi(n);
    for (std::size_t j = 0; j < n; ++j) lam[j] = j + 1 == n ? hi : lo + static_cast<double>(j) * scan_step;
    parallel_for(n, [&](std::size_t j) {
        chi[j] = ode::characteristic(disc, boundary.alpha(), boundary.beta(), lam[j]);
    });

    std::vector<std::pair<double, double>> brackets;
    std::vector<double> roots;
    for (std::size_t j = 0; j < n; ++j) {
        if (chi[j] == 0.0) {
            roots.push_back(lam[j]);
            continue;
        }
        if (j + 1 < n && opposite(chi[j], chi[j + 1])) brackets.emplace_back(lam[j], lam[j + 1]);
    }
    std::vector<double> refined(brackets.size());
    parallel_for(brackets.size(), [&](std::size_t k) {
        refined[k] = refine_root(disc, boundary, brackets[k].first, brackets[k].second, refine_tol);
    });
    roots.insert(roots.end(), refined.begin(), refined.end());
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) { return std::abs(a - b) <= refine_tol; }),
                roots.end());
    return roots;
}

double track_root(const ode::Discretization& disc, const BoundaryParams& boundary, double seed,
                  double max_radius, double refine_tol) {
    auto chi = [&](double l) { return ode::characteristic(disc, boundary.alpha(), boundary.beta(), l); };
    const double f0 = chi(seed);
    if (f0 == 0.0) return seed;
    double left_inner = seed, f_left = f0;
    double right_inner = seed, f_right = f0;
    for (double r = 1e-7;; r *= 4.0) {
        r = std::min(r, max_radius);
        const double lo = seed - r, hi = seed + r;
        const double flo = chi(lo), fhi = chi(hi);
        std::vector<double> found;
        if (flo == 0.0 || opposite(flo, f_left))
            found.push_back(refine_root(disc, boundary, lo, left_inner, refine_tol));
        if (fhi == 0.0 || opposite(fhi, f_right))
            found.push_back(refine_root(disc, boundary, right_inner, hi, refine_tol));
        if (!found.empty()) {
            return *std::min_element(found.begin(), found.end(), [&](double a, double b) {
                return std::abs(a - seed) < std::abs(b - seed);
            });
        }
        if (r >= max_radius) break;
        left_inner = lo;
        f_left = flo;
        right_inner = hi;
        f_right = fhi;
    }
    std::ostringstream os;
    os.precision(17);
    os << "no eigenvalue within " << max_radius << " of " << seed;
    throw TrackingError(os.str());
}

VectorSolution scaled(const VectorSolution& s, double k) {
    VectorSolution out = s;
    for (std::size_t i = 0; i < out.y1.size(); ++i) {
        out.y1[i] *= k;
        out.y2[i] *= k;
        out.dy1[i] *= k;
        out.dy2[i] *= k;
        out.norm_accum[i] *= k * k;
    }
    return out;
}

EigenPair eigenpair(const ode::Discretization& disc, const BoundaryParams& boundary, double lambda) {
    const VectorSolution phi = ode::integrate_left(disc, boundary.alpha(), lambda);
    const VectorSolution psi = ode::integrate_right(disc, boundary.beta(), lambda);
    // phi is trustworthy left of its peak, psi right of its peak
    const std::size_t k = std::min(argmax_norm(phi), argmax_norm(psi));
    const Vec2 u = phi.at(k), v = psi.at(k);
    const double cross = (u.y1 * v.y2 - u.y2 * v.y1) / std::sqrt(u.norm2() * v.norm2());
    if (!(std::abs(cross) <= 1e-6)) {
        std::ostringstream os;
        os.precision(17);
        os << "lambda = " << lambda << " is not an eigenvalue (left/right mismatch " << cross << ")";
        throw PreconditionError(os.str());
    }
    const double ratio = (u.y1 * v.y1 + u.y2 * v.y2) / v.norm2();

    EigenPair out{lambda, 0.0, 0.0, ratio, phi};
    VectorSolution& e = out.phi;
    for (std::size_t i = k + 1; i < e.y1.size(); ++i) {
        e.y1[i] = ratio * psi.y1[i];
        e.y2[i] = ratio * psi.y2[i];
        e.dy1[i] = ratio * psi.dy1[i];
        e.dy2[i] = ratio * psi.dy2[i];
        e.norm_accum[i] = phi.norm_accum[k] + ratio * ratio * (psi.norm_accum[i] - psi.norm_accum[k]);
    }
    out.a = e.total_norm();
    out.b = out.a / (ratio * ratio);
    return out;
}

SpectrumTable locate_eigenvalues(const ode::Discretization& disc, const BoundaryParams& boundary,
                                 const SearchWindow& window, const std::string& provenance) {
    if (window.n_min > window.n_max) throw RangeError("empty index range");
    const double shift = SearchWindow::guess_shift(boundary);
    double lo = std::min(window.n_min, 0) + shift - 1.0;
    double hi = std::max(window.n_max, 0) + shift + 1.0;

    std::vector<double> roots;
    std::size_t k0 = 0;
    bool complete = false;
    for (int attempt = 0; attempt < 6 && !complete; ++attempt) {
        roots = roots_in_range(disc, boundary, lo, hi, window.scan_step, window.refine_tol);
        if (roots.empty()) {
            lo -= 2.0;
            hi += 2.0;
            continue;
        }
        k0 = nearest_zero(roots);
        if (std::abs(roots[k0]) > std::min(-lo, hi)) {
            // a root nearer zero could sit just outside the scanned range
            if (-lo < hi)
                lo -= 2.0;
            else
                hi += 2.0;
            continue;
        }
        const int have_min = -static_cast<int>(k0);
        const int have_max = static_cast<int>(roots.size() - 1 - k0);
        complete = true;
        if (have_min > window.n_min) {
            lo -= (have_min - window.n_min) + 1.0;
            complete = false;
        }
        if (have_max < window.n_max) {
            hi += (window.n_max - have_max) + 1.0;
            complete = false;
        }
    }
    if (!complete) {
        std::ostringstream os;
        os.precision(10);
        os << "could not enumerate indices [" << window.n_min << ", " << window.n_max
           << "]; roots found in [" << lo << ", " << hi << "]:";
        for (double r : roots) os << ' ' << r;
        throw EnumerationError(os.str());
    }
    if (window.check_spacing) {
        for (std::size_t j = 0; j + 1 < roots.size(); ++j) {
            if (roots[j + 1] - roots[j] > 2.5) {
                std::ostringstream os;
                os.precision(10);
                os << "gap " << roots[j + 1] - roots[j] << " between roots " << roots[j] << " and "
                   << roots[j + 1] << " suggests a missed eigenvalue; roots:";
                for (double r : roots) os << ' ' << r;
                throw EnumerationError(os.str());
            }
        }
    }

    std::vector<SpectralDatum> data;
    for (int n = window.n_min; n <= window.n_max; ++n) {
        SpectralDatum d;
        d.n = n;
        d.lambda = roots[static_cast<std::size_t>(static_cast<int>(k0) + n)];
        data.push_back(d);
    }
    parallel_for(data.size(), [&](std::size_t j) {
        const EigenPair pair = eigenpair(disc, boundary, data[j].lambda);
        data[j].a = pair.a;
        data[j].b = pair.b;
        data[j].r = data[j].lambda - (data[j].n + shift);
        data[j].c = pair.a - kPi;
    });

    SpectrumTable table(boundary, provenance);
    for (const auto& d : data) {
        table.insert(d);
        if ((d.n > 0 && d.lambda <= 0.0) || (d.n < 0 && d.lambda >= 0.0)) {
            std::ostringstream os;
            os.precision(10);
            os << "lambda_" << d.n << " = " << d.lambda << " has the opposite sign to its index";
            table.add_warning(os.str());
        }
    }
    return table;
}

SpectrumTable locate_eigenvalues(const CanonicalPotential& pot, const BoundaryParams& boundary,
                                 const SearchWindow& window, const Grid& grid) {
    return locate_eigenvalues(ode::Discretization(pot, grid), boundary, window, pot.describe());
}

std::pair<double, double> norming_constants(const CanonicalPotential& pot,
                                            const BoundaryParams& boundary, double lambda,
                                            const Grid& grid) {
    const EigenPair pair = eigenpair(ode::Discretization(pot, grid), boundary, lambda);
    return {pair.a, pair.b};
}

VectorSolution normalized_eigenfunction(const ode::Discretization& disc,
                                        const BoundaryParams& boundary, const SpectralDatum& datum,
                                        Side side) {
    const EigenPair pair = eigenpair(disc, boundary, datum.lambda);
    const double k = 1.0 / std::sqrt(pair.a);
    return scaled(pair.phi, side == Side::left ? k : std::copysign(k, pair.ratio));
}

VectorSolution normalized_eigenfunction(const CanonicalPotential& pot,
                                        const BoundaryParams& boundary, const SpectralDatum& datum,
                                        Side side, const Grid& grid) {
    return normalized_eigenfunction(ode::Discretization(pot, grid), boundary, datum, side);
}

RemainderReport asymptotic_remainders(const SpectrumTable& table, int tail_from) {
    RemainderReport rep;
    rep.tail_from = tail_from;
    for (const auto& [n, d] : table.data()) {
        rep.rows.push_back({n, d.r, d.c});
        rep.sum_c2 += d.c * d.c;
        if (std::abs(n) >= tail_from) rep.max_tail_r = std::max(rep.max_tail_r, std::abs(d.r));
    }
    return rep;
}

double max_abs_remainder(const SpectrumTable& table, int lo, int hi) {
    double m = 0.0;
    for (const auto& [n, d] : table.data())
        if (std::abs(n) >= lo && std::abs(n) <= hi) m = std::max(m, std::abs(d.r));
    return m;
}

double estimate_boundary_alpha(const SpectrumTable& table, int tail_from) {
    if (table.boundary().beta() != 0.0)
        throw PreconditionError("boundary angle estimate needs a table solved with beta = 0");
    double sum = 0.0;
    int count = 0;
    for (const auto& [n, d] : table.data()) {
        if (std::abs(n) < tail_from) continue;
        sum += static_cast<double>(n) - d.lambda;
        ++count;
    }
    if (count == 0)
        throw RangeError("no stored indices with |n| >= " + std::to_string(tail_from));
    return kPi * sum / count;
}

}  // namespace dirac::spectrum
