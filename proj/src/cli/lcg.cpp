#include "dirac/cli/lcg.hpp"

#include <cmath>

namespace dirac::cli {

std::vector<double> trig_direction(const Grid& grid, Lcg& rng) {
    double a[6], b[6] = {0.0};
    for (double& c : a) c = rng.next();
    for (int k = 1; k <= 5; ++k) b[k] = rng.next();
    const double w = kPi / grid.x_end();
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = w * grid.x(i);
        double s = a[0];
        for (int k = 1; k <= 5; ++k) s += a[k] * std::cos(k * x) + b[k] * std::sin(k * x);
        v[i] = s;
    }
    return v;
}

}  // namespace dirac::cli
