#pragma once

// Hand-rolled property-test helpers: a seeded generator for random small
// potentials and a loop that reports the failing case number.

#include <cmath>
#include <cstdint>
#include <random>

#include "dirac/model.hpp"
#include "doctest.h"

namespace testsupport {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    /// Smooth potential with sup-norm below ~0.6 on [0, end]; the families
    /// alternate so every one gets exercised.
    dirac::CanonicalPotential potential(double end = dirac::kPi) {
        using namespace dirac;
        switch (integer(0, 2)) {
            case 0: return CanonicalPotential::constant(uniform(-0.5, 0.5), uniform(-0.5, 0.5), end);
            case 1: {
                FourierSeries s;
                for (int k = 0; k < 3; ++k) {
                    s.p_cos.push_back(uniform(-0.15, 0.15));
                    s.q_cos.push_back(uniform(-0.15, 0.15));
                    s.p_sin.push_back(uniform(-0.15, 0.15));
                    s.q_sin.push_back(uniform(-0.15, 0.15));
                }
                return CanonicalPotential::fourier(s, end);
            }
            default: {
                std::vector<Bump> b;
                for (int k = 0; k < 2; ++k)
                    b.push_back({integer(0, 1) ? Channel::p : Channel::q, uniform(-0.5, 0.5),
                                 uniform(0.2, end - 0.2), uniform(0.25, 0.6)});
                return CanonicalPotential::gauss_bumps(b, end);
            }
        }
    }

private:
    std::mt19937_64 rng_;
};

template <class F>
void for_all(int cases, std::uint64_t seed, F&& body) {
    Gen g(seed);
    for (int i = 0; i < cases; ++i) {
        CAPTURE(i);
        body(g);
    }
}

inline dirac::CanonicalPotential bump_model(double end = dirac::kPi) {
    using namespace dirac;
    return CanonicalPotential::gauss_bumps({{Channel::p, 0.6, 1.2, 0.4}, {Channel::q, -0.4, 2.0, 0.3}}, end);
}

}  // namespace testsupport
