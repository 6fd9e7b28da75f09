#pragma once

#include <cstdint>
#include <vector>

#include "dirac/model.hpp"

namespace dirac::cli {

/// x_{k+1} = 6364136223846793005 x_k + 1442695040888963407 (mod 2^64); each
/// draw advances once and returns x_{k+1} / 2^64 - 0.5.
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : x_(seed) {}
    std::uint64_t next_raw() {
        x_ = 6364136223846793005ULL * x_ + 1442695040888963407ULL;
        return x_;
    }
    double next() { return static_cast<double>(next_raw()) * 0x1p-64 - 0.5; }

private:
    std::uint64_t x_;
};

/// sum_{k=0..5} a_k cos(k pi x / X) + sum_{k=1..5} b_k sin(k pi x / X),
/// with a_0..a_5 then b_1..b_5 drawn in that order.
std::vector<double> trig_direction(const Grid& grid, Lcg& rng);

}  // namespace dirac::cli
