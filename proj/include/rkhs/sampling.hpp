#pragma once

// Seeded low-discrepancy samples of the disc, the ball and the sphere.

#include <cstdint>
#include <vector>

#include "rkhs/kernel.hpp"

namespace rkhs {

/// Halton sequence in [0,1)^dims with a Cranley-Patterson rotation drawn from seed.
class HaltonSequence {
public:
    HaltonSequence(int dims, std::uint64_t seed);

    int dims() const { return static_cast<int>(shift_.size()); }
    std::vector<double> next();

private:
    std::vector<double> shift_;
    std::uint64_t index_ = 1;
};

/// Points on the unit sphere of C^d: |z_j|^2 from simplex spacings, phases uniform.
std::vector<Point> sphere_sample(int d, int count, std::uint64_t seed);

/// Points in the ball of radius < 1 in C^d, uniform in volume.
std::vector<Point> ball_sample(int d, int count, double radius, std::uint64_t seed);

/// d = 1 case of ball_sample.
std::vector<Point> disc_sample(int count, double radius, std::uint64_t seed);

} // namespace rkhs
