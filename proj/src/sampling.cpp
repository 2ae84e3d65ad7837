#include "rkhs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rkhs/errors.hpp"

namespace rkhs {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                           59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(std::uint64_t i, int base)
{
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
    }
    return r;
}

// Unit-sphere point from 2d - 1 uniforms.
Point sphere_point(int d, const double* u)
{
    std::vector<double> cuts(u, u + d - 1);
    std::sort(cuts.begin(), cuts.end());
    Point z(d);
    double prev = 0.0;
    for (int j = 0; j < d; ++j) {
        const double next = j + 1 < d ? cuts[static_cast<std::size_t>(j)] : 1.0;
        const double theta = 2.0 * std::numbers::pi * u[d - 1 + j];
        z[j] = std::polar(std::sqrt(next - prev), theta);
        prev = next;
    }
    return z;
}

} // namespace

HaltonSequence::HaltonSequence(int dims, std::uint64_t seed)
{
    if (dims < 1 || dims > static_cast<int>(std::size(kPrimes)))
        throw ArgumentError("Halton dimension must lie in 1.." + std::to_string(std::size(kPrimes)));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < dims; ++k)
        shift_.push_back(unif(rng));
}

std::vector<double> HaltonSequence::next()
{
    std::vector<double> x(shift_.size());
    for (std::size_t k = 0; k < shift_.size(); ++k) {
        const double v = radical_inverse(index_, kPrimes[k]) + shift_[k];
        x[k] = v - std::floor(v);
    }
    ++index_;
    return x;
}

std::vector<Point> sphere_sample(int d, int count, std::uint64_t seed)
{
    if (d < 1 || count < 0)
        throw ArgumentError("sphere_sample needs d >= 1 and count >= 0");
    HaltonSequence h(2 * d - 1, seed);
    std::vector<Point> pts;
    for (int i = 0; i < count; ++i) {
        const auto u = h.next();
        pts.push_back(sphere_point(d, u.data()));
    }
    return pts;
}

std::vector<Point> ball_sample(int d, int count, double radius, std::uint64_t seed)
{
    if (d < 1 || count < 0)
        throw ArgumentError("ball_sample needs d >= 1 and count >= 0");
    if (!(radius > 0.0 && radius < 1.0))
        throw DomainError("sample radius must lie in (0, 1)");
    HaltonSequence h(2 * d, seed);
    std::vector<Point> pts;
    for (int i = 0; i < count; ++i) {
        const auto u = h.next();
        const double rho = radius * std::pow(u[static_cast<std::size_t>(2 * d - 1)], 1.0 / (2.0 * d));
        pts.push_back(rho * sphere_point(d, u.data()));
    }
    return pts;
}

std::vector<Point> disc_sample(int count, double radius, std::uint64_t seed)
{
    return ball_sample(1, count, radius, seed);
}

} // namespace rkhs
