#pragma once

#include <cmath>
#include <random>

#include "euler3b/vec.hpp"

namespace e3b::testing {

/// Deterministic generator for property tests.
inline std::mt19937_64& rng()
{
    static std::mt19937_64 g(20240917);
    return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Vec3 planar(double r, double ang) { return {r * std::cos(ang), r * std::sin(ang), 0}; }

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace e3b::testing
