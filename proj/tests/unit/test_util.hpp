#pragma once

#include <cmath>
#include <cstdint>

#include "mbs/model.hpp"

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLambda = 780e-9;                 // m
inline const double kK = 2.0 * kPi / kLambda;             // rad/m
inline const double kTheta0 = 4.3 * kPi / 180.0;          // rad
inline constexpr double kH = 5e-3;                        // m
inline constexpr double kSz = 500e-6;                     // m
inline constexpr double kSr = 500e-6;                     // m

inline mbs::Geometry reference_geometry(double theta) {
  return mbs::make_geometry(kTheta0, theta, 0.0, kK, kH, 0.0);
}
inline mbs::Geometry reference_geometry() { return reference_geometry(kTheta0); }

inline mbs::CloudSpec reference_cloud() { return mbs::CloudSpec{10000, kSr, kSz}; }

// Longitudinal grating wavelength: the standing phase u = 2 k cos(theta0) z
// advances by 2 pi when z advances by lambda_star / 2.
inline double lambda_star(const mbs::Geometry& g) {
  return 2.0 * kPi / (g.k * std::cos(g.theta0));
}

// Envelope width and fringe period of the cloud pattern in theta.
inline double s_theta_pred(const mbs::Geometry& g, const mbs::CloudSpec& c) {
  return 1.0 / (2.0 * g.theta0 * g.k * c.s_z);
}
inline double period_pred(const mbs::Geometry& g) {
  return kPi / (g.theta0 * g.k * g.h);
}

// Deterministic splitmix64-based uniform generator for property tests.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double next() { return (next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }
};

}  // namespace testutil
