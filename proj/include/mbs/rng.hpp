#pragma once

#include <cmath>
#include <cstdint>

namespace mbs {

// Counter-based random numbers: every draw is a pure function of
// (seed, counter), so Monte Carlo results are bit-identical regardless of
// thread count or scheduling. splitmix64 is used as the bijective mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// uniform in (0, 1]; never returns 0 so log() below is safe
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = splitmix64(seed ^ splitmix64(counter));
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// standard normal via Box-Muller on two counter-derived uniforms
inline double counter_gaussian(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = counter_uniform(seed, 2 * counter);
  const double u2 = counter_uniform(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace mbs
