#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbs/model.hpp"
#include "mbs/parallel.hpp"

namespace mbs {

enum class FringeMethod { quadrature, montecarlo, closed_perp };

struct PatternMeta {
  double tau = 0.0;
  double gamma_wp = 0.0;
  double s0 = 0.0;
  Geometry geometry;
  CloudSpec cloud;
};

// Angular fringe pattern I(theta)/(N I_a). std_error is filled only by the
// Monte Carlo backend (empty otherwise).
struct FringePattern {
  std::vector<double> theta_grid;  // radians, ascending
  std::vector<double> intensity;   // finite, >= 0
  std::vector<double> std_error;
  PatternMeta meta;
};

struct QuadratureReport {
  double value = 0.0;
  double est_error = 0.0;  // |value - previous ladder rung|
  int n_outer = 0;
  int n_inner = 0;
};

struct MonteCarloResult {
  double value = 0.0;
  double std_error = 0.0;
};

// Gaussian-weighted cloud intensity at detection angle theta, by a two-scale
// scheme: outer composite Simpson nodes over z in [-h - 6 s_z, -h + 6 s_z]
// sample the Gaussian envelope and the slow beat cos(2 k z cos(theta)) written
// relative to the grating phase; at each outer node the fast grating-periodic
// content (period pi/(k cos(theta0)) in z) is averaged over one local period
// with n_inner equally spaced points. The resolution ladder starts at
// (n_inner, n_outer) = (64, 513) and doubles both until |value - previous|
// <= tol; two doublings exhausted -> ConvergenceError.
QuadratureReport cloud_intensity_quadrature(double theta, double tau,
                                            double gamma_wp,
                                            const Geometry& geom,
                                            const CloudSpec& cloud, double s0,
                                            double tol);

// Independent check: draws positions from the Gaussian density (x, y are
// drawn but unused since the intensity depends on z only) and averages the
// full nonlinear single-atom intensity. Counter-based RNG keyed on
// (seed, sample index) makes the result bit-identical for any thread count.
MonteCarloResult cloud_intensity_montecarlo(double theta, double tau,
                                            double gamma_wp,
                                            const Geometry& geom,
                                            const CloudSpec& cloud, double s0,
                                            std::int64_t n_samples,
                                            std::uint64_t seed,
                                            ExecutionPolicy policy =
                                                ExecutionPolicy::parallel);

// Closed form for the perpendicular configuration (gamma_wp = pi/4), where
// the local saturation s = 2 s0 is uniform:
//   I/(N I_a) = s/(1+s) [1 + (1/2) g1(s, tau) e^{-2 k^2 s_z^2 dc^2}
//                            cos(2 k h dc)],   dc = cos(theta) - cos(theta0).
// Valid near the backscattering direction; DomainError if |theta - theta0|
// exceeds 0.05 rad.
double cloud_intensity_perp_closed(double theta, double tau,
                                   const Geometry& geom,
                                   const CloudSpec& cloud, double s0);

enum class BeatTerms {
  both,                 // exact two-term closed form
  retained_small_angle  // difference-frequency term only, linearized argument
};

// Closed form of the axial beat integral
//   integral dz G(z) cos(2 k z cos(theta0)) cos(2 k z cos(theta)),
// G = Normal(-h, s_z) density:
//   (1/2) e^{-2 k^2 s_z^2 (cos t + cos t0)^2} cos(2 k h (cos t + cos t0))
// + (1/2) e^{-2 k^2 s_z^2 (cos t - cos t0)^2} cos(2 k h (cos t - cos t0)).
// The first (sum-frequency) term underflows for k s_z >> 1; the
// retained_small_angle variant keeps only the second with the linearized
// argument cos(theta) - cos(theta0) ~ -theta0 (theta - theta0).
double axial_beat_integral(double theta, const Geometry& geom,
                           const CloudSpec& cloud,
                           BeatTerms terms = BeatTerms::both);

// Dilute-sample validity warnings (empty when all checks pass):
// peak density n0/k^3 = N/((2 pi)^{3/2} s_z s_r^2 k^3) must stay <= 0.01 and
// the resonant optical depth b0 = 3 N/(k^2 s_r^2) must stay << 1.
std::vector<std::string> cloud_guards(const Geometry& geom,
                                      const CloudSpec& cloud);

// Sweep wrapper over an ascending theta grid; the grid must resolve the
// fringe period pi/(theta0 k h) with >= 12 points per period (DomainError
// otherwise). Per-theta evaluations run in parallel; results are
// deterministic for a fixed seed.
FringePattern fringe_pattern(const std::vector<double>& theta_grid, double tau,
                             double gamma_wp, const Geometry& geom,
                             const CloudSpec& cloud, double s0,
                             FringeMethod method, double tol = 1e-8,
                             std::int64_t n_samples = 100000,
                             std::uint64_t seed = 1,
                             ExecutionPolicy policy =
                                 ExecutionPolicy::parallel);

}  // namespace mbs
