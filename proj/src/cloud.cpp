#include "mbs/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "mbs/emitter.hpp"
#include "mbs/errors.hpp"
#include "mbs/polarization.hpp"
#include "mbs/rng.hpp"
#include "mbs/scatterer.hpp"

namespace mbs {

namespace {

// Grating-period averages of the fast factors entering the cloud integral:
//   a0 = < s/(1+s) >
//   bc = < s/(1+s) g1(s, tau) X cos(u) >
//   bs = < s/(1+s) g1(s, tau) X sin(u) >
// over one period of u = 2 k cos(theta0) z. Equally spaced nodes on a
// periodic analytic integrand converge spectrally; n >= 64 is far past
// machine precision for the harmonics present at any s0.
struct PeriodAverages {
  double a0 = 0.0;
  double bc = 0.0;
  double bs = 0.0;
};

PeriodAverages period_averages(double tau, double gamma_wp, double s0, int n) {
  PeriodAverages avg;
  for (int j = 0; j < n; ++j) {
    const double u = 2.0 * M_PI * j / n;
    const double s = local_saturation_of_phase(u, gamma_wp, s0);
    if (s <= 0.0) continue;  // undriven node contributes nothing
    const double f = s / (1.0 + s);
    const double psi = f * g1_resonant(s, tau) * cross_overlap_of_phase(u, gamma_wp);
    avg.a0 += f;
    avg.bc += psi * std::cos(u);
    avg.bs += psi * std::sin(u);
  }
  avg.a0 /= n;
  avg.bc /= n;
  avg.bs /= n;
  return avg;
}

// One rung of the two-scale ladder: composite Simpson over the Gaussian
// envelope and the slow beat phase, with the fast content pre-averaged.
// Writing 2 k z cos(theta) = u + dq z with dq = 2 k (cos(theta) - cos(theta0))
// and averaging over u at fixed slow phase dq z gives the integrand
//   G(z) [a0 + bc cos(dq z) - bs sin(dq z)].
double two_scale_rung(double theta, double tau, double gamma_wp,
                      const Geometry& geom, const CloudSpec& cloud, double s0,
                      int n_inner, int n_outer) {
  const PeriodAverages avg = period_averages(tau, gamma_wp, s0, n_inner);
  const double dq = 2.0 * geom.k * (std::cos(theta) - std::cos(geom.theta0));
  const double lo = -geom.h - 6.0 * cloud.s_z;
  const double hi = -geom.h + 6.0 * cloud.s_z;
  const double step = (hi - lo) / (n_outer - 1);
  const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * cloud.s_z);

  double sum = 0.0;
  for (int j = 0; j < n_outer; ++j) {
    const double z = lo + step * j;
    const double g = norm * std::exp(-0.5 * std::pow((z + geom.h) / cloud.s_z, 2));
    const double slow = avg.a0 + avg.bc * std::cos(dq * z) - avg.bs * std::sin(dq * z);
    const double w = (j == 0 || j == n_outer - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    sum += w * g * slow;
  }
  return sum * step / 3.0;
}

}  // namespace

QuadratureReport cloud_intensity_quadrature(double theta, double tau,
                                            double gamma_wp,
                                            const Geometry& geom,
                                            const CloudSpec& cloud, double s0,
                                            double tol) {
  if (!(tol >= 1e-10 && tol <= 1e-2))
    throw DomainError("cloud_intensity_quadrature: tol must lie in [1e-10, 1e-2]");
  validate_cloud(cloud);
  if (!(s0 >= 0.0)) throw DomainError("cloud_intensity_quadrature: s0 must be >= 0");
  if (!(tau >= 0.0)) throw DomainError("cloud_intensity_quadrature: tau must be >= 0");

  int n_inner = 64;
  int n_outer = 513;
  double prev = two_scale_rung(theta, tau, gamma_wp, geom, cloud, s0, n_inner, n_outer);
  double last_change = 0.0;
  for (int doubling = 0; doubling < 2; ++doubling) {
    n_inner *= 2;
    n_outer = 2 * n_outer - 1;
    const double value = two_scale_rung(theta, tau, gamma_wp, geom, cloud, s0,
                                        n_inner, n_outer);
    last_change = std::abs(value - prev);
    if (last_change <= tol) return {value, last_change, n_outer, n_inner};
    prev = value;
  }
  char msg[160];
  std::snprintf(msg, sizeof msg,
                "cloud_intensity_quadrature: not converged to tol=%g after two "
                "resolution doublings (last change %g)",
                tol, last_change);
  throw ConvergenceError(msg);
}

MonteCarloResult cloud_intensity_montecarlo(double theta, double tau,
                                            double gamma_wp,
                                            const Geometry& geom,
                                            const CloudSpec& cloud, double s0,
                                            std::int64_t n_samples,
                                            std::uint64_t seed,
                                            ExecutionPolicy policy) {
  if (n_samples < 10000)
    throw DomainError("cloud_intensity_montecarlo: n_samples must be >= 1e4");
  validate_cloud(cloud);
  if (!(s0 >= 0.0)) throw DomainError("cloud_intensity_montecarlo: s0 must be >= 0");
  if (!(tau >= 0.0)) throw DomainError("cloud_intensity_montecarlo: tau must be >= 0");

  constexpr std::int64_t kBlock = 4096;
  const std::int64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<double> block_sum(n_blocks, 0.0);
  std::vector<double> block_sumsq(n_blocks, 0.0);

  parallel_for(n_blocks, policy, [&](std::int64_t b) {
    const std::int64_t begin = b * kBlock;
    const std::int64_t end = std::min(begin + kBlock, n_samples);
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::int64_t i = begin; i < end; ++i) {
      // x and y are drawn (and discarded) to assert the z-only dependence of
      // the intensity and to keep the stream layout position-complete.
      const std::uint64_t base = 3 * static_cast<std::uint64_t>(i);
      (void)counter_gaussian(seed, base + 0);  // x / s_r
      (void)counter_gaussian(seed, base + 1);  // y / s_r
      const double z = -geom.h + cloud.s_z * counter_gaussian(seed, base + 2);
      const double v = intensity_single(z, theta, tau, gamma_wp, geom, s0).intensity;
      sum += v;
      sumsq += v * v;
    }
    block_sum[b] = sum;
    block_sumsq[b] = sumsq;
  });

  // Fixed-order pairwise reduction: independent of thread count and, unlike
  // a running sum, stable against block-count-dependent rounding.
  const auto reduce = [](std::vector<double> v) {
    for (std::size_t width = v.size(); width > 1;) {
      const std::size_t half = (width + 1) / 2;
      for (std::size_t i = 0; i < width / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
      if (width % 2 == 1) v[width / 2] = v[width - 1];
      width = half;
    }
    return v.empty() ? 0.0 : v[0];
  };

  const double total = reduce(block_sum);
  const double total_sq = reduce(block_sumsq);
  const double n = static_cast<double>(n_samples);
  const double mean = total / n;
  double var = (total_sq - n * mean * mean) / (n - 1.0);
  if (var < 0.0) var = 0.0;  // rounding guard for zero-variance streams
  return {mean, std::sqrt(var / n)};
}

double cloud_intensity_perp_closed(double theta, double tau,
                                   const Geometry& geom,
                                   const CloudSpec& cloud, double s0) {
  if (std::abs(theta - geom.theta0) > 0.05)
    throw DomainError(
        "cloud_intensity_perp_closed: |theta - theta0| > 0.05 rad is outside "
        "the small-angle validity of the closed form");
  validate_cloud(cloud);
  if (!(s0 >= 0.0)) throw DomainError("cloud_intensity_perp_closed: s0 must be >= 0");
  const double s = 2.0 * s0;
  if (s == 0.0) return 0.0;
  const double dc = std::cos(theta) - std::cos(geom.theta0);
  const double envelope = std::exp(-2.0 * std::pow(geom.k * cloud.s_z * dc, 2));
  const double beat = std::cos(2.0 * geom.k * geom.h * dc);
  return s / (1.0 + s) *
         (1.0 + 0.5 * g1_resonant(s, tau) * envelope * beat);
}

double axial_beat_integral(double theta, const Geometry& geom,
                           const CloudSpec& cloud, BeatTerms terms) {
  validate_cloud(cloud);
  const double ct = std::cos(theta);
  const double ct0 = std::cos(geom.theta0);
  if (terms == BeatTerms::retained_small_angle) {
    const double dc = -geom.theta0 * (theta - geom.theta0);
    return 0.5 * std::exp(-2.0 * std::pow(geom.k * cloud.s_z * dc, 2)) *
           std::cos(2.0 * geom.k * geom.h * dc);
  }
  const double sum_arg = ct + ct0;
  const double diff_arg = ct - ct0;
  const double fast = 0.5 * std::exp(-2.0 * std::pow(geom.k * cloud.s_z * sum_arg, 2)) *
                      std::cos(2.0 * geom.k * geom.h * sum_arg);
  const double slow = 0.5 * std::exp(-2.0 * std::pow(geom.k * cloud.s_z * diff_arg, 2)) *
                      std::cos(2.0 * geom.k * geom.h * diff_arg);
  return fast + slow;
}

std::vector<std::string> cloud_guards(const Geometry& geom,
                                      const CloudSpec& cloud) {
  validate_cloud(cloud);
  std::vector<std::string> warnings;
  const double n_atoms = static_cast<double>(cloud.n_atoms);
  const double peak_density =
      n_atoms / (std::pow(2.0 * M_PI, 1.5) * cloud.s_z * cloud.s_r * cloud.s_r *
                 std::pow(geom.k, 3));
  if (peak_density > 0.01) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "peak density n0/k^3 = %.3g exceeds 0.01; the dilute "
                  "independent-scatterer model is strained",
                  peak_density);
    warnings.emplace_back(msg);
  }
  const double b0 = 3.0 * n_atoms / (geom.k * geom.k * cloud.s_r * cloud.s_r);
  if (b0 > 0.1) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "resonant optical depth b0 = %.3g is not << 1; attenuation "
                  "through the sample is neglected by the model",
                  b0);
    warnings.emplace_back(msg);
  }
  return warnings;
}

FringePattern fringe_pattern(const std::vector<double>& theta_grid, double tau,
                             double gamma_wp, const Geometry& geom,
                             const CloudSpec& cloud, double s0,
                             FringeMethod method, double tol,
                             std::int64_t n_samples, std::uint64_t seed,
                             ExecutionPolicy policy) {
  if (theta_grid.size() < 2)
    throw DomainError("fringe_pattern: theta_grid needs at least 2 points");
  const double period = M_PI / (geom.theta0 * geom.k * geom.h);
  double max_step = 0.0;
  for (std::size_t i = 1; i < theta_grid.size(); ++i) {
    const double step = theta_grid[i] - theta_grid[i - 1];
    if (step <= 0.0)
      throw DomainError("fringe_pattern: theta_grid must be strictly ascending");
    max_step = std::max(max_step, step);
  }
  if (max_step > period / 12.0)
    throw DomainError(
        "fringe_pattern: theta_grid under-resolves the fringe period "
        "pi/(theta0 k h); need >= 12 points per period");

  FringePattern pattern;
  pattern.theta_grid = theta_grid;
  pattern.intensity.assign(theta_grid.size(), 0.0);
  if (method == FringeMethod::montecarlo)
    pattern.std_error.assign(theta_grid.size(), 0.0);
  pattern.meta = {tau, gamma_wp, s0, geom, cloud};

  const auto n = static_cast<std::int64_t>(theta_grid.size());
  // Exceptions may not escape a parallel region; capture the first one and
  // rethrow after the loop, labeled with its sweep point.
  std::string first_error;
  const auto guarded = [&](std::int64_t i, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      char label[64];
      std::snprintf(label, sizeof label, "at theta=%.9g: ", theta_grid[i]);
#ifdef _OPENMP
#pragma omp critical
#endif
      {
        if (first_error.empty()) first_error = label + std::string(e.what());
      }
    }
  };
  switch (method) {
    case FringeMethod::quadrature:
      parallel_for(n, policy, [&](std::int64_t i) {
        guarded(i, [&] {
          pattern.intensity[i] = cloud_intensity_quadrature(
                                     theta_grid[i], tau, gamma_wp, geom, cloud,
                                     s0, tol)
                                     .value;
        });
      });
      break;
    case FringeMethod::montecarlo:
      // Parallelism lives inside each per-theta estimate; the same seed for
      // every theta reuses one atom realization across the sweep.
      for (std::int64_t i = 0; i < n; ++i) {
        const MonteCarloResult r = cloud_intensity_montecarlo(
            theta_grid[i], tau, gamma_wp, geom, cloud, s0, n_samples, seed,
            policy);
        pattern.intensity[i] = r.value;
        pattern.std_error[i] = r.std_error;
      }
      break;
    case FringeMethod::closed_perp:
      parallel_for(n, policy, [&](std::int64_t i) {
        guarded(i, [&] {
          pattern.intensity[i] =
              cloud_intensity_perp_closed(theta_grid[i], tau, geom, cloud, s0);
        });
      });
      break;
  }
  if (!first_error.empty()) throw NumericalError(first_error);
  return pattern;
}

}  // namespace mbs
