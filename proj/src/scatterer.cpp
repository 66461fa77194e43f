#include "mbs/scatterer.hpp"

#include <cmath>

#include "mbs/emitter.hpp"
#include "mbs/errors.hpp"

namespace mbs {

SingleAtomResult intensity_single(double z, double theta, double tau,
                                  double gamma_wp, const Geometry& geom,
                                  double s0) {
  if (!(tau >= 0.0)) throw DomainError("intensity_single: tau >= 0 required");
  if (!(s0 >= 0.0)) throw DomainError("intensity_single: s0 >= 0 required");
  const double u = standing_phase(z, geom);
  const double s = local_saturation_of_phase(u, gamma_wp, s0);
  SingleAtomResult r;
  if (s <= 0.0) return r;  // undriven atom (grating node or s0 = 0)
  r.mean_term = s / (1.0 + s);
  const double x = cross_overlap_of_phase(u, gamma_wp);
  r.interference_term =
      g1_resonant(s, tau) * x * std::cos(2.0 * geom.k * z * std::cos(theta));
  r.intensity = r.mean_term * (1.0 + r.interference_term);
  return r;
}

double contrast_single_parallel(double z, double tau, double s0,
                                const Geometry& geom, bool* undriven) {
  const double u = standing_phase(z, geom);
  const double s = local_saturation_of_phase(u, 0.0, s0);
  if (undriven) *undriven = false;
  // The formal node limit of the contrast does not vanish, but the atom there
  // scatters nothing; treat a standing-wave suppression beyond ~15 digits as
  // an exact node (covers lambda*/4 computed in floating point).
  if (s0 <= 0.0 || 1.0 + std::cos(u) < 1e-15) {
    if (undriven) *undriven = true;
    return 0.0;
  }
  return 2.0 * std::abs(g1_resonant(s, tau));
}

double contrast_single_perp(double z, double tau, double s0,
                            const Geometry& geom) {
  const double u = standing_phase(z, geom);
  return 2.0 * std::abs(g1_resonant(2.0 * s0, tau) * std::cos(u));
}

double contrast_single(double z, double tau, double gamma_wp,
                       const Geometry& geom, double s0) {
  const double u = standing_phase(z, geom);
  const double s = local_saturation_of_phase(u, gamma_wp, s0);
  const double envelope = 1.0 + std::cos(2.0 * gamma_wp) * std::cos(u);
  if (s0 <= 0.0 || envelope < 1e-15) return 0.0;  // undriven (grating node)
  if (s <= 0.0) return 0.0;
  return 2.0 * std::abs(g1_resonant(s, tau) * cross_overlap_of_phase(u, gamma_wp));
}

std::array<JonesVector, 4> four_path_amplitudes(double z, double theta,
                                                double gamma_wp,
                                                const Geometry& geom) {
  const JonesVector eps_x{complexd{1.0, 0.0}, complexd{0.0, 0.0}};
  const JonesVector eps_1 = waveplate_map(gamma_wp, eps_x);
  const double kin = geom.k * std::cos(geom.theta0) * z;   // incoming phase, y = 0
  const double kout = geom.k * std::cos(theta) * z;        // detection-side phase
  const complexd in_dir = std::exp(complexd{0.0, kin});
  const complexd in_ref = std::exp(complexd{0.0, -kin});   // via mirror
  const complexd out_dir = std::exp(complexd{0.0, -kout});
  const complexd out_ref = std::exp(complexd{0.0, kout});  // via mirror + waveplate
  return {
      (in_dir * out_dir) * eps_x,  // I
      (in_ref * out_dir) * eps_1,  // II
      (in_dir * out_ref) * eps_1,  // III
      (in_ref * out_ref) * eps_x,  // IV (waveplate applied twice)
  };
}

double four_path_intensity(double z, double theta, double gamma_wp,
                           const Geometry& geom, double s0) {
  if (!(s0 >= 0.0) || s0 > 1e-3)
    throw DomainError(
        "four_path_intensity: linear regime only (0 <= s0 <= 1e-3)");
  const auto amps = four_path_amplitudes(z, theta, gamma_wp, geom);
  JonesVector sum;
  for (const auto& a : amps) sum = sum + a;
  return 0.5 * s0 * sum.norm2();
}

}  // namespace mbs
