#include "mbs/polarization.hpp"

#include <cmath>
#include <sstream>

#include "mbs/errors.hpp"

namespace mbs {

JonesVector waveplate_map(double gamma_wp, const JonesVector& v) {
  const double c = std::cos(2.0 * gamma_wp);
  const double s = std::sin(2.0 * gamma_wp);
  return {c * v.ex + s * v.ey, s * v.ex - c * v.ey};
}

double standing_phase(double z, const Geometry& geom) {
  return 2.0 * geom.k * std::cos(geom.theta0) * z;
}

DriveField total_drive(double z, double gamma_wp, const Geometry& geom) {
  const double u = standing_phase(z, geom);
  const double c2g = std::cos(2.0 * gamma_wp);
  const double amp2 = 2.0 * (1.0 + c2g * std::cos(u));  // |E_l/E0|^2
  DriveField field;
  if (amp2 < 1e-18) {
    // exact node of the grating: undriven atom, conventional direction
    field.amplitude = 0.0;
    field.direction = {complexd{1.0, 0.0}, complexd{0.0, 0.0}};
    field.at_null = true;
    return field;
  }
  field.amplitude = std::sqrt(amp2);
  const JonesVector eps_x{complexd{1.0, 0.0}, complexd{0.0, 0.0}};
  const JonesVector eps_1 = waveplate_map(gamma_wp, eps_x);
  const complexd global = std::exp(complexd{0.0, 0.5 * u});  // e^{ik cos(theta0) z}
  const complexd retro = std::exp(complexd{0.0, -u});
  const JonesVector sum = retro * eps_1 + eps_x;
  field.direction = (global / field.amplitude) * sum;
  return field;
}

OverlapFactors overlap_factors(double z, double gamma_wp, const Geometry& geom) {
  const double u = standing_phase(z, geom);
  const double c2g = std::cos(2.0 * gamma_wp);
  const double denom = 1.0 + c2g * std::cos(u);
  if (denom < 1e-9) {
    std::ostringstream os;
    os << "polarization overlap undefined at field null (z = " << z
       << ", gamma_wp = " << gamma_wp << "): atom is undriven";
    throw NumericalError(os.str());
  }
  OverlapFactors f;
  f.self_overlap = 1.0;
  f.rotated_overlap = 1.0;
  f.cross_overlap = (c2g + std::cos(u)) / denom;
  return f;
}

double cross_overlap_of_phase(double u, double gamma_wp) {
  const double c2g = std::cos(2.0 * gamma_wp);
  const double denom = 1.0 + c2g * std::cos(u);
  if (denom < 1e-12) return 0.0;  // undriven; weight vanishes with s(z)
  return (c2g + std::cos(u)) / denom;
}

}  // namespace mbs
