#pragma once

#include <complex>

#include "mbs/model.hpp"

namespace mbs {

using complexd = std::complex<double>;

// Transverse polarization amplitude (no z-component in the small-angle
// approximation).
struct JonesVector {
  complexd ex{0.0, 0.0};
  complexd ey{0.0, 0.0};

  double norm2() const { return std::norm(ex) + std::norm(ey); }
};

inline JonesVector operator+(const JonesVector& a, const JonesVector& b) {
  return {a.ex + b.ex, a.ey + b.ey};
}
inline JonesVector operator*(const complexd& s, const JonesVector& v) {
  return {s * v.ex, s * v.ey};
}
// Hermitian inner product <a|b>.
inline complexd dot(const JonesVector& a, const JonesVector& b) {
  return std::conj(a.ex) * b.ex + std::conj(a.ey) * b.ey;
}

// Total local drive field at the atom: E_l(z)/E0 and its unit direction.
// at_null flags exact nodes of the standing polarization/intensity grating,
// where the direction is conventional (the atom there is undriven anyway).
struct DriveField {
  double amplitude = 0.0;  // in units of E0, in [0, 2]
  JonesVector direction;   // unit norm, global plane-wave phase retained
  bool at_null = false;
};

struct OverlapFactors {
  double self_overlap = 1.0;     // eps_l . eps_l
  double rotated_overlap = 1.0;  // L[eps_l] . L[eps_l]
  double cross_overlap = 0.0;    // eps_l . L[eps_l], the fringe weight
};

// Half-waveplate with proper axis at angle gamma_wp:
// (ex, ey) -> (cos2g ex + sin2g ey, sin2g ex - cos2g ey).
// Norm-preserving involution; maps eps_x to eps_1 and back.
JonesVector waveplate_map(double gamma_wp, const JonesVector& v);

// Superposition of the incoming plane wave and its waveplate-rotated mirror
// reflection, evaluated at height z (y = 0 section):
//   amplitude = sqrt(2 [1 + cos2g cos(2 k cos(theta0) z)])
//   direction = e^{i k cos(theta0) z} (e^{-2ik cos(theta0) z} eps_1 + eps_x) / amplitude
double standing_phase(double z, const Geometry& geom);  // u = 2 k cos(theta0) z
DriveField total_drive(double z, double gamma_wp, const Geometry& geom);

// Polarization overlaps entering the backscattered intensity. Throws
// NumericalError at exact field nulls (denominator < 1e-9), signaling the
// caller to treat the atom as undriven.
OverlapFactors overlap_factors(double z, double gamma_wp, const Geometry& geom);

// cross_overlap as a plain function of the standing-wave phase u; used by the
// cloud integrals where z has been reduced mod the grating period.
double cross_overlap_of_phase(double u, double gamma_wp);

}  // namespace mbs
