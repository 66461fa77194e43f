#pragma once

#include <cstdint>

namespace mbs {

// Reduced units: Gamma = 1 fixes the time/frequency scale (tau in 1/Gamma,
// frequencies in Gamma). Lengths stay dimensional (meters), with k explicit.
// Intensities are normalized to the single-atom backscattered intensity I_a.

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Mirror/cloud/detection geometry. theta0: incidence angle on the mirror,
// theta: detection polar angle, k: wavenumber, h: cloud center to virtual
// mirror, L: virtual-to-real mirror path. phi is carried but unused: in the
// small-angle regime every observable depends on theta only.
struct Geometry {
  double theta0 = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double k = 0.0;        // rad/m
  double h = 0.0;        // m
  double L = 0.0;        // m
  double c_light = kSpeedOfLight;
};

// Gaussian cloud: N atoms, transverse rms s_r, longitudinal rms s_z,
// centered at z = -h (in front of the virtual mirror at z = 0).
struct CloudSpec {
  std::int64_t n_atoms = 1;
  double s_r = 0.0;  // m
  double s_z = 0.0;  // m
};

// Drive parameters: s0 is the single-beam saturation parameter, gamma_wp the
// half-waveplate proper-axis angle. Gamma is the linewidth, fixed to 1 in
// reduced units; the drive is resonant (zero detuning) throughout.
struct DriveSpec {
  double s0 = 0.0;
  double gamma_wp = 0.0;  // rad
  double Gamma = 1.0;
};

// Validates all Geometry invariants; throws DomainError naming the violated
// one. Small-angle regime: 0 < theta0, theta < 0.2 rad.
Geometry make_geometry(double theta0, double theta, double phi, double k,
                       double h, double L, double c_light = kSpeedOfLight);

void validate_cloud(const CloudSpec& cloud);
void validate_drive(const DriveSpec& drive);

enum class TauMode {
  exact,       // tau_c = 2(z cos(theta) + L)/c
  cloud_mean,  // z-independent approximation tau_c = 2L/c
};

// Round-trip delay between the direct and mirror-reflected emission paths.
// z is signed (z < 0 in front of the mirror).
double tau_c(const Geometry& geom, double z, TauMode mode = TauMode::exact);

}  // namespace mbs
