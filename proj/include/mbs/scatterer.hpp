#pragma once

#include <array>

#include "mbs/model.hpp"
#include "mbs/polarization.hpp"

namespace mbs {

// Normalized single-atom backscattered intensity I_1/I_a, split for
// diagnostics: intensity = mean_term * (1 + interference_term).
struct SingleAtomResult {
  double intensity = 0.0;
  double mean_term = 0.0;          // s/(1+s)
  double interference_term = 0.0;  // g1 * cross_overlap * cos(2 k z cos(theta))
};

// Full nonlinear single-atom intensity at detection angle theta for an atom
// at height z, delay tau (1/Gamma), waveplate angle gamma_wp, drive s0.
SingleAtomResult intensity_single(double z, double theta, double tau,
                                  double gamma_wp, const Geometry& geom,
                                  double s0);

// Peak-to-peak-over-mean contrast of the theta-fringe, parallel configuration
// (gamma_wp = 0): 2 |g1(s(z), tau)| with s(z) = 4 s0 cos^2(k cos(theta0) z).
// At grating nodes the atom is undriven: returns 0 and sets *undriven.
double contrast_single_parallel(double z, double tau, double s0,
                                const Geometry& geom, bool* undriven = nullptr);

// Perpendicular configuration (gamma_wp = pi/4): 2 |g1(2 s0, tau) cos(2 k
// cos(theta0) z)|; the z-dependence is a pure prefactor (shape invariance).
double contrast_single_perp(double z, double tau, double s0,
                            const Geometry& geom);

// General waveplate angle: 2 |g1(s(z), tau) * cross_overlap(z)|.
double contrast_single(double z, double tau, double gamma_wp,
                       const Geometry& geom, double s0);

// Linear-regime decomposition of the backscattered field into the four
// interfering paths (in, out) x (direct, mirror-reflected):
//   I   direct/direct      no waveplate pass
//   II  reflected/direct   one pass
//   III direct/reflected   one pass
//   IV  reflected/reflected two passes (polarization restored)
// Amplitudes carry the full propagation phases at y = 0.
std::array<JonesVector, 4> four_path_amplitudes(double z, double theta,
                                                double gamma_wp,
                                                const Geometry& geom);

// (s0/2) |sum of the four amplitudes|^2; linear regime only (s0 <= 1e-3
// enforced). Matches intensity_single at tau = 0 in the s0 -> 0 limit.
double four_path_intensity(double z, double theta, double gamma_wp,
                           const Geometry& geom, double s0);

}  // namespace mbs
