#pragma once

#include <vector>

#include "mbs/model.hpp"

namespace mbs {

// Local drive parameters of one scatterer (reduced units, Gamma = 1).
struct EmitterDrive {
  double s = 0.0;           // local saturation parameter
  double omega_l = 0.0;     // Rabi frequency, Gamma sqrt(s/2)
  double omega_m_sq = 0.0;  // omega_l^2 - 1/16; negative when overdamped
};

struct G1Curve {
  std::vector<double> tau_grid;  // units 1/Gamma, ascending
  std::vector<double> values;
  double s = 0.0;
};

// Inelastic (Mollow) spectral density on a frequency grid, plus the elastic
// delta-peak weight reported separately (never binned into the grid).
struct SpectrumResult {
  double coherent_weight = 0.0;          // 1/(1+s)
  std::vector<double> nu_grid;           // units Gamma, symmetric about 0
  std::vector<double> density;           // >= 0, integrates to s/(1+s)
  double integrated_inelastic = 0.0;     // adaptive integral + analytic tail
  double total_weight = 0.0;             // coherent + inelastic, should be 1
};

// s(z) = 2 s0 [1 + cos(2 gamma) cos(2 k cos(theta0) z)]
double local_saturation(double z, double gamma_wp, const Geometry& geom, double s0);
double local_saturation_of_phase(double u, double gamma_wp, double s0);

EmitterDrive make_emitter_drive(double s);

// Steady-state excited population s/(2(1+s)).
double steady_population(double s);

// First-order correlation of the scattered field in the rotating frame, for
// a resonantly driven two-level emitter at saturation s and delay tau (1/Gamma
// units). Continuous across the underdamped/overdamped crossover; equals 1 at
// tau = 0 and 1/(1+s) as tau -> infinity.
double g1_resonant(double s, double tau);

G1Curve g1_curve(double s, const std::vector<double>& tau_grid);

// Analytic Lorentzian-sum spectrum (termwise cosine transform of the
// inelastic part of g1_resonant). nu_grid must be symmetric about 0 and span
// at least +-(Omega_M + 10); throws DomainError if the grid captures < 99.9%
// of the inelastic weight.
SpectrumResult mollow_spectrum(double s, const std::vector<double>& nu_grid);

// Self-test fault injection: scales the decay rate of the oscillatory part of
// g1_resonant (default 0.75 Gamma). Used by `mbs-lab validate --inject-fault`
// to prove the validation suite can detect a broken correlation function.
namespace testhooks {
void set_g1_oscillatory_decay(double rate);
double g1_oscillatory_decay();
}  // namespace testhooks

}  // namespace mbs
