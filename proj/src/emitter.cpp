#include "mbs/emitter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mbs/errors.hpp"
#include "mbs/polarization.hpp"

namespace mbs {

namespace testhooks {
namespace {
double g_osc_decay = 0.75;
}
void set_g1_oscillatory_decay(double rate) { g_osc_decay = rate; }
double g1_oscillatory_decay() { return g_osc_decay; }
}  // namespace testhooks

double local_saturation_of_phase(double u, double gamma_wp, double s0) {
  return 2.0 * s0 * (1.0 + std::cos(2.0 * gamma_wp) * std::cos(u));
}

double local_saturation(double z, double gamma_wp, const Geometry& geom, double s0) {
  if (!(s0 >= 0.0)) throw DomainError("local_saturation: s0 >= 0 required");
  return local_saturation_of_phase(standing_phase(z, geom), gamma_wp, s0);
}

EmitterDrive make_emitter_drive(double s) {
  if (!(s >= 0.0)) throw DomainError("make_emitter_drive: s >= 0 required");
  EmitterDrive d;
  d.s = s;
  d.omega_l = std::sqrt(0.5 * s);
  d.omega_m_sq = 0.5 * s - 1.0 / 16.0;
  return d;
}

double steady_population(double s) {
  if (!(s >= 0.0)) throw DomainError("steady_population: s >= 0 required");
  return 0.5 * s / (1.0 + s);
}

namespace {

// cos(sqrt(X) tau) and sin(sqrt(X) tau)/sqrt(X), continued through X <= 0.
// Series branch near X tau^2 = 0 keeps the Omega_M -> 0 crossover smooth.
void osc_pair(double X, double tau, double& osc, double& ssc) {
  const double q = X * tau * tau;
  if (std::abs(q) < 1e-6) {
    osc = 1.0 + q * (-0.5 + q * (1.0 / 24.0 - q / 720.0));
    ssc = tau * (1.0 + q * (-1.0 / 6.0 + q * (1.0 / 120.0 - q / 5040.0)));
    return;
  }
  if (X > 0.0) {
    const double om = std::sqrt(X);
    osc = std::cos(om * tau);
    ssc = std::sin(om * tau) / om;
  } else {
    const double om = std::sqrt(-X);
    osc = std::cosh(om * tau);
    ssc = std::sinh(om * tau) / om;
  }
}

}  // namespace

double g1_resonant(double s, double tau) {
  if (!(s >= 0.0)) throw DomainError("g1_resonant: s >= 0 required");
  if (!(tau >= 0.0)) throw DomainError("g1_resonant: tau >= 0 required");
  const double X = 0.5 * s - 1.0 / 16.0;  // Omega_M^2, signed
  double osc, ssc;
  osc_pair(X, tau, osc, ssc);
  const double A = (s - 1.0) / (s + 1.0);
  const double D = 0.25 * (5.0 * s - 1.0) / (s + 1.0);
  const double decay_osc = std::exp(-testhooks::g1_oscillatory_decay() * tau);
  return 1.0 / (1.0 + s) +
         0.5 * (std::exp(-0.5 * tau) + (A * osc + D * ssc) * decay_osc);
}

G1Curve g1_curve(double s, const std::vector<double>& tau_grid) {
  if (tau_grid.empty()) throw DomainError("g1_curve: empty tau grid");
  G1Curve curve;
  curve.s = s;
  curve.tau_grid = tau_grid;
  curve.values.resize(tau_grid.size());
  double prev = -1.0;
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (tau_grid[i] < prev) throw DomainError("g1_curve: tau grid must ascend");
    prev = tau_grid[i];
    curve.values[i] = g1_resonant(s, tau_grid[i]);
  }
  return curve;
}

namespace {

// Termwise cosine transform of the inelastic part of the correlation
// function: a central Lorentzian of half-width 1/2 plus absorptive and
// dispersive components of half-width 3/4 tied to the generalized Rabi
// frequency. Valid for Omega_M^2 of either sign; Q > 0 always.
double inelastic_density(double s, double nu) {
  const double X = 0.5 * s - 1.0 / 16.0;
  const double A = (s - 1.0) / (s + 1.0);
  const double D = 0.25 * (5.0 * s - 1.0) / (s + 1.0);
  const double b = 0.75;
  const double n2 = nu * nu;
  const double q1 = b * b + n2 + X;
  const double Q = q1 * q1 - 4.0 * n2 * X;
  const double t_central = 0.5 * 0.5 / (0.25 + n2);
  const double t_abs = 0.5 * A * b * q1 / Q;
  const double t_disp = 0.5 * D * (b * b + X - n2) / Q;
  return (t_central + t_abs + t_disp) / M_PI;
}

double adaptive_simpson(double (*f)(double, double), double s, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(s, lm), frm = f(s, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, s, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, s, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_density(double s, double a, double b, double tol) {
  const double fa = inelastic_density(s, a);
  const double fb = inelastic_density(s, b);
  const double fm = inelastic_density(s, 0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(&inelastic_density, s, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

SpectrumResult mollow_spectrum(double s, const std::vector<double>& nu_grid) {
  if (!(s > 0.0)) throw DomainError("mollow_spectrum: s > 0 required");
  const std::size_t n = nu_grid.size();
  if (n < 3) throw DomainError("mollow_spectrum: nu grid too small");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(nu_grid[i] < nu_grid[i + 1]))
      throw DomainError("mollow_spectrum: nu grid must ascend");
  const double w_lo = nu_grid.front(), w_hi = nu_grid.back();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(nu_grid[i] + nu_grid[n - 1 - i]) > 1e-9 * (1.0 + std::abs(w_hi)))
      throw DomainError("mollow_spectrum: nu grid must be symmetric about 0");
  }

  const double inelastic_total = s / (1.0 + s);
  // captured weight over the grid span (adaptive; symmetric grid)
  const double captured = 2.0 * integrate_density(s, 0.0, w_hi, 1e-12);
  if (captured < 0.999 * inelastic_total) {
    std::ostringstream os;
    os << "mollow_spectrum: nu grid [" << w_lo << ", " << w_hi << "] captures "
       << captured / inelastic_total * 100.0
       << "% of the inelastic weight (< 99.9%); widen the grid";
    throw DomainError(os.str());
  }

  SpectrumResult r;
  r.coherent_weight = 1.0 / (1.0 + s);
  r.nu_grid = nu_grid;
  r.density.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.density[i] = inelastic_density(s, nu_grid[i]);

  // far tail via quadrature out to w_far plus the exact 1/nu^4 asymptote
  // (coefficient s/(4 pi)); keeps the reported total good to ~1e-8
  const double w_far = std::max(50.0, 10.0 * w_hi);
  const double tail = 2.0 * (integrate_density(s, w_hi, w_far, 1e-13) +
                             s / (4.0 * M_PI) / (3.0 * w_far * w_far * w_far));
  r.integrated_inelastic = captured + tail;
  r.total_weight = r.coherent_weight + r.integrated_inelastic;
  return r;
}

}  // namespace mbs
