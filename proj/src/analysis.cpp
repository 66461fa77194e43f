#include "mbs/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "mbs/errors.hpp"

namespace mbs {
namespace {

// Parameter vector of the fringe model a [1 + c e^{-2 w^2 t^2} cos(p t + phi)]
// in the order (a, c, w, p, phi), with t = theta - center.
using Params = std::array<double, 5>;

double model_eval(const Params& x, double t) {
  const double env = std::exp(-2.0 * x[2] * x[2] * t * t);
  return x[0] * (1.0 + x[1] * env * std::cos(x[3] * t + x[4]));
}

void model_jacobian(const Params& x, double t, double* row) {
  const double env = std::exp(-2.0 * x[2] * x[2] * t * t);
  const double arg = x[3] * t + x[4];
  const double co = std::cos(arg);
  const double si = std::sin(arg);
  row[0] = 1.0 + x[1] * env * co;
  row[1] = x[0] * env * co;
  row[2] = x[0] * x[1] * env * co * (-4.0 * x[2] * t * t);
  row[3] = -x[0] * x[1] * env * si * t;
  row[4] = -x[0] * x[1] * env * si;
}

double sum_sq(const std::vector<double>& t, const std::vector<double>& y,
              const Params& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = model_eval(x, t[i]) - y[i];
    s += r * r;
  }
  return s;
}

// Cholesky solve of the (damped) 5x5 normal equations; false if the matrix
// is not positive definite.
bool solve_spd5(std::array<double, 25> A, std::array<double, 5> b,
                std::array<double, 5>& out) {
  for (int j = 0; j < 5; ++j) {
    double d = A[j * 5 + j];
    for (int k = 0; k < j; ++k) d -= A[j * 5 + k] * A[j * 5 + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    A[j * 5 + j] = ljj;
    for (int i = j + 1; i < 5; ++i) {
      double v = A[i * 5 + j];
      for (int k = 0; k < j; ++k) v -= A[i * 5 + k] * A[j * 5 + k];
      A[i * 5 + j] = v / ljj;
    }
  }
  for (int i = 0; i < 5; ++i) {  // forward: L z = b
    double v = b[i];
    for (int k = 0; k < i; ++k) v -= A[i * 5 + k] * out[k];
    out[i] = v / A[i * 5 + i];
  }
  for (int i = 4; i >= 0; --i) {  // backward: L^T x = z
    double v = out[i];
    for (int k = i + 1; k < 5; ++k) v -= A[k * 5 + i] * out[k];
    out[i] = v / A[i * 5 + i];
  }
  return true;
}

// Levenberg-Marquardt on the 5-parameter fringe model. Returns true when a
// minimum is reached (accepted step with negligible cost change, vanishing
// gradient, or no damped step can improve further).
bool lm_minimize(const std::vector<double>& t, const std::vector<double>& y,
                 Params& x, double* final_cost) {
  double cost = sum_sq(t, y, x);
  if (!std::isfinite(cost)) return false;
  double lambda = 1e-3;
  for (int iter = 0; iter < 200; ++iter) {
    std::array<double, 25> jtj{};
    std::array<double, 5> jtr{};
    for (std::size_t i = 0; i < t.size(); ++i) {
      double row[5];
      model_jacobian(x, t[i], row);
      const double r = model_eval(x, t[i]) - y[i];
      for (int a = 0; a < 5; ++a) {
        jtr[a] += row[a] * r;
        for (int b = a; b < 5; ++b) jtj[a * 5 + b] += row[a] * row[b];
      }
    }
    for (int a = 1; a < 5; ++a)
      for (int b = 0; b < a; ++b) jtj[a * 5 + b] = jtj[b * 5 + a];

    double gmax = 0.0;
    for (double g : jtr) gmax = std::max(gmax, std::abs(g));
    if (gmax < 1e-14 * (1.0 + cost)) {
      *final_cost = cost;
      return true;
    }

    bool accepted = false;
    while (lambda < 1e14) {
      std::array<double, 25> damped = jtj;
      for (int a = 0; a < 5; ++a)
        damped[a * 5 + a] += lambda * std::max(jtj[a * 5 + a], 1e-12);
      std::array<double, 5> rhs;
      for (int a = 0; a < 5; ++a) rhs[a] = -jtr[a];
      std::array<double, 5> delta;
      if (solve_spd5(damped, rhs, delta)) {
        Params xn = x;
        for (int a = 0; a < 5; ++a) xn[a] += delta[a];
        const double cn = sum_sq(t, y, xn);
        if (std::isfinite(cn) && cn <= cost) {
          const double drop = cost - cn;
          x = xn;
          cost = cn;
          lambda = std::max(lambda / 3.0, 1e-14);
          accepted = true;
          if (drop <= 1e-14 * (cost + 1e-30)) {
            *final_cost = cost;
            return true;
          }
          break;
        }
      }
      lambda *= 8.0;
    }
    if (!accepted) {
      // The damped step cannot reduce the cost any further: stationary point.
      *final_cost = cost;
      return true;
    }
  }
  *final_cost = cost;
  return false;
}

struct FitResult {
  Params x;
  double residual_rms = 0.0;  // in raw intensity units
  bool converged = false;
};

// Shared fit driver: validates the window, normalizes out the overall scale,
// initializes deterministically, runs LM with bounded restarts, and folds the
// (c, phi) sign ambiguity so phi lands in [-pi/2, pi/2].
FitResult fit_fringe_model(const FringePattern& pattern) {
  const std::size_t n = pattern.theta_grid.size();
  if (n < 8 || pattern.intensity.size() != n)
    throw DomainError("fringe fit: pattern needs >= 8 matched samples");

  const Geometry& g = pattern.meta.geometry;
  const CloudSpec& cl = pattern.meta.cloud;
  const double center = g.theta0;
  const double span = pattern.theta_grid.back() - pattern.theta_grid.front();
  const double period_pred = (g.theta0 > 0.0 && g.k > 0.0 && g.h > 0.0)
                                 ? M_PI / (g.theta0 * g.k * g.h)
                                 : 0.0;
  const double s_theta_pred = (g.theta0 > 0.0 && g.k > 0.0 && cl.s_z > 0.0)
                                  ? 1.0 / (2.0 * g.theta0 * g.k * cl.s_z)
                                  : 0.0;
  if (period_pred > 0.0 && span + 1e-12 < 3.0 * period_pred)
    throw DomainError("fringe fit: pattern spans fewer than 3 fringe periods");
  if (s_theta_pred > 0.0 && span + 1e-12 < 2.0 * s_theta_pred)
    throw DomainError("fringe fit: pattern spans less than 2 s_theta of envelope");

  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = pattern.theta_grid[i] - center;

  double ybar = 0.0;
  for (double v : pattern.intensity) ybar += v;
  ybar /= static_cast<double>(n);
  if (!(ybar > 0.0))
    throw DomainError("fringe fit: pattern mean intensity must be positive");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = pattern.intensity[i] / ybar;

  // Carrier initialization: matched-filter scan of the mean-subtracted data.
  const double p_pred = (period_pred > 0.0) ? 2.0 * M_PI / period_pred
                                            : 8.0 * M_PI / span;
  double p0 = p_pred;
  double best_score = -1.0;
  for (int j = 0; j <= 600; ++j) {
    const double p = p_pred * (0.5 + j / 600.0);
    double sc = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - 1.0;
      sc += d * std::cos(p * t[i]);
      ss += d * std::sin(p * t[i]);
    }
    const double score = sc * sc + ss * ss;
    if (score > best_score) {
      best_score = score;
      p0 = p;
    }
  }
  const double w0 = (s_theta_pred > 0.0) ? 1.0 / (2.0 * s_theta_pred) : 2.0 / span;

  const auto linear_subfit = [&](double w, double p, double* c_out,
                                 double* phi_out) {
    // d ~ alpha E cos(pt) - beta E sin(pt), alpha = c cos(phi), beta = c sin(phi)
    double m11 = 0.0, m12 = 0.0, m22 = 0.0, r1 = 0.0, r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double env = std::exp(-2.0 * w * w * t[i] * t[i]);
      const double f1 = env * std::cos(p * t[i]);
      const double f2 = -env * std::sin(p * t[i]);
      const double d = y[i] - 1.0;
      m11 += f1 * f1;
      m12 += f1 * f2;
      m22 += f2 * f2;
      r1 += f1 * d;
      r2 += f2 * d;
    }
    const double det = m11 * m22 - m12 * m12;
    double alpha = 0.0, beta = 0.0;
    if (std::abs(det) > 1e-300) {
      alpha = (m22 * r1 - m12 * r2) / det;
      beta = (m11 * r2 - m12 * r1) / det;
    }
    *c_out = std::hypot(alpha, beta);
    *phi_out = (*c_out > 0.0) ? std::atan2(beta, alpha) : 0.0;
  };

  // Bounded deterministic restarts around the baseline initialization.
  const std::array<std::array<double, 2>, 5> attempts = {{
      {1.0, 1.0}, {0.7, 1.0}, {1.4, 1.0}, {1.0, 0.93}, {1.0, 1.08}}};
  for (const auto& [w_scale, p_scale] : attempts) {
    Params x;
    x[0] = 1.0;
    x[2] = w0 * w_scale;
    x[3] = p0 * p_scale;
    linear_subfit(x[2], x[3], &x[1], &x[4]);
    double cost = 0.0;
    if (!lm_minimize(t, y, x, &cost)) continue;
    bool bad = false;
    for (double v : x)
      if (!std::isfinite(v)) bad = true;
    if (bad) continue;

    // Fold sign/phase ambiguities: w enters squared, (p, phi) -> (-p, -phi)
    // is a symmetry, and a phase near pi is an inverted fringe.
    x[2] = std::abs(x[2]);
    if (x[3] < 0.0) {
      x[3] = -x[3];
      x[4] = -x[4];
    }
    x[4] = std::remainder(x[4], 2.0 * M_PI);
    if (std::abs(x[4]) > M_PI / 2.0) {
      x[1] = -x[1];
      x[4] -= std::copysign(M_PI, x[4]);
    }
    FitResult out;
    out.x = x;
    out.x[0] *= ybar;  // undo the scale normalization
    out.residual_rms = std::sqrt(cost / static_cast<double>(n)) * ybar;
    out.converged = true;
    return out;
  }
  throw FitError("fringe fit: no restart converged");
}

}  // namespace

ContrastResult extract_contrast(const FringePattern& pattern,
                                ContrastConvention convention) {
  const FitResult fit = fit_fringe_model(pattern);
  ContrastResult r;
  r.convention = convention;
  r.contrast = (convention == ContrastConvention::michelson) ? fit.x[1]
                                                             : 2.0 * fit.x[1];
  r.fit_residual_rms = fit.residual_rms;
  r.converged = fit.converged;
  return r;
}

EnvelopeFit fit_envelope_period(const FringePattern& pattern) {
  const FitResult fit = fit_fringe_model(pattern);
  if (!(fit.x[2] > 0.0) || !(fit.x[3] > 0.0))
    throw FitError("fringe fit: degenerate envelope or carrier");
  EnvelopeFit e;
  e.s_theta = 1.0 / (2.0 * fit.x[2]);
  e.period = 2.0 * M_PI / fit.x[3];
  e.center = pattern.meta.geometry.theta0;
  e.phase = fit.x[4];
  return e;
}

std::vector<double> canonical_theta_grid(const Geometry& geom,
                                         const CloudSpec& cloud) {
  validate_cloud(cloud);
  const double s_theta = 1.0 / (2.0 * geom.theta0 * geom.k * cloud.s_z);
  const double period = M_PI / (geom.theta0 * geom.k * geom.h);
  const double span = 3.0 * s_theta;
  const int n = static_cast<int>(std::lround(16.0 * span / period)) + 1;
  std::vector<double> grid(n);
  const double step = span / (n - 1);
  for (int i = 0; i < n; ++i)
    grid[i] = geom.theta0 - 1.5 * s_theta + step * i;
  return grid;
}

std::vector<ContrastResult> contrast_curve(const std::vector<double>& tau_grid,
                                           double gamma_wp,
                                           const Geometry& geom,
                                           const CloudSpec& cloud, double s0,
                                           ContrastConvention convention,
                                           ExecutionPolicy policy) {
  if (tau_grid.empty()) throw DomainError("contrast_curve: empty tau grid");
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] >= 0.0))
      throw DomainError("contrast_curve: tau must be >= 0");
    if (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))
      throw DomainError("contrast_curve: tau grid must be ascending");
  }
  const std::vector<double> grid = canonical_theta_grid(geom, cloud);
  const FringeMethod method = (std::abs(gamma_wp - M_PI / 4.0) < 1e-12)
                                  ? FringeMethod::closed_perp
                                  : FringeMethod::quadrature;

  std::vector<ContrastResult> results(tau_grid.size());
  std::string first_error;
  parallel_for(static_cast<std::int64_t>(tau_grid.size()), policy,
               [&](std::int64_t i) {
                 try {
                   const FringePattern pat = fringe_pattern(
                       grid, tau_grid[i], gamma_wp, geom, cloud, s0, method,
                       1e-8, 100000, 1, ExecutionPolicy::serial);
                   results[i] = extract_contrast(pat, convention);
                 } catch (const FitError&) {
                   results[i].convention = convention;
                   results[i].converged = false;  // flagged, sweep continues
                 } catch (const std::exception& e) {
                   char label[48];
                   std::snprintf(label, sizeof label, "at tau=%.9g: ",
                                 tau_grid[i]);
#ifdef _OPENMP
#pragma omp critical
#endif
                   {
                     if (first_error.empty())
                       first_error = label + std::string(e.what());
                   }
                 }
               });
  if (!first_error.empty()) throw NumericalError(first_error);
  return results;
}

}  // namespace mbs
