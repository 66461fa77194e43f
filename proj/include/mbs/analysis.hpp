#pragma once

#include <vector>

#include "mbs/cloud.hpp"
#include "mbs/model.hpp"
#include "mbs/parallel.hpp"

namespace mbs {

enum class ContrastConvention { peak_to_peak_over_mean, michelson };

// Signed fringe contrast under an explicit convention. michelson is the
// fitted modulation depth c at the envelope center (range [-1, 1]);
// peak_to_peak_over_mean is 2c (range [-2, 2]).
struct ContrastResult {
  double contrast = 0.0;
  ContrastConvention convention = ContrastConvention::michelson;
  double fit_residual_rms = 0.0;
  bool converged = false;
};

// Envelope/carrier parameters of a fitted fringe pattern. center is the
// model expansion point (the backscattering direction theta0); phase is the
// carrier phase at the center.
struct EnvelopeFit {
  double s_theta = 0.0;  // Gaussian rms half-width, radians
  double period = 0.0;   // fringe period, radians
  double center = 0.0;
  double phase = 0.0;
};

// Least-squares fit of I(theta) = a [1 + c e^{-2 w^2 t^2} cos(p t + phi0)],
// t = theta - theta0, with (a, c, w, p, phi0) free. Initialization: a from
// the mean, p from a matched-filter scan, w from the analytic prediction
// theta0 k s_z, then (c, phi0) by a linear sub-fit. The sign of c is the
// deliverable: a fit landing at phi0 near pi is folded into c < 0.
// Preconditions (DomainError): pattern spans >= 3 fringe periods and
// >= 2 s_theta of envelope. FitError after bounded restarts.
ContrastResult extract_contrast(const FringePattern& pattern,
                                ContrastConvention convention);

// Same fit, reporting the envelope width s_theta = 1/(2w) and fringe period
// 2 pi / p.
EnvelopeFit fit_envelope_period(const FringePattern& pattern);

// Contrast vs tau at the canonical analysis window (theta0 +- 1.5 s_theta,
// 16 points per fringe period): per tau, synthesize a pattern (closed form
// for gamma_wp = pi/4, two-scale quadrature otherwise) and extract the
// contrast. A FitError for one tau flags that entry (converged = false)
// without aborting the sweep.
std::vector<ContrastResult> contrast_curve(const std::vector<double>& tau_grid,
                                           double gamma_wp,
                                           const Geometry& geom,
                                           const CloudSpec& cloud, double s0,
                                           ContrastConvention convention,
                                           ExecutionPolicy policy =
                                               ExecutionPolicy::parallel);

// The canonical fitting window: theta0 +- 1.5 s_theta sampled at 16 points
// per fringe period. Narrow enough to keep the beat chirp (the pattern is
// periodic in cos(theta), not theta) from biasing the fitted width, wide
// enough to pin the envelope.
std::vector<double> canonical_theta_grid(const Geometry& geom,
                                         const CloudSpec& cloud);

}  // namespace mbs
