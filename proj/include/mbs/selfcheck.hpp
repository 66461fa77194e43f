#pragma once

#include <string>
#include <vector>

namespace mbs {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst observed deviation
  double threshold = 0.0;  // deviation must stay <= threshold
  std::string detail;
};

// Self-validation suite: correlation-function limit identities, the
// perpendicular-configuration identity against an independently coded
// reference, the closed beat integral against brute-force quadrature, the
// quadrature / Monte Carlo / closed-form consistency triangle,
// envelope/period recovery, the four-path linear limit, and the analytic
// spectrum against a numerical cosine transform. fast=true trims point
// counts so the suite finishes in a few seconds.
std::vector<CheckResult> run_validation(bool fast);

}  // namespace mbs
