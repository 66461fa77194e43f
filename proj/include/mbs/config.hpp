#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbs/model.hpp"

namespace mbs {

// Flag-level overrides applied on top of the config file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<std::string> method;
};

// Fully resolved scenario: config-file units (degrees, mm, um) are kept so
// the echoed sidecar is itself a valid config; accessors convert to the
// internal units (radians, meters).
struct ScenarioConfig {
  std::string subcommand;

  // geometry block
  double theta0_deg = 4.3;
  double lambda_nm = 780.0;
  double h_mm = 5.0;
  double L_m = 0.0;

  // cloud block
  std::int64_t n_atoms = 10000;
  double s_r_um = 500.0;
  double s_z_um = 500.0;

  // drive block
  double s0 = 5.0;
  double gamma_wp_deg = 45.0;

  // sweep block (theta/gamma ranges in degrees, tau in 1/Gamma, z in m,
  // nu in Gamma)
  std::string sweep_variable;
  double sweep_min = 0.0;
  double sweep_max = 0.0;
  int sweep_points = 0;

  // fixed block: held-constant values for sweeps that do not vary them
  double fixed_s = 10.0;         // emitter saturation for g1/spectrum
  double fixed_tau_gamma = 0.0;  // delay for cloud patterns
  double fixed_z_m = 0.0;        // atom height for single

  std::string method = "quadrature";
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  std::string output;

  Geometry geometry() const;  // theta initialized to theta0
  CloudSpec cloud() const;
  double gamma_wp() const;            // radians
  std::vector<double> sweep_grid() const;  // internal units
};

// Parses and validates a scenario for the given subcommand, applying
// defaults and flag overrides. Unknown keys anywhere are rejected; all
// messages name the offending key. Throws ConfigError.
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& subcommand,
                              const CliOverrides& overrides);

// Full resolved config (defaults and overrides included) as JSON; feeding
// this back through parse_scenario reproduces the same scenario.
nlohmann::json scenario_echo(const ScenarioConfig& cfg);

// 17 significant digits, enough to round-trip any double exactly.
std::string format_sig17(double v);

// CSV: UTF-8, '\n' line endings, '.' decimal separator.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace mbs
