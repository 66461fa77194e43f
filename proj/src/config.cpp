#include "mbs/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "mbs/errors.hpp"

namespace mbs {

namespace {

using nlohmann::json;

constexpr double kDegToRad = M_PI / 180.0;

void check_keys(const json& obj, const std::string& block,
                const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      const std::string where = block.empty() ? it.key() : block + "." + it.key();
      throw ConfigError("config: unknown key \"" + where + "\"");
    }
  }
}

double get_number(const json& obj, const std::string& block,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("config: key \"" + block + "." + key + "\" must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& block,
                         const std::string& key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError("config: key \"" + block + "." + key +
                      "\" must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& block,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string())
    throw ConfigError("config: key \"" + block + "." + key + "\" must be a string");
  return v.get<std::string>();
}

// Default sweep for each subcommand, resolved after geometry/cloud so the
// cloud default can center its window on the fringe envelope.
void apply_sweep_defaults(ScenarioConfig& cfg) {
  if (cfg.subcommand == "spectrum") {
    cfg.sweep_variable = "nu";  // window wide enough for sidebands up to s ~ 25
    cfg.sweep_min = -12.5;
    cfg.sweep_max = 12.5;
    cfg.sweep_points = 1251;
  } else if (cfg.subcommand == "cloud") {
    const double theta0 = cfg.theta0_deg * kDegToRad;
    const double k = 2.0 * M_PI / (cfg.lambda_nm * 1e-9);
    const double s_theta = 1.0 / (2.0 * theta0 * k * cfg.s_z_um * 1e-6);
    cfg.sweep_variable = "theta";
    cfg.sweep_min = (theta0 - 1.5 * s_theta) / kDegToRad;
    cfg.sweep_max = (theta0 + 1.5 * s_theta) / kDegToRad;
    cfg.sweep_points = 77;
  } else {  // g1, single, contrast
    cfg.sweep_variable = "tau";
    cfg.sweep_min = 0.0;
    cfg.sweep_max = 6.0;
    cfg.sweep_points = 121;
  }
}

void validate_scenario(const ScenarioConfig& cfg) {
  static const std::set<std::string> kMethods = {"quadrature", "montecarlo",
                                                 "closed_perp", "single_atom"};
  if (!kMethods.count(cfg.method))
    throw ConfigError("config: key \"method\" must be one of quadrature, "
                      "montecarlo, closed_perp, single_atom (got \"" +
                      cfg.method + "\")");
  if (cfg.subcommand == "single") {
    if (cfg.method != "single_atom")
      throw ConfigError(
          "config: key \"method\" must be single_atom for subcommand single");
  } else if (cfg.subcommand == "cloud") {
    if (cfg.method == "single_atom")
      throw ConfigError(
          "config: key \"method\" single_atom is not valid for subcommand cloud");
  } else if (cfg.subcommand == "contrast") {
    if (cfg.method == "montecarlo" || cfg.method == "single_atom")
      throw ConfigError("config: key \"method\" must be quadrature or "
                        "closed_perp for subcommand contrast");
  }
  if (cfg.method == "closed_perp" && std::abs(cfg.gamma_wp_deg - 45.0) > 1e-9)
    throw ConfigError("config: key \"method\" closed_perp requires "
                      "drive.gamma_wp_deg = 45");

  static const std::set<std::string> kVariables = {"tau", "theta", "gamma", "z",
                                                   "nu"};
  if (!kVariables.count(cfg.sweep_variable))
    throw ConfigError("config: key \"sweep.variable\" must be one of tau, "
                      "theta, gamma, z, nu (got \"" + cfg.sweep_variable + "\")");
  const auto allow = [&](std::initializer_list<const char*> vars) {
    for (const char* v : vars)
      if (cfg.sweep_variable == v) return;
    throw ConfigError("config: key \"sweep.variable\" = \"" +
                      cfg.sweep_variable + "\" is not valid for subcommand " +
                      cfg.subcommand);
  };
  if (cfg.subcommand == "g1" || cfg.subcommand == "contrast") allow({"tau"});
  if (cfg.subcommand == "spectrum") allow({"nu"});
  if (cfg.subcommand == "single") allow({"tau", "z", "gamma"});
  if (cfg.subcommand == "cloud") allow({"theta"});

  if (cfg.sweep_points < 2 || cfg.sweep_points > 1000000)
    throw ConfigError("config: key \"sweep.points\" must lie in [2, 1e6]");
  if (!(cfg.sweep_min < cfg.sweep_max))
    throw ConfigError("config: key \"sweep.range\" must be ascending");
  if (cfg.sweep_variable == "tau" && cfg.sweep_min < 0.0)
    throw ConfigError("config: key \"sweep.range\" tau values must be >= 0");
  if (cfg.sweep_variable == "theta" &&
      !(cfg.sweep_min * kDegToRad > 0.0 && cfg.sweep_max * kDegToRad < 0.2))
    throw ConfigError(
        "config: key \"sweep.range\" theta values must lie in (0, 0.2) rad");

  if (!(cfg.tol >= 1e-10 && cfg.tol <= 1e-2))
    throw ConfigError("config: key \"tol\" must lie in [1e-10, 1e-2]");
  if (cfg.method == "montecarlo" && cfg.n_samples < 10000)
    throw ConfigError("config: key \"n_samples\" must be >= 10000");
  if (!(cfg.fixed_s >= 0.0))
    throw ConfigError("config: key \"fixed.s\" must be >= 0");
  if (!(cfg.fixed_tau_gamma >= 0.0))
    throw ConfigError("config: key \"fixed.tau_gamma\" must be >= 0");
  if (!(cfg.s0 >= 0.0))
    throw ConfigError("config: key \"drive.s0\" must be >= 0");
  if (cfg.output.empty())
    throw ConfigError("config: key \"output\" must be a non-empty path");

  // Referenced module invariants, enforced at parse time.
  try {
    (void)cfg.geometry();
    validate_cloud(cfg.cloud());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (cfg.subcommand == "cloud") {
    // The fringe grid must resolve the period with >= 12 points per period.
    const Geometry g = cfg.geometry();
    const double period = M_PI / (g.theta0 * g.k * g.h);
    const double step =
        (cfg.sweep_max - cfg.sweep_min) * kDegToRad / (cfg.sweep_points - 1);
    if (step > period / 12.0)
      throw ConfigError(
          "config: key \"sweep.points\" under-resolves the fringe period "
          "pi/(theta0 k h); need >= 12 points per period");
  }
}

}  // namespace

Geometry ScenarioConfig::geometry() const {
  const double theta0 = theta0_deg * kDegToRad;
  const double k = 2.0 * M_PI / (lambda_nm * 1e-9);
  return make_geometry(theta0, theta0, 0.0, k, h_mm * 1e-3, L_m);
}

CloudSpec ScenarioConfig::cloud() const {
  return CloudSpec{n_atoms, s_r_um * 1e-6, s_z_um * 1e-6};
}

double ScenarioConfig::gamma_wp() const { return gamma_wp_deg * kDegToRad; }

std::vector<double> ScenarioConfig::sweep_grid() const {
  std::vector<double> grid(sweep_points);
  const double step = (sweep_max - sweep_min) / (sweep_points - 1);
  const bool angular = sweep_variable == "theta" || sweep_variable == "gamma";
  for (int i = 0; i < sweep_points; ++i) {
    const double v = sweep_min + step * i;
    grid[i] = angular ? v * kDegToRad : v;
  }
  return grid;
}

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& subcommand,
                              const CliOverrides& overrides) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  if (!root.is_object())
    throw ConfigError("config: top level must be a JSON object");

  check_keys(root, "",
             {"subcommand", "geometry", "cloud", "drive", "sweep", "fixed",
              "method", "n_samples", "seed", "tol", "output"});

  ScenarioConfig cfg;
  cfg.subcommand = subcommand;
  const std::string declared = get_string(root, "", "subcommand", subcommand);
  if (declared != subcommand)
    throw ConfigError("config: key \"subcommand\" = \"" + declared +
                      "\" does not match the invoked subcommand \"" +
                      subcommand + "\"");

  if (root.contains("geometry")) {
    const json& g = root.at("geometry");
    if (!g.is_object()) throw ConfigError("config: key \"geometry\" must be an object");
    check_keys(g, "geometry", {"theta0_deg", "lambda_nm", "h_mm", "L_m"});
    cfg.theta0_deg = get_number(g, "geometry", "theta0_deg", cfg.theta0_deg);
    cfg.lambda_nm = get_number(g, "geometry", "lambda_nm", cfg.lambda_nm);
    cfg.h_mm = get_number(g, "geometry", "h_mm", cfg.h_mm);
    cfg.L_m = get_number(g, "geometry", "L_m", cfg.L_m);
  }
  if (root.contains("cloud")) {
    const json& c = root.at("cloud");
    if (!c.is_object()) throw ConfigError("config: key \"cloud\" must be an object");
    check_keys(c, "cloud", {"n_atoms", "s_r_um", "s_z_um"});
    cfg.n_atoms = get_integer(c, "cloud", "n_atoms", cfg.n_atoms);
    cfg.s_r_um = get_number(c, "cloud", "s_r_um", cfg.s_r_um);
    cfg.s_z_um = get_number(c, "cloud", "s_z_um", cfg.s_z_um);
  }
  if (root.contains("drive")) {
    const json& d = root.at("drive");
    if (!d.is_object()) throw ConfigError("config: key \"drive\" must be an object");
    check_keys(d, "drive", {"s0", "gamma_wp_deg"});
    cfg.s0 = get_number(d, "drive", "s0", cfg.s0);
    cfg.gamma_wp_deg = get_number(d, "drive", "gamma_wp_deg", cfg.gamma_wp_deg);
  }
  if (root.contains("fixed")) {
    const json& f = root.at("fixed");
    if (!f.is_object()) throw ConfigError("config: key \"fixed\" must be an object");
    check_keys(f, "fixed", {"s", "tau_gamma", "z_m"});
    cfg.fixed_s = get_number(f, "fixed", "s", cfg.fixed_s);
    cfg.fixed_tau_gamma = get_number(f, "fixed", "tau_gamma", cfg.fixed_tau_gamma);
    cfg.fixed_z_m = get_number(f, "fixed", "z_m", cfg.fixed_z_m);
  }

  cfg.method = (subcommand == "single") ? "single_atom" : "quadrature";
  cfg.method = get_string(root, "", "method", cfg.method);
  cfg.n_samples = get_integer(root, "", "n_samples", cfg.n_samples);
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned())  // negative ints parse as signed, rejected
      throw ConfigError("config: key \"seed\" must be a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  cfg.tol = get_number(root, "", "tol", cfg.tol);
  cfg.output = get_string(root, "", "output", subcommand + ".csv");

  apply_sweep_defaults(cfg);
  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    if (!s.is_object()) throw ConfigError("config: key \"sweep\" must be an object");
    check_keys(s, "sweep", {"variable", "range", "points"});
    cfg.sweep_variable = get_string(s, "sweep", "variable", cfg.sweep_variable);
    if (s.contains("range")) {
      const json& r = s.at("range");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        throw ConfigError(
            "config: key \"sweep.range\" must be an array of 2 numbers");
      cfg.sweep_min = r[0].get<double>();
      cfg.sweep_max = r[1].get<double>();
    }
    const std::int64_t pts = get_integer(s, "sweep", "points", cfg.sweep_points);
    if (pts < 2 || pts > 1000000)
      throw ConfigError("config: key \"sweep.points\" must lie in [2, 1e6]");
    cfg.sweep_points = static_cast<int>(pts);
  }

  // Flag overrides win over file values.
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.tol) cfg.tol = *overrides.tol;
  if (overrides.out) cfg.output = *overrides.out;
  if (overrides.method) cfg.method = *overrides.method;

  validate_scenario(cfg);
  return cfg;
}

nlohmann::json scenario_echo(const ScenarioConfig& cfg) {
  json root;
  root["subcommand"] = cfg.subcommand;
  root["geometry"] = {{"theta0_deg", cfg.theta0_deg},
                      {"lambda_nm", cfg.lambda_nm},
                      {"h_mm", cfg.h_mm},
                      {"L_m", cfg.L_m}};
  root["cloud"] = {{"n_atoms", cfg.n_atoms},
                   {"s_r_um", cfg.s_r_um},
                   {"s_z_um", cfg.s_z_um}};
  root["drive"] = {{"s0", cfg.s0}, {"gamma_wp_deg", cfg.gamma_wp_deg}};
  root["sweep"] = {{"variable", cfg.sweep_variable},
                   {"range", {cfg.sweep_min, cfg.sweep_max}},
                   {"points", cfg.sweep_points}};
  root["fixed"] = {{"s", cfg.fixed_s},
                   {"tau_gamma", cfg.fixed_tau_gamma},
                   {"z_m", cfg.fixed_z_m}};
  root["method"] = cfg.method;
  root["n_samples"] = cfg.n_samples;
  root["seed"] = cfg.seed;
  root["tol"] = cfg.tol;
  root["output"] = cfg.output;
  return root;
}

std::string format_sig17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary: keep '\n' on all hosts
  if (!out) throw NumericalError("cannot open output file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_sig17(row[i]);
    }
    out << '\n';
  }
  if (!out) throw NumericalError("write failed for output file: " + path);
}

}  // namespace mbs
