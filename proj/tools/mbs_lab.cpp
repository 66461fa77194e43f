#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mbs/analysis.hpp"
#include "mbs/cloud.hpp"
#include "mbs/config.hpp"
#include "mbs/emitter.hpp"
#include "mbs/errors.hpp"
#include "mbs/scatterer.hpp"
#include "mbs/selfcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<std::string> method;
};

mbs::ScenarioConfig load_scenario(const Flags& flags,
                                  const std::string& subcommand) {
  std::ifstream in(flags.config_path, std::ios::binary);
  if (!in)
    throw mbs::ConfigError("config: cannot read file \"" + flags.config_path +
                           "\"");
  std::ostringstream text;
  text << in.rdbuf();
  mbs::CliOverrides overrides{flags.seed, flags.tol, flags.out, flags.method};
  return mbs::parse_scenario(text.str(), subcommand, overrides);
}

void emit_outputs(const mbs::ScenarioConfig& cfg,
                  const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) {
  mbs::write_csv(cfg.output, header, rows);
  std::ofstream side(cfg.output + ".config.json", std::ios::binary);
  if (!side)
    throw mbs::NumericalError("cannot open sidecar file: " + cfg.output +
                              ".config.json");
  side << mbs::scenario_echo(cfg).dump(2) << '\n';
  std::printf("wrote %s (%zu rows) and %s.config.json\n", cfg.output.c_str(),
              rows.size(), cfg.output.c_str());
}

int run_g1(const Flags& flags) {
  const mbs::ScenarioConfig cfg = load_scenario(flags, "g1");
  std::vector<std::vector<double>> rows;
  for (double tau : cfg.sweep_grid())
    rows.push_back({tau, mbs::g1_resonant(cfg.fixed_s, tau)});
  emit_outputs(cfg, {"tau_gamma", "g1"}, rows);
  return kExitOk;
}

int run_spectrum(const Flags& flags) {
  const mbs::ScenarioConfig cfg = load_scenario(flags, "spectrum");
  const std::vector<double> nu = cfg.sweep_grid();
  const mbs::SpectrumResult spec = mbs::mollow_spectrum(cfg.fixed_s, nu);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < nu.size(); ++i)
    rows.push_back({nu[i], spec.density[i]});
  emit_outputs(cfg, {"nu_gamma", "density"}, rows);
  std::printf("coherent_weight %s  integrated_inelastic %s  total_weight %s\n",
              mbs::format_sig17(spec.coherent_weight).c_str(),
              mbs::format_sig17(spec.integrated_inelastic).c_str(),
              mbs::format_sig17(spec.total_weight).c_str());
  return kExitOk;
}

int run_single(const Flags& flags) {
  const mbs::ScenarioConfig cfg = load_scenario(flags, "single");
  const mbs::Geometry geom = cfg.geometry();
  const std::vector<double> grid = cfg.sweep_grid();
  std::vector<std::vector<double>> rows;
  std::string first_col;
  for (double v : grid) {
    double z = cfg.fixed_z_m, tau = cfg.fixed_tau_gamma, gw = cfg.gamma_wp();
    if (cfg.sweep_variable == "tau") {
      tau = v;
      first_col = "tau_gamma";
    } else if (cfg.sweep_variable == "z") {
      z = v;
      first_col = "z_m";
    } else {
      gw = v;
      first_col = "gamma_rad";
    }
    const double p2p = mbs::contrast_single(z, tau, gw, geom, cfg.s0);
    const double s_loc = mbs::local_saturation(z, gw, geom, cfg.s0);
    rows.push_back({v, 0.5 * p2p, p2p, mbs::g1_resonant(s_loc, tau)});
  }
  emit_outputs(cfg, {first_col, "contrast_michelson", "contrast_p2p", "g1"},
               rows);
  return kExitOk;
}

int run_cloud(const Flags& flags) {
  const mbs::ScenarioConfig cfg = load_scenario(flags, "cloud");
  const mbs::FringeMethod method =
      cfg.method == "montecarlo"
          ? mbs::FringeMethod::montecarlo
          : (cfg.method == "closed_perp" ? mbs::FringeMethod::closed_perp
                                         : mbs::FringeMethod::quadrature);
  for (const std::string& warning :
       mbs::cloud_guards(cfg.geometry(), cfg.cloud()))
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  const mbs::FringePattern pat = mbs::fringe_pattern(
      cfg.sweep_grid(), cfg.fixed_tau_gamma, cfg.gamma_wp(), cfg.geometry(),
      cfg.cloud(), cfg.s0, method, cfg.tol, cfg.n_samples, cfg.seed);
  std::vector<std::string> header = {"theta_rad", "intensity_norm"};
  if (method == mbs::FringeMethod::montecarlo) header.push_back("std_error");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < pat.theta_grid.size(); ++i) {
    std::vector<double> row = {pat.theta_grid[i], pat.intensity[i]};
    if (method == mbs::FringeMethod::montecarlo)
      row.push_back(pat.std_error[i]);
    rows.push_back(std::move(row));
  }
  emit_outputs(cfg, header, rows);
  return kExitOk;
}

int run_contrast(const Flags& flags) {
  const mbs::ScenarioConfig cfg = load_scenario(flags, "contrast");
  const std::vector<double> taus = cfg.sweep_grid();
  const std::vector<mbs::ContrastResult> curve = mbs::contrast_curve(
      taus, cfg.gamma_wp(), cfg.geometry(), cfg.cloud(), cfg.s0,
      mbs::ContrastConvention::michelson);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!curve[i].converged)
      throw mbs::FitError("contrast fit did not converge at tau=" +
                          mbs::format_sig17(taus[i]));
    rows.push_back({taus[i], curve[i].contrast, 2.0 * curve[i].contrast,
                    mbs::g1_resonant(2.0 * cfg.s0, taus[i])});
  }
  emit_outputs(cfg, {"tau_gamma", "contrast_michelson", "contrast_p2p", "g1"},
               rows);
  return kExitOk;
}

int run_validate(bool fast, const std::string& fault) {
  if (!fault.empty()) {
    if (fault == "g1-decay") {
      // Perturbs the oscillatory-part decay rate 0.75 -> 0.5 to prove the
      // suite catches a broken correlation function.
      mbs::testhooks::set_g1_oscillatory_decay(0.5);
      std::printf("fault injected: g1 oscillatory decay 0.75 -> 0.5\n");
    } else {
      std::fprintf(stderr, "error: unknown fault \"%s\" (known: g1-decay)\n",
                   fault.c_str());
      return kExitConfig;
    }
  }
  const std::vector<mbs::CheckResult> results = mbs::run_validation(fast);
  std::printf("%-38s %12s %12s  %s\n", "check", "measured", "threshold",
              "status");
  bool all_pass = true;
  for (const auto& r : results) {
    std::printf("%-38s %12.3e %12.3e  %s\n", r.name.c_str(), r.measured,
                r.threshold, r.pass ? "PASS" : "FAIL");
    if (!r.pass) {
      all_pass = false;
      std::printf("    -> %s\n", r.detail.c_str());
    }
  }
  std::printf("%s: %zu checks, %s\n", fast ? "validate --fast" : "validate",
              results.size(), all_pass ? "all passed" : "FAILURES PRESENT");
  return all_pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mbs-lab: mirror-assisted backscattering fringe toolkit"};
  app.require_subcommand(1);

  Flags flags;
  std::uint64_t seed_val = 0;
  double tol_val = 0.0;
  std::string out_val, method_val;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "JSON scenario file")
        ->required();
    sub->add_option("--seed", seed_val, "override config seed");
    sub->add_option("--tol", tol_val, "override quadrature tolerance");
    sub->add_option("--out", out_val, "override output CSV path");
    sub->add_option("--method", method_val, "override method");
  };

  CLI::App* sub_g1 = app.add_subcommand("g1", "correlation curve g1(s, tau)");
  CLI::App* sub_spectrum =
      app.add_subcommand("spectrum", "inelastic emission spectrum");
  CLI::App* sub_single =
      app.add_subcommand("single", "single-atom fringe contrast sweeps");
  CLI::App* sub_cloud = app.add_subcommand("cloud", "cloud fringe patterns");
  CLI::App* sub_contrast =
      app.add_subcommand("contrast", "cloud contrast vs tau curves");
  for (CLI::App* sub :
       {sub_g1, sub_spectrum, sub_single, sub_cloud, sub_contrast})
    add_common(sub);

  CLI::App* sub_validate =
      app.add_subcommand("validate", "run the self-validation suite");
  bool fast = false;
  std::string fault;
  sub_validate->add_flag("--fast", fast, "reduced point counts, < 10 s");
  sub_validate->add_option("--inject-fault", fault,
                           "perturb an internal constant to prove the suite "
                           "detects it (g1-decay)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // keep the documented contract: 0 for --help, 1 for any usage error
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  for (CLI::App* sub :
       {sub_g1, sub_spectrum, sub_single, sub_cloud, sub_contrast}) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) flags.seed = seed_val;
    if (sub->count("--tol")) flags.tol = tol_val;
    if (sub->count("--out")) flags.out = out_val;
    if (sub->count("--method")) flags.method = method_val;
  }

  try {
    if (sub_g1->parsed()) return run_g1(flags);
    if (sub_spectrum->parsed()) return run_spectrum(flags);
    if (sub_single->parsed()) return run_single(flags);
    if (sub_cloud->parsed()) return run_cloud(flags);
    if (sub_contrast->parsed()) return run_contrast(flags);
    if (sub_validate->parsed()) return run_validate(fast, fault);
  } catch (const mbs::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
