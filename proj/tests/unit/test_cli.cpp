#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mbs/emitter.hpp"

#ifndef MBS_LAB_BINARY_PATH
#error "MBS_LAB_BINARY_PATH must be defined by the build"
#endif

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const std::string& work_dir() {
  static const std::string dir = [] {
    char tmpl[] = "/tmp/mbs_cli_XXXXXX";
    const char* d = mkdtemp(tmpl);
    REQUIRE(d != nullptr);
    return std::string(d);
  }();
  return dir;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool file_exists(const std::string& path) {
  return std::ifstream(path).good();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

CliResult run_cli(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const std::string tag = work_dir() + "/run" + std::to_string(counter++);
  const std::string cmd = (env.empty() ? "" : env + " ") + "\"" +
                          MBS_LAB_BINARY_PATH + "\" " + args + " > \"" + tag +
                          ".out\" 2> \"" + tag + ".err\"";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  r.out = read_file(tag + ".out");
  r.err = read_file(tag + ".err");
  return r;
}

struct Csv {
  std::string header;
  std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      csv.header = line;
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ','))
      row.push_back(std::strtod(cell.c_str(), nullptr));
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

// 41 theta points over 0.1 degrees: resolves the 0.0595-degree fringe period
const char* kCloudSweep =
    R"("sweep": {"variable": "theta", "range": [4.25, 4.35], "points": 41})";

}  // namespace

TEST_CASE("g1 subcommand: documented CSV columns, sidecar, exact values") {
  const std::string cfg = work_dir() + "/g1.json";
  const std::string out = work_dir() + "/g1.csv";
  write_file(cfg, "{}");
  const CliResult r =
      run_cli("g1 --config \"" + cfg + "\" --out \"" + out + "\"");
  CHECK(r.exit_code == 0);
  REQUIRE(file_exists(out));
  REQUIRE(file_exists(out + ".config.json"));

  const std::string text = read_file(out);
  CHECK(text.find('\r') == std::string::npos);
  const Csv csv = parse_csv(text);
  CHECK(csv.header == "tau_gamma,g1");
  REQUIRE(csv.rows.size() == 121);
  const double step = 6.0 / 120.0;
  for (std::size_t i : {std::size_t(0), std::size_t(60), std::size_t(120)}) {
    const double tau = 0.0 + step * static_cast<double>(i);
    CHECK(csv.rows[i][0] == tau);  // 17 significant digits round-trip exactly
    CHECK(csv.rows[i][1] == mbs::g1_resonant(10.0, tau));
  }
  CHECK(csv.rows[0][1] == 1.0);
}

TEST_CASE("reruns and sidecar replays are byte-identical") {
  const std::string cfg = work_dir() + "/g1_replay.json";
  const std::string out = work_dir() + "/g1_replay.csv";
  write_file(cfg, R"({"sweep": {"range": [0.0, 3.0], "points": 31}})");
  const std::string args = "g1 --config \"" + cfg + "\" --out \"" + out + "\"";
  REQUIRE(run_cli(args).exit_code == 0);
  const std::string first = read_file(out);
  REQUIRE(run_cli(args).exit_code == 0);
  CHECK(read_file(out) == first);

  // the sidecar is itself a valid config that reproduces the CSV
  const std::string sidecar = out + ".config.json";
  const nlohmann::json echo = nlohmann::json::parse(read_file(sidecar));
  CHECK(echo.at("subcommand") == "g1");
  CHECK(echo.at("output") == out);
  REQUIRE(run_cli("g1 --config \"" + sidecar + "\"").exit_code == 0);
  CHECK(read_file(out) == first);
}

TEST_CASE("cloud Monte Carlo: bytes independent of thread count, not of seed") {
  const std::string cfg = work_dir() + "/cloud_mc.json";
  const std::string out = work_dir() + "/cloud_mc.csv";
  write_file(cfg, std::string(R"({"method": "montecarlo", "n_samples": 10000, )") +
                      kCloudSweep + "}");
  const std::string args =
      "cloud --config \"" + cfg + "\" --out \"" + out + "\"";
  REQUIRE(run_cli(args, "MBS_LAB_THREADS=1").exit_code == 0);
  const std::string serial = read_file(out);
  REQUIRE(run_cli(args, "MBS_LAB_THREADS=4").exit_code == 0);
  CHECK(read_file(out) == serial);
  REQUIRE(run_cli(args).exit_code == 0);
  CHECK(read_file(out) == serial);

  const Csv csv = parse_csv(serial);
  CHECK(csv.header == "theta_rad,intensity_norm,std_error");
  REQUIRE(csv.rows.size() == 41);
  for (const auto& row : csv.rows) CHECK(row[2] > 0.0);

  REQUIRE(run_cli(args + " --seed 5").exit_code == 0);
  CHECK(read_file(out) != serial);
  const nlohmann::json echo =
      nlohmann::json::parse(read_file(out + ".config.json"));
  CHECK(echo.at("seed") == 5);
}

TEST_CASE("cloud quadrature: method and tol overrides land in the sidecar") {
  const std::string cfg = work_dir() + "/cloud_q.json";
  const std::string out = work_dir() + "/cloud_q.csv";
  write_file(cfg, std::string("{") + kCloudSweep + "}");
  const CliResult r = run_cli("cloud --config \"" + cfg + "\" --out \"" + out +
                              "\" --method closed_perp --tol 1e-6");
  CHECK(r.exit_code == 0);
  const Csv csv = parse_csv(read_file(out));
  CHECK(csv.header == "theta_rad,intensity_norm");
  REQUIRE(csv.rows.size() == 41);
  for (const auto& row : csv.rows) CHECK(row[1] > 0.0);
  const nlohmann::json echo =
      nlohmann::json::parse(read_file(out + ".config.json"));
  CHECK(echo.at("method") == "closed_perp");
  CHECK(echo.at("tol") == 1e-6);
}

TEST_CASE("spectrum subcommand prints the three spectral weights") {
  const std::string cfg = work_dir() + "/spec.json";
  const std::string out = work_dir() + "/spec.csv";
  write_file(cfg, "{}");
  const CliResult r =
      run_cli("spectrum --config \"" + cfg + "\" --out \"" + out + "\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("coherent_weight 0.090909090909090912") !=
        std::string::npos);
  const std::size_t pos = r.out.find("total_weight ");
  REQUIRE(pos != std::string::npos);
  const double total =
      std::strtod(r.out.c_str() + pos + std::string("total_weight ").size(),
                  nullptr);
  CHECK(std::abs(total - 1.0) <= 1e-6);
  const Csv csv = parse_csv(read_file(out));
  CHECK(csv.header == "nu_gamma,density");
  CHECK(csv.rows.size() == 1251);
}

TEST_CASE("single-atom antinode sweep: full contrast at tau 0, revival near 2") {
  const std::string cfg = work_dir() + "/single.json";
  const std::string out = work_dir() + "/single.csv";
  write_file(cfg,
             R"({"drive": {"s0": 5.0, "gamma_wp_deg": 0.0},
                 "fixed": {"z_m": 0.0}})");
  const CliResult r =
      run_cli("single --config \"" + cfg + "\" --out \"" + out + "\"");
  CHECK(r.exit_code == 0);
  const Csv csv = parse_csv(read_file(out));
  CHECK(csv.header == "tau_gamma,contrast_michelson,contrast_p2p,g1");
  REQUIRE(csv.rows.size() == 121);
  CHECK(csv.rows[0][1] == 1.0);
  CHECK(csv.rows[0][2] == 2.0);
  CHECK(csv.rows[0][3] == 1.0);
  // p2p contrast = 2 g1(20, tau); the revival maximum 2 g1 = 0.66847409
  // sits at tau = 1.9608, between the 0.05-spaced grid points
  double best_tau = 0.0, best_p2p = 0.0;
  for (const auto& row : csv.rows) {
    if (row[0] > 1.5 && row[0] < 2.5 && row[2] > best_p2p) {
      best_p2p = row[2];
      best_tau = row[0];
    }
  }
  CHECK(best_p2p >= 0.66);
  CHECK(best_p2p <= 0.66847409 + 1e-6);
  CHECK(best_tau >= 1.85);
  CHECK(best_tau <= 2.05);
}

TEST_CASE("contrast subcommand tracks the correlation function") {
  const std::string cfg = work_dir() + "/contrast.json";
  const std::string out = work_dir() + "/contrast.csv";
  write_file(cfg, R"({"sweep": {"range": [0.0, 6.0], "points": 13}})");
  const CliResult r =
      run_cli("contrast --config \"" + cfg + "\" --out \"" + out + "\"");
  CHECK(r.exit_code == 0);
  const Csv csv = parse_csv(read_file(out));
  CHECK(csv.header == "tau_gamma,contrast_michelson,contrast_p2p,g1");
  REQUIRE(csv.rows.size() == 13);
  for (const auto& row : csv.rows) {
    CHECK(std::abs(row[2] - row[3]) <= 1e-3);  // p2p contrast vs g1(10, tau)
    CHECK(row[1] == doctest::Approx(0.5 * row[2]).epsilon(1e-15));
  }
}

TEST_CASE("config and usage errors exit 1 and write nothing") {
  const std::string out = work_dir() + "/never.csv";

  const std::string bad_key = work_dir() + "/bad_key.json";
  write_file(bad_key, R"({"bogus": 1})");
  CliResult r = run_cli("g1 --config \"" + bad_key + "\" --out \"" + out + "\"");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("\"bogus\"") != std::string::npos);
  CHECK(!file_exists(out));

  const std::string bad_s0 = work_dir() + "/bad_s0.json";
  write_file(bad_s0, R"({"drive": {"s0": -1.0}})");
  r = run_cli("g1 --config \"" + bad_s0 + "\" --out \"" + out + "\"");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("\"drive.s0\"") != std::string::npos);

  r = run_cli("g1 --config \"" + work_dir() + "/missing.json\"");
  CHECK(r.exit_code == 1);

  r = run_cli("orbit --config \"" + bad_key + "\"");
  CHECK(r.exit_code == 1);

  r = run_cli("g1");  // missing required --config
  CHECK(r.exit_code == 1);

  r = run_cli("--help");
  CHECK(r.exit_code == 0);
}

TEST_CASE("numerical failures exit 2 and name the sweep point") {
  const std::string cfg = work_dir() + "/contrast_dark.json";
  const std::string out = work_dir() + "/contrast_dark.csv";
  write_file(cfg, R"({"drive": {"s0": 0.0},
                      "sweep": {"range": [0.0, 2.0], "points": 5}})");
  const CliResult r =
      run_cli("contrast --config \"" + cfg + "\" --out \"" + out + "\"");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("at tau=") != std::string::npos);
  CHECK(!file_exists(out));
}

TEST_CASE("validate --fast passes inside its time budget") {
  const auto t0 = std::chrono::steady_clock::now();
  const CliResult r = run_cli("validate --fast");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("all passed") != std::string::npos);
  CHECK(elapsed < 10.0);
}

TEST_CASE("validate catches an injected fault and rejects unknown ones") {
  CliResult r = run_cli("validate --fast --inject-fault g1-decay");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("fault injected") != std::string::npos);
  CHECK(r.out.find("FAIL") != std::string::npos);

  r = run_cli("validate --fast --inject-fault warp");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("unknown fault") != std::string::npos);
}

TEST_CASE("optically thick clouds trigger a stderr warning, not a failure") {
  const std::string cfg = work_dir() + "/thick.json";
  const std::string out = work_dir() + "/thick.csv";
  write_file(cfg, std::string(R"({"cloud": {"n_atoms": 1000000000}, )") +
                      kCloudSweep + "}");
  const CliResult r =
      run_cli("cloud --config \"" + cfg + "\" --out \"" + out + "\"");
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("optical depth") != std::string::npos);
  CHECK(file_exists(out));
}
