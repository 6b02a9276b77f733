// Command-line front end: reproduces the package's figures and tables as
// plot-ready CSV/JSON files and exposes ad-hoc queries into the library.
//
// Exit codes: 0 success, 2 validation error, 3 numerical-health error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qmacro/reports.hpp"

namespace {

void emit(const qmacro::reports::Table& table, const std::string& format,
          const std::string& out_path) {
  const std::string payload = table.render(format);
  if (out_path.empty() || out_path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw qmacro::validation_error("cannot open output file: " + out_path);
  os << payload;
}

std::vector<int> parse_odd_range(const std::string& spec) {
  // "a:b" inclusive or a single odd value
  const auto colon = spec.find(':');
  int lo, hi;
  if (colon == std::string::npos) {
    lo = hi = std::stoi(spec);
  } else {
    lo = std::stoi(spec.substr(0, colon));
    hi = std::stoi(spec.substr(colon + 1));
  }
  qmacro::require(lo >= 3 && lo % 2 == 1 && hi >= lo,
                  "n-range must be 'a:b' with odd a >= 3 (only odd N is defined "
                  "for this cloner map)");
  std::vector<int> out;
  for (int n = lo; n <= hi; n += 2) out.push_back(n);
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for cloned-spin macroscopicity and metrology"};
  app.require_subcommand(1);
  app.fallthrough(); // let --format/--out appear after the subcommand too

  std::string format = "csv";
  std::string out_path;
  app.add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "output file (default: stdout)");

  // subgroup
  auto* subgroup = app.add_subcommand(
      "subgroup", "success probability P(k) and P(N-k), large-N asymptotics");
  std::string k_range = "1:200";
  subgroup->add_option("--k-range", k_range, "k range 'a:b' (default 1:200)");

  // measures
  auto* measures = app.add_subcommand("measures", "effective-size table over odd N");
  std::string n_range_measures = "3:101";
  double threshold = 0.99;
  measures->add_option("--n-range", n_range_measures, "odd-N range 'a:b' (default 3:101)");
  measures->add_option("--threshold", threshold,
                       "subgroup distinguishability threshold in (1/2,1)");

  // distinguish
  auto* distinguish = app.add_subcommand(
      "distinguish", "distinguishability D(N) for the three imperfection scenarios");
  std::string n_range_dist = "11:199";
  int n_step = 4;
  double u = 0.9;
  double sigma_opt = -1.0;
  distinguish->add_option("--n-range", n_range_dist, "odd-N range 'a:b' (default 11:199)");
  distinguish->add_option("--n-step", n_step, "grid step, even (default 4)");
  distinguish->add_option("--u", u, "phase-noise parameter in [1/2,1] (default 0.9)");
  distinguish->add_option("--sigma", sigma_opt,
                          "fixed POVM width (default: sigma = sqrt(N))");

  // povm-profile
  auto* povm = app.add_subcommand("povm-profile",
                                  "outcome probabilities under the Gaussian POVM");
  int povm_n = 31;
  std::vector<double> povm_sigmas;
  povm->add_option("--n", povm_n, "odd number of qubits (default 31)");
  povm->add_option("--sigma", povm_sigmas,
                   "POVM widths, repeatable; 0 = sharp (default: 0, 1, sqrt(N))");

  // metrology
  auto* metrology = app.add_subcommand(
      "metrology", "relative improvement of Dicke-probe frequency estimation");
  std::string preset = "bitflip";
  std::string n_range_met = "3:9";
  double omega = -1.0, gamma = -1.0, total_time = 1.0;
  std::vector<std::string> meas = {"global", "z", "local-opt"};
  metrology->add_option("--preset", preset, "bitflip (omega=1, gamma=0.5) or white "
                                            "(omega=1, gamma=0.2)")
      ->check(CLI::IsMember(
          {"bitflip", "white", "fig-metrology-bitflip", "fig-metrology-white"}));
  metrology->add_option("--n-range", n_range_met, "odd-N range 'a:b' (default 3:9)");
  metrology->add_option("--omega", omega, "rotation frequency (overrides preset)");
  metrology->add_option("--gamma", gamma, "decoherence rate (overrides preset)");
  metrology->add_option("--total-time", total_time, "total experiment time T (default 1)");
  metrology->add_option("--measurement", meas,
                        "measurements to tabulate: global, z, local-opt (repeatable)");

  // oracle-check
  auto* oracle_check = app.add_subcommand(
      "oracle-check", "compare every analytic formula against brute force");
  int oracle_n = 7;
  oracle_check->add_option("--n", oracle_n, "odd number of qubits <= 7 (default 7)");

  CLI11_PARSE(app, argc, argv);

  try {
    qmacro::reports::Table table;
    if (subgroup->parsed()) {
      const auto colon = k_range.find(':');
      qmacro::require(colon != std::string::npos, "k-range must be 'a:b'");
      qmacro::reports::SubgroupConfig cfg;
      cfg.k_min = std::stoi(k_range.substr(0, colon));
      cfg.k_max = std::stoi(k_range.substr(colon + 1));
      table = qmacro::reports::cmd_fig_subgroup(cfg);
    } else if (measures->parsed()) {
      table = qmacro::reports::cmd_table_effective_sizes(
          {parse_odd_range(n_range_measures), threshold});
    } else if (distinguish->parsed()) {
      const auto ns = parse_odd_range(n_range_dist);
      qmacro::reports::DistinguishConfig cfg;
      cfg.n_min = ns.front();
      cfg.n_max = ns.back();
      cfg.n_step = n_step;
      cfg.u = u;
      cfg.sigma_scales_with_n = sigma_opt <= 0.0;
      cfg.sigma = sigma_opt;
      table = qmacro::reports::cmd_fig_distinguishability(cfg);
    } else if (povm->parsed()) {
      table = qmacro::reports::cmd_fig_povm_profiles({povm_n, povm_sigmas});
    } else if (metrology->parsed()) {
      const auto ns = parse_odd_range(n_range_met);
      qmacro::reports::MetrologyConfig cfg;
      cfg.preset = preset;
      cfg.n_min = ns.front();
      cfg.n_max = ns.back();
      cfg.omega = omega;
      cfg.gamma = gamma;
      cfg.total_time = total_time;
      cfg.measurements = meas;
      table = qmacro::reports::cmd_fig_metrology(cfg);
    } else if (oracle_check->parsed()) {
      table = qmacro::reports::cmd_oracle_check({oracle_n});
      emit(table, format, out_path);
      return table.extra.value("all_pass", false) ? 0 : 1;
    }
    emit(table, format, out_path);
  } catch (const qmacro::numerical_health_error& e) {
    std::cerr << "numerical-health error: " << e.what() << "\n";
    return 3;
  } catch (const qmacro::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
