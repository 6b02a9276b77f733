#pragma once

// Data-file production behind the CLI: every figure and table as CSV or JSON
// with the full run configuration embedded in the header. Output is
// deterministic (fixed grids, fixed reduction orders, locale-independent
// formatting), so identical configurations give byte-identical files.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmacro/distinguish.hpp"
#include "qmacro/macromeasures.hpp"
#include "qmacro/metrology.hpp"
#include "qmacro/oracle.hpp"
#include "qmacro/symcore.hpp"

namespace qmacro::reports {

using nlohmann::json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct Table {
  std::string command;
  json config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json extra; // fit summaries and similar non-tabular results

  std::string to_csv() const {
    std::ostringstream os;
    os << "# qmacro " << command << "\n";
    os << "# config: " << config.dump() << "\n";
    if (!extra.is_null()) os << "# extra: " << extra.dump() << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
      os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        os << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
    return os.str();
  }

  std::string to_json() const {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["columns"] = columns;
    j["rows"] = rows;
    if (!extra.is_null()) j["extra"] = extra;
    return j.dump(2) + "\n";
  }

  std::string render(const std::string& format) const {
    require(format == "csv" || format == "json", "format must be csv or json");
    return format == "csv" ? to_csv() : to_json();
  }
};

// ---------------------------------------------------------------------------
// subgroup: success probability P(k) and P(N-k) in the large-N limit
// ---------------------------------------------------------------------------

struct SubgroupConfig {
  int k_min = 1;
  int k_max = 200;
};

inline Table cmd_fig_subgroup(const SubgroupConfig& cfg) {
  require(cfg.k_min >= 1 && cfg.k_max >= cfg.k_min, "subgroup: invalid k range");
  Table t;
  t.command = "subgroup";
  t.config = {{"command", "subgroup"}, {"k_min", cfg.k_min}, {"k_max", cfg.k_max},
              {"mode", "asymptotic"}};
  t.columns = {"k", "p_measure_k", "p_measure_all_but_k"};
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    t.rows.push_back({std::to_string(k),
                      format_double(asymptotic_subgroup_probability_few(k)),
                      format_double(asymptotic_subgroup_probability_all_but(k))});
  }
  return t;
}

// ---------------------------------------------------------------------------
// measures: effective-size table
// ---------------------------------------------------------------------------

struct MeasuresConfig {
  std::vector<int> n_list;
  double threshold = 0.99;
};

inline Table cmd_table_effective_sizes(const MeasuresConfig& cfg) {
  Table t;
  t.command = "measures";
  t.config = {{"command", "measures"}, {"n_list", cfg.n_list}, {"threshold", cfg.threshold}};
  t.columns = {"n", "korsbakken", "marquardt", "relative_fisher", "index_p", "fisher"};
  for (int n : cfg.n_list) {
    const EffectiveSizeReport r = effective_sizes(n, cfg.threshold);
    t.rows.push_back({std::to_string(n), format_double(r.korsbakken),
                      format_double(r.marquardt), format_double(r.relative_fisher),
                      format_double(r.index_p_size), format_double(r.fisher_size)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// distinguish: D(N) for the three imperfection scenarios + extrapolation
// ---------------------------------------------------------------------------

struct DistinguishConfig {
  int n_min = 11;
  int n_max = 199;
  int n_step = 4; // odd grid: n, n+step, ...
  double u = 0.9;
  bool sigma_scales_with_n = true; // sigma = sqrt(N)
  double sigma = 1.0;              // used when the flag is off
};

inline Table cmd_fig_distinguishability(const DistinguishConfig& cfg) {
  require(cfg.n_min >= 3 && cfg.n_min % 2 == 1, "distinguish: n_min must be odd and >= 3");
  require(cfg.n_step % 2 == 0 && cfg.n_step > 0, "distinguish: n_step must be even");
  Table t;
  t.command = "distinguish";
  t.config = {{"command", "distinguish"}, {"n_min", cfg.n_min}, {"n_max", cfg.n_max},
              {"n_step", cfg.n_step},     {"u", cfg.u},
              {"sigma", cfg.sigma_scales_with_n ? json("sqrt(n)") : json(cfg.sigma)}};
  t.columns = {"n", "scenario", "parameter", "d"};
  std::vector<int> grid;
  for (int n = cfg.n_min; n <= cfg.n_max; n += cfg.n_step) grid.push_back(n);
  std::vector<double> d_pair, d_povm, d_noise;
  for (int n : grid) {
    d_pair.push_back(0.5 + 0.25 * pair_coarsened_delta(n));
    const double sig = cfg.sigma_scales_with_n ? std::sqrt(double(n)) : cfg.sigma;
    d_povm.push_back(distinguishability(povm_probabilities(n, sig)));
    d_noise.push_back(distinguishability(noisy_probabilities(n, cfg.u)));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::string ns = std::to_string(grid[i]);
    const double sig = cfg.sigma_scales_with_n ? std::sqrt(double(grid[i])) : cfg.sigma;
    t.rows.push_back({ns, "sharp", "0", format_double(1.0)});
    t.rows.push_back({ns, "pair", "0", format_double(d_pair[i])});
    t.rows.push_back({ns, "povm", format_double(sig), format_double(d_povm[i])});
    t.rows.push_back({ns, "noise", format_double(cfg.u), format_double(d_noise[i])});
  }
  if (grid.size() >= 5) {
    json fits;
    for (auto [name, vals] : {std::pair{"pair", &d_pair}, {"povm", &d_povm},
                              {"noise", &d_noise}}) {
      const ExtrapolationResult fit = extrapolate_limit(grid, *vals);
      fits[name] = {{"d_inf", fit.d_inf},
                    {"a", fit.a},
                    {"b", fit.b},
                    {"rms_residual", fit.rms_residual},
                    {"max_residual", fit.max_residual},
                    {"ill_conditioned", fit.ill_conditioned}};
    }
    t.extra = {{"extrapolation", fits}};
  }
  return t;
}

// ---------------------------------------------------------------------------
// povm-profile: outcome probabilities for a list of widths
// ---------------------------------------------------------------------------

struct PovmProfileConfig {
  int n = 31;
  std::vector<double> sigmas; // 0 selects the sharp limit
};

inline Table cmd_fig_povm_profiles(const PovmProfileConfig& cfg) {
  require_odd_qubits(cfg.n);
  PovmProfileConfig c = cfg;
  if (c.sigmas.empty()) c.sigmas = {0.0, 1.0, std::sqrt(double(c.n))};
  Table t;
  t.command = "povm-profile";
  t.config = {{"command", "povm-profile"}, {"n", c.n}, {"sigmas", c.sigmas}};
  t.columns = {"sigma", "outcome", "p_plus", "p_minus"};
  for (double sigma : c.sigmas) {
    require(sigma >= 0.0, "povm-profile: sigma must be >= 0");
    const OutcomeDistribution d =
        sigma == 0.0 ? sharp_probabilities(c.n) : povm_probabilities(c.n, sigma);
    for (int i = 0; i <= c.n; ++i)
      t.rows.push_back({format_double(sigma), std::to_string(i),
                        format_double(d.probs_plus(i)), format_double(d.probs_minus(i))});
  }
  return t;
}

// ---------------------------------------------------------------------------
// metrology: relative-improvement table for a noise preset
// ---------------------------------------------------------------------------

struct MetrologyConfig {
  std::string preset = "bitflip"; // bitflip: omega=1, gamma=0.5; white: omega=1, gamma=0.2
  int n_min = 3;
  int n_max = 9;
  double omega = -1.0; // <0: take from preset
  double gamma = -1.0;
  double total_time = 1.0;
  std::vector<std::string> measurements = {"global", "z", "local-opt"};
};

inline Table cmd_fig_metrology(const MetrologyConfig& cfg) {
  std::string preset = cfg.preset;
  if (preset.rfind("fig-metrology-", 0) == 0) preset = preset.substr(14);
  require(preset == "bitflip" || preset == "white",
          "metrology: preset must be bitflip or white");
  const NoiseKind noise = preset == "bitflip" ? NoiseKind::BitFlip : NoiseKind::White;
  const double omega = cfg.omega > 0 ? cfg.omega : 1.0;
  const double gamma = cfg.gamma > 0 ? cfg.gamma : (noise == NoiseKind::BitFlip ? 0.5 : 0.2);
  require(cfg.n_min >= 3 && cfg.n_min % 2 == 1, "metrology: n_min must be odd and >= 3");
  std::vector<int> n_list;
  for (int n = cfg.n_min; n <= cfg.n_max; n += 2) n_list.push_back(n);
  Table t;
  t.command = "metrology";
  t.config = {{"command", "metrology"}, {"preset", preset},      {"omega", omega},
              {"gamma", gamma},         {"n_min", cfg.n_min},    {"n_max", cfg.n_max},
              {"total_time", cfg.total_time}, {"measurements", cfg.measurements}};
  t.columns = {"n", "measurement", "optimal_t", "delta_omega", "delta_omega_ps",
               "relative_improvement"};
  for (const std::string& m : cfg.measurements) {
    MeasurementKind kind;
    if (m == "global")
      kind = MeasurementKind::OptimalGlobal;
    else if (m == "z")
      kind = MeasurementKind::CollectiveZ;
    else if (m == "local-opt")
      kind = MeasurementKind::RotatedCollective;
    else
      throw validation_error("metrology: unknown measurement '" + m + "'");
    const auto rows =
        relative_improvement_curve(noise, omega, gamma, kind, n_list, cfg.total_time);
    for (const ImprovementRow& r : rows)
      t.rows.push_back({std::to_string(r.n_qubits), m, format_double(r.optimal_t),
                        format_double(r.delta_omega), format_double(r.baseline),
                        format_double(r.relative_improvement)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// oracle-check: formula-vs-brute-force report
// ---------------------------------------------------------------------------

struct OracleCheckConfig {
  int n = 7;
};

struct OracleCheckLine {
  std::string name;
  double max_deviation;
  double tolerance;
  bool pass;
};

inline std::vector<OracleCheckLine> run_oracle_checks(int n) {
  require_odd_qubits(n);
  require(n <= 7, "oracle-check: n must be at most 7");
  std::vector<OracleCheckLine> lines;
  const auto add = [&](const std::string& name, double dev, double tol) {
    lines.push_back({name, dev, tol, dev <= tol});
  };

  // x-basis coefficients against the Hadamard-transformed state
  {
    const Eigen::VectorXd beta = x_basis_coefficients(n);
    double dev = 0.0;
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
      const Eigen::VectorXcd full = oracle::embed_symmetric_state(cloner_state(n, sign));
      for (int k = 0; k <= n; ++k) {
        const Eigen::VectorXcd xdicke = oracle::embed_dicke({n, k, Axis::X});
        const double expected = ((k % 2 == 0) == (sign == Sign::Plus))
                                    ? std::sqrt(2.0) *
                                          std::exp(0.5 * log_binomial(n, k)) * beta(k)
                                    : 0.0;
        dev = std::max(dev, std::abs(xdicke.dot(full).real() - expected));
      }
    }
    add("x_basis_coefficients vs Hadamard transform", dev, 1e-12);
  }

  // sharp probabilities (Eq.-14 type)
  {
    const OutcomeDistribution d = sharp_probabilities(n);
    double dev = 0.0;
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
      const Eigen::VectorXcd full = oracle::embed_symmetric_state(cloner_state(n, sign));
      const Eigen::VectorXd p = oracle::weight_distribution(full, n, Axis::X);
      const Eigen::VectorXd& q = sign == Sign::Plus ? d.probs_plus : d.probs_minus;
      dev = std::max(dev, (p - q).cwiseAbs().maxCoeff());
    }
    add("sharp probabilities vs brute force", dev, 1e-12);
  }

  // POVM probabilities (Eq.-13 type) and completeness
  {
    double dev = 0.0, cdev = 0.0;
    for (double sigma : {0.8, 2.0, std::sqrt(double(n))}) {
      const OutcomeDistribution d = povm_probabilities(n, sigma);
      Eigen::VectorXd norm = Eigen::VectorXd::Zero(n + 1);
      for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k)
          norm(j) += std::exp(-double(k - j) * double(k - j) / (2.0 * sigma * sigma));
      for (Sign sign : {Sign::Plus, Sign::Minus}) {
        const Eigen::VectorXcd full = oracle::embed_symmetric_state(cloner_state(n, sign));
        const Eigen::VectorXd sharp = oracle::weight_distribution(full, n, Axis::X);
        for (int i = 0; i <= n; ++i) {
          double acc = 0.0;
          for (int k = 0; k <= n; ++k)
            acc += sharp(k) / norm(k) *
                   std::exp(-double(k - i) * double(k - i) / (2.0 * sigma * sigma));
          const double q = (sign == Sign::Plus ? d.probs_plus : d.probs_minus)(i);
          dev = std::max(dev, std::abs(acc - q));
        }
      }
      // completeness of the Kraus weights
      for (int k = 0; k <= n; ++k) {
        double tot = 0.0;
        for (int i = 0; i <= n; ++i)
          tot += std::exp(-double(k - i) * double(k - i) / (2.0 * sigma * sigma)) / norm(k);
        cdev = std::max(cdev, std::abs(tot - 1.0));
      }
    }
    add("povm probabilities vs brute force", dev, 1e-10);
    add("povm completeness sum E_i^2 = 1", cdev, 1e-10);
  }

  // noisy probabilities (Eq.-12+15 type)
  {
    double dev = 0.0;
    for (double u : {1.0, 0.9, 0.75, 0.5}) {
      const OutcomeDistribution d = noisy_probabilities(n, u);
      for (Sign sign : {Sign::Plus, Sign::Minus}) {
        const Eigen::VectorXcd full = oracle::embed_symmetric_state(cloner_state(n, sign));
        Eigen::MatrixXcd rho = full * full.adjoint();
        rho = oracle::apply_local_channel(rho, n, oracle::LocalChannelKind::PhaseZ, u);
        const Eigen::VectorXd p = oracle::weight_distribution(rho, n, Axis::X);
        const Eigen::VectorXd& q = sign == Sign::Plus ? d.probs_plus : d.probs_minus;
        dev = std::max(dev, (p - q).cwiseAbs().maxCoeff());
      }
    }
    add("noisy probabilities vs brute force", dev, 1e-10);
  }

  // metrology probabilities (Eq.-16+19 type), bit-flip and white noise
  {
    double dev = 0.0;
    for (NoiseKind noise : {NoiseKind::BitFlip, NoiseKind::White}) {
      for (double alpha : {0.0, 0.3}) {
        const EstimationScenario sc{n, 1.1, 0.5, noise, 1.0, MeasurementKind::CollectiveZ,
                                    alpha};
        const double t = 0.7;
        const Eigen::VectorXd s = measurement_probabilities(sc, t, alpha);
        Eigen::MatrixXcd rho = evolved_state(sc, t);
        rho = oracle::apply_collective_x_rotation(rho, n, alpha);
        const Eigen::VectorXd p = oracle::weight_distribution(rho, n, Axis::Z);
        dev = std::max(dev, (p - s).cwiseAbs().maxCoeff());
      }
    }
    add("metrology probabilities vs brute force", dev, 1e-10);
  }

  // reduced states vs partial trace
  {
    double dev = 0.0;
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
      const Eigen::VectorXcd full = oracle::embed_symmetric_state(cloner_state(n, sign));
      const Eigen::MatrixXcd rho = full * full.adjoint();
      for (int k = 1; k <= n; ++k) {
        std::vector<int> kept(k);
        for (int q = 0; q < k; ++q) kept[q] = q;
        const Eigen::MatrixXcd red = oracle::partial_trace(rho, n, kept);
        const Eigen::MatrixXcd sym = oracle::symmetric_block(red, k);
        const ReducedState rs = reduced_state(n, sign, k);
        dev = std::max(dev, (sym - rs.matrix).cwiseAbs().maxCoeff());
      }
    }
    add("reduced states vs partial trace", dev, 1e-12);
  }

  // mutation canary: a wrong beta normalization (the printed 2^{N-1}) must be
  // caught by the sharp-probability check
  {
    const OutcomeDistribution d = sharp_probabilities(n);
    const Eigen::VectorXcd full = oracle::embed_symmetric_state(cloner_state(n, Sign::Plus));
    const Eigen::VectorXd p = oracle::weight_distribution(full, n, Axis::X);
    const double dev = (p - 2.0 * d.probs_plus).cwiseAbs().maxCoeff(); // corrupted by 2x
    lines.push_back({"mutation canary (corrupted normalization detected)", dev, 1e-10,
                     dev > 1e-3});
  }
  return lines;
}

inline Table cmd_oracle_check(const OracleCheckConfig& cfg) {
  Table t;
  t.command = "oracle-check";
  t.config = {{"command", "oracle-check"}, {"n", cfg.n}};
  t.columns = {"check", "max_deviation", "tolerance", "status"};
  bool all_pass = true;
  for (const OracleCheckLine& line : run_oracle_checks(cfg.n)) {
    all_pass = all_pass && line.pass;
    t.rows.push_back({line.name, format_double(line.max_deviation),
                      format_double(line.tolerance), line.pass ? "pass" : "FAIL"});
  }
  t.extra = {{"all_pass", all_pass}};
  return t;
}

} // namespace qmacro::reports
