#pragma once

// Distinguishability D = 1/2 + Delta/4 of the two cloner outputs under three
// measurement imperfections: pair-coarsened collective readout, Gaussian
// POVM, and local phase noise on the input states.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qmacro/combinatorics.hpp"
#include "qmacro/errors.hpp"
#include "qmacro/symcore.hpp"

namespace qmacro {

/// Outcome probabilities of the same measurement on |psi^+> and |psi^->.
struct OutcomeDistribution {
  Eigen::VectorXd probs_plus;
  Eigen::VectorXd probs_minus;

  void validate(double tol = 1e-10) const {
    require(probs_plus.size() == probs_minus.size(), "OutcomeDistribution: size mismatch");
    require(std::abs(probs_plus.sum() - 1.0) < tol, "OutcomeDistribution: plus not normalized");
    require(std::abs(probs_minus.sum() - 1.0) < tol,
            "OutcomeDistribution: minus not normalized");
    require(probs_plus.minCoeff() > -1e-12 && probs_minus.minCoeff() > -1e-12,
            "OutcomeDistribution: negative probability");
  }
};

inline double total_variation_delta(const OutcomeDistribution& d) {
  return (d.probs_plus - d.probs_minus).cwiseAbs().sum();
}

/// D = 1/2 + Delta/4 in [1/2, 1].
inline double distinguishability(const OutcomeDistribution& d) {
  return 0.5 + 0.25 * total_variation_delta(d);
}

namespace detail {

/// Exact parity-resolved sharp probabilities 2 C(N,k) beta_k^2; row 0 holds
/// the plus state (even k), row 1 the minus state (odd k).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> sharp_probability_pair(int n_qubits) {
  require_odd_qubits(n_qubits);
  const int N = n_qubits, x = (N - 1) / 2;
  const BigInt denom = (BigInt(1) << N) * binomial_big(N, x);
  Eigen::VectorXd plus = Eigen::VectorXd::Zero(N + 1);
  Eigen::VectorXd minus = Eigen::VectorXd::Zero(N + 1);
  for (int k = 0; k <= N; ++k) {
    const BigInt s = signed_vandermonde_sum(k, N - k, x);
    if (s == 0) continue;
    const double p = to_double(BigRational(2 * binomial_big(N, k) * s * s, denom));
    (k % 2 == 0 ? plus : minus)(k) = p;
  }
  return {plus, minus};
}

} // namespace detail

/// Eq.-(14)-type probabilities of the sharp collective x measurement. The
/// supports are disjoint (even k for plus, odd for minus), so D = 1.
inline OutcomeDistribution sharp_probabilities(int n_qubits) {
  auto [plus, minus] = detail::sharp_probability_pair(n_qubits);
  return {std::move(plus), std::move(minus)};
}

/// Merge neighbouring outcomes (0,1), (2,3), ... pairwise; for odd N the
/// N+1 outcomes pair up exactly and parity information is erased.
inline OutcomeDistribution pair_coarsened_probabilities(int n_qubits) {
  const OutcomeDistribution sharp = sharp_probabilities(n_qubits);
  const int bins = (n_qubits + 1) / 2;
  OutcomeDistribution out{Eigen::VectorXd::Zero(bins), Eigen::VectorXd::Zero(bins)};
  for (int r = 0; r < bins; ++r) {
    out.probs_plus(r) = sharp.probs_plus(2 * r) + sharp.probs_plus(2 * r + 1);
    out.probs_minus(r) = sharp.probs_minus(2 * r) + sharp.probs_minus(2 * r + 1);
  }
  return out;
}

inline double pair_coarsened_delta(int n_qubits) {
  return total_variation_delta(pair_coarsened_probabilities(n_qubits));
}

/// Gaussian POVM of width sigma. Kraus weights are normalized as
/// E_i = sum_j n_j^{-1/2} e^{-(i-j)^2/(4 sigma^2)} pi_j with
/// n_j = sum_k e^{-(k-j)^2/(2 sigma^2)}, which makes sum_i E_i^2 = identity
/// on the collective subspace (asserted in the tests).
inline OutcomeDistribution povm_probabilities(int n_qubits, double sigma) {
  require(sigma > 0.0, "povm_probabilities: sigma must be positive");
  const int N = n_qubits;
  const OutcomeDistribution sharp = sharp_probabilities(N);
  Eigen::VectorXd norm = Eigen::VectorXd::Zero(N + 1);
  for (int j = 0; j <= N; ++j)
    for (int k = 0; k <= N; ++k)
      norm(j) += std::exp(-double(k - j) * double(k - j) / (2.0 * sigma * sigma));
  OutcomeDistribution out{Eigen::VectorXd::Zero(N + 1), Eigen::VectorXd::Zero(N + 1)};
  for (int i = 0; i <= N; ++i) {
    double accp = 0.0, accm = 0.0;
    for (int k = 0; k <= N; ++k) {
      const double g = std::exp(-double(k - i) * double(k - i) / (2.0 * sigma * sigma)) / norm(k);
      accp += sharp.probs_plus(k) * g;
      accm += sharp.probs_minus(k) * g;
    }
    out.probs_plus(i) = accp;
    out.probs_minus(i) = accm;
  }
  return out;
}

namespace detail {

/// eta_k(i): probability that a weight-k x-basis string is read out as
/// weight i after independent sign flips with probability 1-u per site.
/// Summing over error counts m of the parity of |i-k| reproduces the
/// half-integer-index reading of the printed eta sum.
inline double noise_transfer(int N, int k, int i, double u) {
  double acc = 0.0;
  for (int m = std::abs(i - k); m <= N; m += 2) {
    const int j = (k + m - i) / 2;
    if (j < 0 || j > k || m - j < 0 || m - j > N - k) continue;
    acc += std::pow(u, N - m) * std::pow(1.0 - u, m) *
           std::exp(log_binomial(k, j) + log_binomial(N - k, m - j));
  }
  return acc;
}

} // namespace detail

/// Eq.-(12)+(15)-type probabilities: sharp statistics pushed through the
/// local phase-noise channel with u = (1 + e^{-gamma t})/2 in [1/2, 1].
inline OutcomeDistribution noisy_probabilities(int n_qubits, double u) {
  require(u >= 0.5 && u <= 1.0, "noisy_probabilities: u must lie in [1/2,1]");
  const int N = n_qubits;
  const OutcomeDistribution sharp = sharp_probabilities(N);
  OutcomeDistribution out{Eigen::VectorXd::Zero(N + 1), Eigen::VectorXd::Zero(N + 1)};
  for (int i = 0; i <= N; ++i) {
    double accp = 0.0, accm = 0.0;
    for (int k = 0; k <= N; ++k) {
      if (sharp.probs_plus(k) == 0.0 && sharp.probs_minus(k) == 0.0) continue;
      const double eta = detail::noise_transfer(N, k, i, u);
      accp += sharp.probs_plus(k) * eta;
      accm += sharp.probs_minus(k) * eta;
    }
    out.probs_plus(i) = accp;
    out.probs_minus(i) = accm;
  }
  return out;
}

/// Measurement/imperfection scenario selector.
struct MeasurementSpec {
  enum class Kind { Sharp, PairCoarsened, GaussianPOVM, NoisyInput };
  Kind kind = Kind::Sharp;
  double sigma = 1.0; // GaussianPOVM width
  double u = 1.0;     // NoisyInput phase-noise parameter

  void validate() const {
    if (kind == Kind::GaussianPOVM) require(sigma > 0.0, "MeasurementSpec: sigma > 0");
    if (kind == Kind::NoisyInput)
      require(u >= 0.5 && u <= 1.0, "MeasurementSpec: u must lie in [1/2,1]");
  }
};

inline OutcomeDistribution outcome_distribution(int n_qubits, const MeasurementSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case MeasurementSpec::Kind::Sharp: return sharp_probabilities(n_qubits);
    case MeasurementSpec::Kind::PairCoarsened: return pair_coarsened_probabilities(n_qubits);
    case MeasurementSpec::Kind::GaussianPOVM: return povm_probabilities(n_qubits, spec.sigma);
    case MeasurementSpec::Kind::NoisyInput: return noisy_probabilities(n_qubits, spec.u);
  }
  throw validation_error("outcome_distribution: unknown measurement kind");
}

// ---------------------------------------------------------------------------
// Extrapolation of D(N) to the large-N limit
// ---------------------------------------------------------------------------

struct ExtrapolationResult {
  double d_inf;
  double a; // 1/N coefficient
  double b; // 1/N^2 coefficient
  double rms_residual;
  double max_residual;
  bool ill_conditioned;
};

/// Least-squares fit D(N) = D_inf + a/N + b/N^2 over an odd-N grid. The
/// functional form is a choice, so residuals are reported with the result.
inline ExtrapolationResult extrapolate_limit(const std::vector<int>& n_grid,
                                             const std::vector<double>& values) {
  require(n_grid.size() == values.size(), "extrapolate_limit: grid/value size mismatch");
  require(n_grid.size() >= 5, "extrapolate_limit: need at least 5 grid points");
  const int rows = int(n_grid.size());
  Eigen::MatrixXd a(rows, 3);
  Eigen::VectorXd y(rows);
  for (int r = 0; r < rows; ++r) {
    const double invn = 1.0 / double(n_grid[r]);
    a(r, 0) = 1.0;
    a(r, 1) = invn;
    a(r, 2) = invn * invn;
    y(r) = values[r];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector3d coef = svd.solve(y);
  const Eigen::VectorXd res = a * coef - y;
  ExtrapolationResult out{};
  out.d_inf = coef(0);
  out.a = coef(1);
  out.b = coef(2);
  out.rms_residual = std::sqrt(res.squaredNorm() / rows);
  out.max_residual = res.cwiseAbs().maxCoeff();
  const double cond = svd.singularValues()(0) / svd.singularValues()(2);
  out.ill_conditioned = !(cond < 1e12);
  return out;
}

} // namespace qmacro
