#pragma once

// Effective-size measures for the cloned micro-macro state: subgroup
// distinguishability (Korsbakken), two-operator mapping certificate
// (Marquardt), covariance-matrix variance maximization (Bjork-Mana relative
// Fisher, index-p, Fisher size).

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmacro/combinatorics.hpp"
#include "qmacro/errors.hpp"
#include "qmacro/symcore.hpp"

namespace qmacro {

inline double trace_norm(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

/// Trace norm of a real symmetric tridiagonal matrix (zero diagonal allowed).
/// O(k^2), which keeps the N ~ 2000 exact sweeps cheap.
inline double trace_norm_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Subgroup success probability P = 1/2 + 1/4 ||rho_k^+ - rho_k^-||_1
// ---------------------------------------------------------------------------

enum class SubgroupMode { Exact, Asymptotic };

struct SubgroupProbability {
  double value;
  bool used_asymptotic;
  bool warning; // asymptotic validity heuristic failed and no exact fallback
};

/// Large-N limit when only k particles are measured: the difference operator
/// is 2^-k sum_j C(k,j) sqrt((k-j)/(j+1)) (|j><j+1| + h.c.).
inline double asymptotic_subgroup_probability_few(int k) {
  require(k >= 1, "asymptotic subgroup probability: k >= 1");
  Eigen::VectorXd sub(k);
  for (int j = 0; j < k; ++j)
    sub(j) = std::exp(log_binomial(k, j) - k * std::numbers::ln2) *
             std::sqrt(double(k - j) / double(j + 1));
  return 0.5 + 0.25 * trace_norm_tridiagonal(Eigen::VectorXd::Zero(k + 1), sub);
}

/// Large-N limit when all but kappa particles are measured: the difference
/// operator reduces to a (kappa+2)-dimensional window with weights
/// 2^-kappa C(kappa,s).
inline double asymptotic_subgroup_probability_all_but(int kappa) {
  require(kappa >= 0, "asymptotic subgroup probability: kappa >= 0");
  if (kappa == 0) return 1.0; // measuring every particle distinguishes perfectly
  Eigen::VectorXd sub(kappa + 1);
  for (int s = 0; s <= kappa; ++s)
    sub(s) = std::exp(log_binomial(kappa, s) - kappa * std::numbers::ln2);
  return 0.5 + 0.25 * trace_norm_tridiagonal(Eigen::VectorXd::Zero(kappa + 2), sub);
}

inline double exact_subgroup_probability(int n_qubits, int k) {
  require_odd_qubits(n_qubits);
  require(k >= 1 && k <= n_qubits, "subgroup probability: k out of [1,N]");
  const int x1 = (n_qubits - 1) / 2, x2 = (n_qubits + 1) / 2;
  const Eigen::VectorXd c1 = split_coefficients(n_qubits, k, x1);
  const Eigen::VectorXd c2 = split_coefficients(n_qubits, k, x2);
  Eigen::VectorXd sub(k);
  for (int j = 0; j < k; ++j) sub(j) = std::sqrt(c1(j) * c2(j + 1));
  return 0.5 + 0.25 * trace_norm_tridiagonal(Eigen::VectorXd::Zero(k + 1), sub);
}

inline SubgroupProbability subgroup_success_probability(int n_qubits, int k,
                                                        SubgroupMode mode) {
  if (mode == SubgroupMode::Exact)
    return {exact_subgroup_probability(n_qubits, k), false, false};
  // Asymptotic validity heuristic: one of the two ends must be small
  // relative to N, otherwise fall back to exact while it stays cheap.
  if (k <= n_qubits / 10) return {asymptotic_subgroup_probability_few(k), true, false};
  if (n_qubits - k <= n_qubits / 10)
    return {asymptotic_subgroup_probability_all_but(n_qubits - k), true, false};
  if (n_qubits <= 2000) return {exact_subgroup_probability(n_qubits, k), false, false};
  return {asymptotic_subgroup_probability_few(k), true, true};
}

// ---------------------------------------------------------------------------
// Korsbakken partition count
// ---------------------------------------------------------------------------

/// Smallest macro subgroup reaching the distinguishability threshold gives
/// floor(N/k*)+1 groups (the +1 is the micro qubit). When no k <= N/2
/// reaches the threshold the macro register counts as a single group.
inline double korsbakken_effective_size(int n_qubits, double threshold = 0.99) {
  require_odd_qubits(n_qubits);
  require(threshold > 0.5 && threshold < 1.0, "korsbakken: threshold in (1/2,1)");
  for (int k = 1; k <= n_qubits / 2; ++k) {
    if (exact_subgroup_probability(n_qubits, k) >= threshold)
      return double(n_qubits / k + 1);
  }
  return 2.0;
}

// ---------------------------------------------------------------------------
// Marquardt certificate
// ---------------------------------------------------------------------------

/// Verifies that sigma_z (x) M_z maps |phi_0> = |+>|psi^-> exactly onto
/// |phi_1> = |->|psi^+> (two one-particle operations suffice) and that no
/// single-particle operator connects them at all. Returns the certified
/// effective size 2.
inline int marquardt_check(int n_qubits) {
  require_odd_qubits(n_qubits);
  const int n = n_qubits;
  const SymmetricPureState psi_m = cloner_state(n, Sign::Minus);
  const SymmetricPureState psi_p = cloner_state(n, Sign::Plus);
  const Eigen::MatrixXcd mz =
      CollectiveObservable{CollectiveObservable::Component::Z}.matrix_z_basis(n);

  // sigma_z|+> = |->, so the mapped state is |-> (x) M_z|psi^->.
  const Eigen::VectorXcd mapped_macro = mz * psi_m.amplitudes;
  const Complex overlap = psi_p.amplitudes.dot(mapped_macro);
  const double mapped_norm = mapped_macro.norm();
  if (std::abs(overlap - 1.0) > 1e-12 || std::abs(mapped_norm - 1.0) > 1e-12)
    throw numerical_health_error(
        "marquardt_check: sigma_z (x) M_z does not map |phi_0> onto |phi_1> "
        "(collective-observable convention broken)");

  // A single-particle operator factorizes across the micro:macro split.
  // Acting on the micro qubit it picks up <psi^+|psi^->; acting on a macro
  // site it picks up <-|+> = 0 times <psi^+|M_B|psi^->/N (permutation
  // symmetry). Certify that both branch overlaps vanish.
  const double macro_branch_overlap = std::abs(psi_p.amplitudes.dot(psi_m.amplitudes));
  double best_single = 2.0 * macro_branch_overlap; // |<-|A|+>| <= ||A|| <= 2 headroom
  const double micro_branch_overlap = 0.0;         // <-|+> in exact arithmetic
  for (auto c : {CollectiveObservable::Component::X, CollectiveObservable::Component::Y,
                 CollectiveObservable::Component::Z}) {
    const Eigen::MatrixXcd m = CollectiveObservable{c}.matrix_z_basis(n);
    const double site_factor = std::abs(psi_p.amplitudes.dot(m * psi_m.amplitudes)) / n;
    best_single = std::max(best_single, micro_branch_overlap * site_factor);
  }
  if (best_single > 1e-12)
    throw numerical_health_error("marquardt_check: a single-particle operator connects the "
                                 "branches; certificate invalid");
  return 2;
}

// ---------------------------------------------------------------------------
// Covariance-matrix variance maximization
// ---------------------------------------------------------------------------

/// Real symmetric covariance matrix of the (collectively grouped) local spin
/// components, entries Re<dA dB>. dim 6 for the micro-macro ansatz
/// (sigma_j^(1), sum_{i>=2} sigma_j^(i)), dim 3 for a symmetric register.
struct CovarianceMatrix {
  int dim;
  Eigen::MatrixXd entries;
};

namespace detail {

inline std::array<Eigen::Matrix2cd, 3> micro_pauli_pm_basis() {
  // Pauli matrices in the (|+>,|->) ordering.
  Eigen::Matrix2cd sx, sy, sz;
  sx << 1, 0, 0, -1;
  sy << 0, Complex(0, 1), Complex(0, -1), 0;
  sz << 0, 1, 1, 0;
  return {sx, sy, sz};
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

} // namespace detail

inline CovarianceMatrix covariance_matrix(const SymmetricPureState& state) {
  const int n = state.n_qubits;
  std::array<Eigen::MatrixXcd, 3> m;
  m[0] = CollectiveObservable{CollectiveObservable::Component::X}.matrix_in_basis(n, state.axis);
  m[1] = CollectiveObservable{CollectiveObservable::Component::Y}.matrix_in_basis(n, state.axis);
  m[2] = CollectiveObservable{CollectiveObservable::Component::Z}.matrix_in_basis(n, state.axis);
  Eigen::Vector3d mean;
  for (int a = 0; a < 3; ++a) mean(a) = state.amplitudes.dot(m[a] * state.amplitudes).real();
  CovarianceMatrix c{3, Eigen::MatrixXd(3, 3)};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      c.entries(a, b) =
          state.amplitudes.dot(m[a] * (m[b] * state.amplitudes)).real() - mean(a) * mean(b);
  c.entries = 0.5 * (c.entries + c.entries.transpose()).eval(); // Re<dAdB> symmetrized
  return c;
}

/// 6x6 covariance in the ordering (x1,y1,z1, x2,y2,z2): micro components
/// first, collective macro components second.
inline CovarianceMatrix covariance_matrix(const MicroMacroState& state) {
  const int n = state.macro_qubits(), d = n + 1;
  const Eigen::VectorXcd psi = state.product_space_vector();
  const auto micro = detail::micro_pauli_pm_basis();
  std::array<Eigen::MatrixXcd, 6> ops;
  const Eigen::MatrixXcd idm = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
  for (int a = 0; a < 3; ++a) ops[a] = detail::kron(micro[a], idm);
  using Comp = CollectiveObservable::Component;
  const std::array<Comp, 3> comps{Comp::X, Comp::Y, Comp::Z};
  for (int a = 0; a < 3; ++a)
    ops[3 + a] = detail::kron(id2, CollectiveObservable{comps[a]}.matrix_z_basis(n));
  Eigen::VectorXd mean(6);
  for (int a = 0; a < 6; ++a) mean(a) = psi.dot(ops[a] * psi).real();
  CovarianceMatrix c{6, Eigen::MatrixXd(6, 6)};
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      c.entries(a, b) = psi.dot(ops[a] * (ops[b] * psi)).real() - mean(a) * mean(b);
  c.entries = 0.5 * (c.entries + c.entries.transpose()).eval();
  return c;
}

/// Exact rational covariance matrix of the canonical cloned micro-macro
/// state. Derived from the two-level structure of |psi^+->; the brute-force
/// oracle pins every entry, including the (z1,z2) = -1 correlation forced by
/// sigma_z (x) M_z |phi_0> = |phi_1>.
inline std::vector<std::vector<BigRational>> covariance_matrix_exact(int n_qubits) {
  require_odd_qubits(n_qubits);
  const BigInt n = n_qubits;
  std::vector<std::vector<BigRational>> c(6, std::vector<BigRational>(6, BigRational(0)));
  for (int a = 0; a < 3; ++a) c[a][a] = 1;
  const BigRational cross_xy = BigRational(-(n + 1), 2);
  const BigRational macro_xy = BigRational(n * n + 2 * n - 1, 2);
  c[0][3] = c[3][0] = cross_xy;
  c[1][4] = c[4][1] = cross_xy;
  c[2][5] = c[5][2] = -1;
  c[3][3] = c[4][4] = macro_xy;
  c[5][5] = 1;
  return c;
}

/// Exact rational 3x3 covariance of a cloner output state |psi^sign>:
/// diag((N^2+2N-3)/4, (N^2+2N-1)/2, 1). The x-entry is the exact variance of
/// M_x around <M_x> = sign (N+1)/2.
inline std::vector<std::vector<BigRational>> covariance_matrix_exact_macro(int n_qubits,
                                                                           Sign /*sign*/) {
  require_odd_qubits(n_qubits);
  const BigInt n = n_qubits;
  std::vector<std::vector<BigRational>> c(3, std::vector<BigRational>(3, BigRational(0)));
  c[0][0] = BigRational(n * n + 2 * n - 3, 4);
  c[1][1] = BigRational(n * n + 2 * n - 1, 2);
  c[2][2] = 1;
  return c;
}

struct MaxVarianceResult {
  double variance;
  Eigen::VectorXd coefficients; // same ordering as the covariance matrix
};

/// Maximal variance of M = sum_j a_j M_j over a symmetric register with
/// per-site unit weight (sum_j a_j^2 = 1): top eigenpair of the 3x3
/// covariance matrix.
inline MaxVarianceResult max_local_variance(const SymmetricPureState& state) {
  const CovarianceMatrix c = covariance_matrix(state);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries);
  const int last = 2;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

/// Maximal variance of M = sum_j a_{j,1} sigma_j^(1) + a_{j,2} sum_i
/// sigma_j^(i) under sum_j a_{j,1}^2 + a_{j,2}^2 N = N+1: generalized
/// eigenproblem C v = lambda W v with W = diag(1,1,1,N,N,N).
inline MaxVarianceResult max_local_variance(const MicroMacroState& state) {
  const int n = state.macro_qubits();
  const CovarianceMatrix c = covariance_matrix(state);
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(6, 6);
  for (int a = 3; a < 6; ++a) w(a, a) = double(n);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries, w);
  const int last = 5;
  const double lambda = es.eigenvalues()(last);
  // Eigen normalizes v^T W v = 1; rescale to the budget N+1.
  Eigen::VectorXd alpha = es.eigenvectors().col(last) * std::sqrt(double(n + 1));
  return {double(n + 1) * lambda, alpha};
}

/// Exact closed form of the micro-macro maximum: (N+1)(N+3)/2
/// = (N+1)^2/2 + N + 1, attained at alpha_x = (1,-1).
inline BigRational max_variance_micro_macro_exact(int n_qubits) {
  require_odd_qubits(n_qubits);
  const BigInt n = n_qubits;
  return BigRational((n + 1) * (n + 3), 2);
}

/// Exact maximum for the product branch |phi_0> = |+> (x) |psi^->: the micro
/// site contributes 1 (sigma_y), the register its y-variance, in total
/// (N+1)^2/2.
inline BigRational max_variance_phi0_exact(int n_qubits) {
  require_odd_qubits(n_qubits);
  const BigInt n = n_qubits;
  return 1 + BigRational(n * n + 2 * n - 1, 2);
}

/// Exact rational solver for the sectorwise 2x2 generalized problems of the
/// canonical 6x6 covariance matrix; returns the largest generalized
/// eigenvalue and the budget-(N+1) variance. Discriminants must be perfect
/// squares (they are for these matrices), otherwise the value is not
/// rational and we refuse instead of rounding.
inline BigRational max_variance_micro_macro_exact_from_matrix(int n_qubits) {
  const auto c = covariance_matrix_exact(n_qubits);
  const BigInt n = n_qubits;
  BigRational best(0);
  for (int sector = 0; sector < 3; ++sector) {
    const BigRational c00 = c[sector][sector];
    const BigRational c01 = c[sector][sector + 3];
    const BigRational c11 = c[sector + 3][sector + 3];
    // det(C - lambda W) = 0 with W = diag(1,N):
    // N lambda^2 - (N c00 + c11) lambda + (c00 c11 - c01^2) = 0
    const BigRational bq = n * c00 + c11;
    const BigRational cq = c00 * c11 - c01 * c01;
    const BigRational disc = bq * bq - 4 * BigRational(n) * cq;
    const BigInt num = numerator(disc), den = denominator(disc);
    const BigInt rnum = sqrt(num), rden = sqrt(den);
    if (rnum * rnum != num || rden * rden != den)
      throw numerical_health_error("covariance sector discriminant is not a perfect square");
    const BigRational root(rnum, rden);
    const BigRational lambda = (bq + root) / (2 * n);
    if (lambda > best) best = lambda;
  }
  return BigRational(n + 1) * best;
}

// ---------------------------------------------------------------------------
// Effective-size report
// ---------------------------------------------------------------------------

struct EffectiveSizeReport {
  int n_qubits;
  double korsbakken;
  double marquardt;
  double relative_fisher; // 1 + 2/(N+1)
  double index_p_size;    // N/2 + 2 + 3/(2N)
  double fisher_size;     // equals index_p_size (pure state, F = 4V)
};

inline EffectiveSizeReport effective_sizes(int n_qubits, double korsbakken_threshold = 0.99) {
  require_odd_qubits(n_qubits);
  const BigRational v_psi = max_variance_micro_macro_exact_from_matrix(n_qubits);
  const BigRational v_phi0 = max_variance_phi0_exact(n_qubits);
  EffectiveSizeReport r{};
  r.n_qubits = n_qubits;
  r.korsbakken = korsbakken_effective_size(n_qubits, korsbakken_threshold);
  r.marquardt = double(marquardt_check(n_qubits));
  r.relative_fisher = to_double(v_psi / v_phi0);
  r.index_p_size = to_double(v_psi / n_qubits);
  r.fisher_size = r.index_p_size; // F(phi,H) = 4 V_phi(H) for pure states
  return r;
}

/// Variance of the ansatz operator rebuilt from covariance coefficients,
/// evaluated directly on the state. Closes the loop on the eigenvalue
/// optimization.
inline double variance_of_ansatz(const MicroMacroState& state, const Eigen::VectorXd& alpha) {
  const int n = state.macro_qubits(), d = n + 1;
  const auto micro = detail::micro_pauli_pm_basis();
  using Comp = CollectiveObservable::Component;
  const std::array<Comp, 3> comps{Comp::X, Comp::Y, Comp::Z};
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  const Eigen::MatrixXcd idm = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
  for (int a = 0; a < 3; ++a) {
    h += alpha(a) * detail::kron(micro[a], idm);
    h += alpha(3 + a) * detail::kron(id2, CollectiveObservable{comps[a]}.matrix_z_basis(n));
  }
  const Eigen::VectorXcd psi = state.product_space_vector();
  const Eigen::VectorXcd hpsi = h * psi;
  const double mean = psi.dot(hpsi).real();
  return hpsi.squaredNorm() - mean * mean;
}

inline double variance_of_ansatz(const SymmetricPureState& state, const Eigen::Vector3d& alpha) {
  using Comp = CollectiveObservable::Component;
  const std::array<Comp, 3> comps{Comp::X, Comp::Y, Comp::Z};
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(state.n_qubits + 1, state.n_qubits + 1);
  for (int a = 0; a < 3; ++a)
    h += alpha(a) * CollectiveObservable{comps[a]}.matrix_in_basis(state.n_qubits, state.axis);
  const Eigen::VectorXcd hpsi = h * state.amplitudes;
  const double mean = state.amplitudes.dot(hpsi).real();
  return hpsi.squaredNorm() - mean * mean;
}

} // namespace qmacro
