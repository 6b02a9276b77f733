#pragma once

// Exact combinatorics and linear algebra on the symmetric (Dicke) subspace of
// N qubits: cloner states, micro-macro states, basis changes, bipartite
// splittings and reduced density operators. States are stored as length-(N+1)
// amplitude vectors over the excitation number; full 2^N representations live
// only in the brute-force oracle.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qmacro/combinatorics.hpp"
#include "qmacro/errors.hpp"

namespace qmacro {

using Complex = std::complex<double>;

enum class Axis { Z, X };
enum class Sign { Plus, Minus };

inline int sign_value(Sign s) { return s == Sign::Plus ? +1 : -1; }

struct DickeBasisLabel {
  int n_qubits;
  int excitations;
  Axis axis = Axis::Z;

  void validate() const {
    require(n_qubits >= 1, "DickeBasisLabel: n_qubits must be positive");
    require(excitations >= 0 && excitations <= n_qubits,
            "DickeBasisLabel: excitations out of [0, n_qubits]");
  }
};

/// Pure state on the symmetric subspace, amplitudes indexed by excitation
/// number in the given collective basis.
struct SymmetricPureState {
  int n_qubits;
  Axis axis;
  Eigen::VectorXcd amplitudes; // length n_qubits + 1

  double norm_error() const { return std::abs(amplitudes.norm() - 1.0); }
  void validate() const {
    require(n_qubits >= 1, "SymmetricPureState: n_qubits must be positive");
    require(amplitudes.size() == n_qubits + 1,
            "SymmetricPureState: amplitude vector must have length n_qubits+1");
    require(norm_error() < 1e-12, "SymmetricPureState: not normalized");
  }
};

/// One explicit qubit (in the |+>,|-> basis) tensored with a symmetric
/// N-qubit register: amp_plus |+>|macro_plus> + amp_minus |->|macro_minus>.
/// macro_plus / macro_minus name the micro component they ride with.
struct MicroMacroState {
  Complex amp_plus;
  Complex amp_minus;
  SymmetricPureState macro_plus;
  SymmetricPureState macro_minus;

  int macro_qubits() const { return macro_plus.n_qubits; }

  /// Vector in C^2 (x) C^(N+1), ordering (micro |+>, micro |->) (x) Dicke-z.
  Eigen::VectorXcd product_space_vector() const;
};

/// Reduced density operator of k qubits on the symmetric subspace.
struct ReducedState {
  int k;
  Eigen::MatrixXcd matrix; // (k+1) x (k+1), Hermitian, trace 1
};

/// Collective spin component M_j = weight * sum_i sigma_j^(i).
struct CollectiveObservable {
  enum class Component { X, Y, Z };
  Component component = Component::X;
  double weight = 1.0;

  /// Matrix on the symmetric subspace expressed in the z-excitation basis.
  Eigen::MatrixXcd matrix_z_basis(int n_qubits) const;
  /// Matrix in the basis the state is stored in.
  Eigen::MatrixXcd matrix_in_basis(int n_qubits, Axis basis) const;
};

inline Eigen::MatrixXcd CollectiveObservable::matrix_z_basis(int n) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  switch (component) {
    case Component::Z:
      for (int k = 0; k <= n; ++k) m(k, k) = double(n - 2 * k);
      break;
    case Component::X:
      // <k-1| M_x |k> = sqrt(k (n-k+1))
      for (int k = 1; k <= n; ++k) {
        const double v = std::sqrt(double(k) * double(n - k + 1));
        m(k - 1, k) = v;
        m(k, k - 1) = v;
      }
      break;
    case Component::Y:
      // <k+1| M_y |k> = +i sqrt((k+1)(n-k))
      for (int k = 0; k < n; ++k) {
        const double v = std::sqrt(double(k + 1) * double(n - k));
        m(k + 1, k) = Complex(0.0, v);
        m(k, k + 1) = Complex(0.0, -v);
      }
      break;
  }
  return weight * m;
}

inline Eigen::MatrixXcd CollectiveObservable::matrix_in_basis(int n, Axis basis) const {
  if (basis == Axis::Z) return matrix_z_basis(n);
  // Conjugation by Had^(x)N swaps x<->z and flips the sign of y.
  CollectiveObservable rot = *this;
  switch (component) {
    case Component::X: rot.component = Component::Z; break;
    case Component::Z: rot.component = Component::X; break;
    case Component::Y: rot.weight = -rot.weight; break;
  }
  return rot.matrix_z_basis(n);
}

/// Cloner output state of Eq.-(3) type: amplitudes 1/sqrt2 at (N-1)/2 and
/// sign/sqrt2 at (N+1)/2 in the z basis. Odd N only.
inline SymmetricPureState cloner_state(int n_qubits, Sign sign) {
  require_odd_qubits(n_qubits);
  SymmetricPureState s{n_qubits, Axis::Z, Eigen::VectorXcd::Zero(n_qubits + 1)};
  const double a = 1.0 / std::sqrt(2.0);
  s.amplitudes((n_qubits - 1) / 2) = a;
  s.amplitudes((n_qubits + 1) / 2) = sign_value(sign) * a;
  return s;
}

/// (|+> (x) |psi^-> - |-> (x) |psi^+>) / sqrt2 on N+1 qubits.
inline MicroMacroState micro_macro_state(int n_qubits) {
  require_odd_qubits(n_qubits);
  const double a = 1.0 / std::sqrt(2.0);
  return MicroMacroState{Complex(a), Complex(-a), cloner_state(n_qubits, Sign::Minus),
                         cloner_state(n_qubits, Sign::Plus)};
}

inline Eigen::VectorXcd MicroMacroState::product_space_vector() const {
  const int d = macro_qubits() + 1;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * d);
  v.head(d) = amp_plus * macro_plus.amplitudes;
  v.tail(d) = amp_minus * macro_minus.amplitudes;
  return v;
}

/// Coefficients beta_k of the x-basis Dicke expansion of the cloner states:
///   |psi^+-> = sum_k [1 +- (-1)^k]/sqrt2 * sqrt(C(N,k)) beta_k |N,k>_x,
///   beta_k = S_k / sqrt(2^N C(N,(N-1)/2)),
///   S_k = sum_i (-1)^i C(k,i) C(N-k,(N-1)/2-i).
/// The alternating sum is evaluated in exact integer arithmetic; the printed
/// 2^(N-1) normalization fails to normalize the expansion and is replaced by
/// 2^N, which the full-space oracle confirms.
inline Eigen::VectorXd x_basis_coefficients(int n_qubits) {
  require_odd_qubits(n_qubits);
  const int N = n_qubits;
  const int x = (N - 1) / 2;
  const double log_norm = double(N) * std::numbers::ln2 + log_binomial(N, x);
  Eigen::VectorXd beta(N + 1);
  for (int k = 0; k <= N; ++k) {
    const BigInt s = signed_vandermonde_sum(k, N - k, x);
    if (s == 0) {
      beta(k) = 0.0;
      continue;
    }
    const double mag = std::exp(log_big(s) - 0.5 * log_norm);
    beta(k) = (s < 0) ? -mag : mag;
  }
  return beta;
}

/// Hypergeometric splitting weights of a Dicke level across a k:(N-k)
/// bipartition: c_j^x = C(k,j) C(N-k,x-j) / C(N,x).
struct BipartiteSplitTable {
  int n_qubits;
  int k;
  std::vector<int> excitations;              // levels x in the state's support
  std::vector<Eigen::VectorXd> coefficients; // per level, c_j^x for j = 0..k
};

inline Eigen::VectorXd split_coefficients(int n_qubits, int k, int x) {
  require(k >= 0 && k <= n_qubits, "split: k out of [0,N]");
  require(x >= 0 && x <= n_qubits, "split: excitation out of [0,N]");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k + 1);
  const double ln_denom = log_binomial(n_qubits, x);
  for (int j = 0; j <= k; ++j) {
    if (x - j < 0 || x - j > n_qubits - k) continue;
    c(j) = std::exp(log_binomial(k, j) + log_binomial(n_qubits - k, x - j) - ln_denom);
  }
  return c;
}

inline BipartiteSplitTable bipartite_split(const SymmetricPureState& state, int k) {
  state.validate();
  BipartiteSplitTable t{state.n_qubits, k, {}, {}};
  for (int x = 0; x <= state.n_qubits; ++x) {
    if (std::abs(state.amplitudes(x)) == 0.0) continue;
    t.excitations.push_back(x);
    t.coefficients.push_back(split_coefficients(state.n_qubits, k, x));
  }
  return t;
}

enum class ReducedMode { Exact, Asymptotic };

/// Reduced state of k qubits of the cloner state |psi^sign>. The exact mode
/// evaluates the tridiagonal form
///   rho_k = 1/2 sum_j (c_j^x1 + c_j^x2) |j><j|
///         +- 1/2 sum_j sqrt(c_j^x1 c_{j+1}^x2) (|j><j+1| + h.c.)
/// with x1 = (N-1)/2, x2 = (N+1)/2. The asymptotic mode replaces
/// c_j^x -> C(k,j) 2^-k, valid for k << N.
inline ReducedState reduced_state(int n_qubits, Sign sign, int k,
                                  ReducedMode mode = ReducedMode::Exact) {
  require_odd_qubits(n_qubits);
  require(k >= 1 && k <= n_qubits, "reduced_state: k out of [1,N]");
  const int x1 = (n_qubits - 1) / 2;
  const int x2 = (n_qubits + 1) / 2;
  const double sgn = sign_value(sign);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(k + 1, k + 1);
  if (mode == ReducedMode::Exact) {
    const Eigen::VectorXd c1 = split_coefficients(n_qubits, k, x1);
    const Eigen::VectorXd c2 = split_coefficients(n_qubits, k, x2);
    for (int j = 0; j <= k; ++j) rho(j, j) = 0.5 * (c1(j) + c2(j));
    for (int j = 0; j < k; ++j) {
      const double v = 0.5 * sgn * std::sqrt(c1(j) * c2(j + 1));
      rho(j, j + 1) += v;
      rho(j + 1, j) += v;
    }
  } else {
    // c_j ~ C(k,j)/2^k and sqrt(c_j c_{j+1}) = c_j sqrt((k-j)/(j+1))
    for (int j = 0; j <= k; ++j)
      rho(j, j) = std::exp(log_binomial(k, j) - k * std::numbers::ln2);
    for (int j = 0; j < k; ++j) {
      const double cj = std::exp(log_binomial(k, j) - k * std::numbers::ln2);
      const double v = 0.5 * sgn * cj * std::sqrt(double(k - j) / double(j + 1));
      rho(j, j + 1) += v;
      rho(j + 1, j) += v;
    }
  }
  return ReducedState{k, rho};
}

/// Exact expectation value and variance of a collective observable on a
/// symmetric state, with any axis mismatch resolved by basis change.
inline std::pair<double, double> expectation_and_variance(const SymmetricPureState& state,
                                                          const CollectiveObservable& obs) {
  state.validate();
  const Eigen::MatrixXcd m = obs.matrix_in_basis(state.n_qubits, state.axis);
  const Eigen::VectorXcd mv = m * state.amplitudes;
  const double mean = state.amplitudes.dot(mv).real();
  const double second = mv.squaredNorm();
  return {mean, second - mean * mean};
}

} // namespace qmacro
