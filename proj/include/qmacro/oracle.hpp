#pragma once

// Brute-force full-Hilbert-space simulator. Ground truth for every analytic
// formula in the package: state vectors to 12 qubits, density matrices to 10.
// Nothing here knows about the symmetric-subspace shortcuts it validates.

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qmacro/errors.hpp"
#include "qmacro/symcore.hpp"

namespace qmacro::oracle {

inline constexpr int kMaxStateQubits = 12;
inline constexpr int kMaxDensityQubits = 10;

inline void require_state_capacity(int n) {
  if (n < 1 || n > kMaxStateQubits)
    throw capacity_error("oracle: state vectors support 1.." +
                         std::to_string(kMaxStateQubits) + " qubits, got " + std::to_string(n));
}

inline void require_density_capacity(int n) {
  if (n < 1 || n > kMaxDensityQubits)
    throw capacity_error("oracle: density matrices support 1.." +
                         std::to_string(kMaxDensityQubits) + " qubits, got " + std::to_string(n));
}

/// In-place Walsh-Hadamard transform: |v> -> Had^(x)n |v>.
inline void hadamard_all(Eigen::VectorXcd& v, int n_qubits) {
  const double s = 1.0 / std::sqrt(2.0);
  for (int q = 0; q < n_qubits; ++q) {
    const std::int64_t bit = std::int64_t(1) << q;
    for (std::int64_t idx = 0; idx < v.size(); ++idx) {
      if (idx & bit) continue;
      const Complex a = v(idx), b = v(idx | bit);
      v(idx) = s * (a + b);
      v(idx | bit) = s * (a - b);
    }
  }
}

inline Eigen::MatrixXcd hadamard_all(const Eigen::MatrixXcd& rho, int n_qubits) {
  Eigen::MatrixXcd out = rho;
  Eigen::VectorXcd col(rho.rows());
  for (std::int64_t c = 0; c < out.cols(); ++c) {
    col = out.col(c);
    hadamard_all(col, n_qubits);
    out.col(c) = col;
  }
  for (std::int64_t r = 0; r < out.rows(); ++r) {
    Eigen::VectorXcd row = out.row(r).transpose();
    hadamard_all(row, n_qubits); // Had is real symmetric, no conjugation needed
    out.row(r) = row.transpose();
  }
  return out;
}

/// Equal-amplitude superposition of all C(n,k) permutations with k
/// excitations; axis X applies Hadamards on every qubit.
inline Eigen::VectorXcd embed_dicke(const DickeBasisLabel& label) {
  label.validate();
  require_state_capacity(label.n_qubits);
  const std::int64_t dim = std::int64_t(1) << label.n_qubits;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  for (std::int64_t idx = 0; idx < dim; ++idx)
    if (std::popcount(static_cast<std::uint64_t>(idx)) == label.excitations) v(idx) = 1.0;
  v.normalize();
  if (label.axis == Axis::X) hadamard_all(v, label.n_qubits);
  return v;
}

inline Eigen::VectorXcd embed_symmetric_state(const SymmetricPureState& state) {
  state.validate();
  require_state_capacity(state.n_qubits);
  const std::int64_t dim = std::int64_t(1) << state.n_qubits;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  for (int k = 0; k <= state.n_qubits; ++k) {
    if (state.amplitudes(k) == Complex(0)) continue;
    v += state.amplitudes(k) * embed_dicke({state.n_qubits, k, Axis::Z});
  }
  if (state.axis == Axis::X) hadamard_all(v, state.n_qubits);
  return v;
}

/// Micro qubit is the lowest-order tensor factor (qubit index n of n+1).
inline Eigen::VectorXcd embed_micro_macro(const MicroMacroState& state) {
  const int n = state.macro_qubits();
  require_state_capacity(n + 1);
  const Eigen::VectorXcd macro_p = embed_symmetric_state(state.macro_plus);
  const Eigen::VectorXcd macro_m = embed_symmetric_state(state.macro_minus);
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Vector2cd plus(s, s), minus(s, -s); // |+>, |-> over (|0>,|1>)
  Eigen::VectorXcd v(macro_p.size() * 2);
  v << state.amp_plus * plus(0) * macro_p + state.amp_minus * minus(0) * macro_m,
      state.amp_plus * plus(1) * macro_p + state.amp_minus * minus(1) * macro_m;
  return v;
}

enum class LocalChannelKind { PhaseZ, BitFlipX, White };

/// Apply the channel qubit by qubit. PhaseZ/BitFlipX take u in [1/2,1]
/// (Kraus weights u and 1-u); White takes p in [0,1].
inline Eigen::MatrixXcd apply_local_channel(const Eigen::MatrixXcd& rho, int n_qubits,
                                            LocalChannelKind kind, double param) {
  require_density_capacity(n_qubits);
  const std::int64_t dim = std::int64_t(1) << n_qubits;
  require(rho.rows() == dim && rho.cols() == dim, "apply_local_channel: dimension mismatch");
  if (kind != LocalChannelKind::White)
    require(param >= 0.5 - 1e-12 && param <= 1.0 + 1e-12,
            "apply_local_channel: u must lie in [1/2,1]");
  else
    require(param >= 0.0 && param <= 1.0 + 1e-12, "apply_local_channel: p must lie in [0,1]");

  Eigen::MatrixXcd out = rho;
  for (int q = 0; q < n_qubits; ++q) {
    const std::int64_t bit = std::int64_t(1) << q;
    Eigen::MatrixXcd next(dim, dim);
    for (std::int64_t a = 0; a < dim; ++a) {
      for (std::int64_t b = 0; b < dim; ++b) {
        const bool differ = ((a ^ b) & bit) != 0;
        switch (kind) {
          case LocalChannelKind::PhaseZ: {
            const double f = differ ? (2.0 * param - 1.0) : 1.0;
            next(a, b) = f * out(a, b);
            break;
          }
          case LocalChannelKind::BitFlipX:
            next(a, b) = param * out(a, b) + (1.0 - param) * out(a ^ bit, b ^ bit);
            break;
          case LocalChannelKind::White:
            if (differ)
              next(a, b) = param * out(a, b);
            else
              next(a, b) = param * out(a, b) +
                           (1.0 - param) * 0.5 * (out(a, b) + out(a ^ bit, b ^ bit));
            break;
        }
      }
    }
    out.swap(next);
  }
  return out;
}

/// Exact partial trace keeping the listed qubit indices (0-based).
inline Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, int n_qubits,
                                      const std::vector<int>& kept) {
  require_density_capacity(n_qubits);
  for (int q : kept) require(q >= 0 && q < n_qubits, "partial_trace: qubit index out of range");
  std::vector<int> traced;
  for (int q = 0; q < n_qubits; ++q)
    if (std::find(kept.begin(), kept.end(), q) == kept.end()) traced.push_back(q);

  const int nk = int(kept.size());
  const std::int64_t dk = std::int64_t(1) << nk;
  const std::int64_t dt = std::int64_t(1) << traced.size();
  auto scatter = [](std::int64_t packed, const std::vector<int>& positions) {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < positions.size(); ++i)
      if (packed & (std::int64_t(1) << i)) idx |= std::int64_t(1) << positions[i];
    return idx;
  };
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (std::int64_t i = 0; i < dk; ++i) {
    const std::int64_t bi = scatter(i, kept);
    for (std::int64_t j = 0; j < dk; ++j) {
      const std::int64_t bj = scatter(j, kept);
      Complex acc = 0;
      for (std::int64_t t = 0; t < dt; ++t) {
        const std::int64_t bt = scatter(t, traced);
        acc += rho(bi | bt, bj | bt);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

/// Project a permutation-invariant k-qubit density matrix onto the symmetric
/// subspace basis |k,j>, giving a (k+1)x(k+1) matrix comparable with
/// ReducedState.
inline Eigen::MatrixXcd symmetric_block(const Eigen::MatrixXcd& rho, int n_qubits) {
  Eigen::MatrixXcd out(n_qubits + 1, n_qubits + 1);
  std::vector<Eigen::VectorXcd> basis;
  for (int j = 0; j <= n_qubits; ++j) basis.push_back(embed_dicke({n_qubits, j, Axis::Z}));
  for (int a = 0; a <= n_qubits; ++a)
    for (int b = 0; b <= n_qubits; ++b) out(a, b) = basis[a].dot(rho * basis[b]);
  return out;
}

/// Outcome distribution of the collective excitation-number measurement,
/// i.e. Tr[pi_i rho] with pi_i the Hamming-weight-i projector in the given
/// axis.
inline Eigen::VectorXd weight_distribution(const Eigen::MatrixXcd& rho, int n_qubits,
                                           Axis axis) {
  Eigen::MatrixXcd r = (axis == Axis::X) ? hadamard_all(rho, n_qubits) : rho;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n_qubits + 1);
  for (std::int64_t idx = 0; idx < r.rows(); ++idx)
    p(std::popcount(static_cast<std::uint64_t>(idx))) += r(idx, idx).real();
  return p;
}

inline Eigen::VectorXd weight_distribution(const Eigen::VectorXcd& psi, int n_qubits,
                                           Axis axis) {
  Eigen::VectorXcd v = psi;
  if (axis == Axis::X) hadamard_all(v, n_qubits);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n_qubits + 1);
  for (std::int64_t idx = 0; idx < v.size(); ++idx)
    p(std::popcount(static_cast<std::uint64_t>(idx))) += std::norm(v(idx));
  return p;
}

/// Full-space matrix of the collective operator sum_i sigma_c^(i).
inline Eigen::MatrixXcd collective_operator(int n_qubits,
                                            CollectiveObservable::Component c) {
  require_state_capacity(n_qubits);
  const std::int64_t dim = std::int64_t(1) << n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int q = 0; q < n_qubits; ++q) {
    const std::int64_t bit = std::int64_t(1) << q;
    for (std::int64_t idx = 0; idx < dim; ++idx) {
      const bool set = (idx & bit) != 0;
      switch (c) {
        case CollectiveObservable::Component::Z:
          m(idx, idx) += set ? -1.0 : 1.0;
          break;
        case CollectiveObservable::Component::X:
          m(idx ^ bit, idx) += 1.0;
          break;
        case CollectiveObservable::Component::Y:
          // sigma_y |0> = i|1>, sigma_y |1> = -i|0>
          m(idx ^ bit, idx) += set ? Complex(0, -1) : Complex(0, 1);
          break;
      }
    }
  }
  return m;
}

/// e^{-i theta M_x / 2} rho e^{+i theta M_x / 2}, evaluated exactly in the
/// x product basis where M_x is diagonal with eigenvalue N - 2*(minus count).
inline Eigen::MatrixXcd apply_collective_x_rotation(const Eigen::MatrixXcd& rho, int n_qubits,
                                                    double theta) {
  Eigen::MatrixXcd r = hadamard_all(rho, n_qubits);
  const std::int64_t dim = r.rows();
  Eigen::VectorXcd phase(dim);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    const int w = std::popcount(static_cast<std::uint64_t>(idx));
    phase(idx) = std::exp(Complex(0, -0.5 * theta * double(n_qubits - 2 * w)));
  }
  r = phase.asDiagonal() * r * phase.conjugate().asDiagonal();
  return hadamard_all(r, n_qubits);
}

inline Eigen::MatrixXcd swap_qubits(const Eigen::MatrixXcd& rho, int n_qubits, int q1, int q2) {
  const std::int64_t dim = std::int64_t(1) << n_qubits;
  auto perm = [&](std::int64_t idx) {
    const std::int64_t b1 = (idx >> q1) & 1, b2 = (idx >> q2) & 1;
    if (b1 == b2) return idx;
    return idx ^ ((std::int64_t(1) << q1) | (std::int64_t(1) << q2));
  };
  Eigen::MatrixXcd out(dim, dim);
  for (std::int64_t a = 0; a < dim; ++a)
    for (std::int64_t b = 0; b < dim; ++b) out(perm(a), perm(b)) = rho(a, b);
  return out;
}

/// Quantum Fisher information through the symmetric-logarithmic-derivative
/// equation: with d rho = -i [G, rho], solve (p_i+p_j) L_ij = 2 (d rho)_ij on
/// the support of rho and return Tr[rho L^2]. Rank deficiency is handled by a
/// pseudo-support cutoff.
inline double sld_quantum_fisher(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& gen,
                                 double support_cutoff = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  const Eigen::VectorXd p = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();
  const Eigen::MatrixXcd g = v.adjoint() * gen * v;
  const Complex im(0, 1);
  const auto dim = p.size();
  // (d rho)_ij in the eigenbasis: -i (p_j - p_i) G_ij
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double denom = p(i) + p(j);
      if (denom < support_cutoff) continue;
      const Complex drho = -im * (p(j) - p(i)) * g(i, j);
      l(i, j) = 2.0 * drho / denom;
    }
  }
  const Eigen::MatrixXcd l2 = l * l;
  double f = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) f += p(i) * l2(i, i).real();
  return f;
}

} // namespace qmacro::oracle
