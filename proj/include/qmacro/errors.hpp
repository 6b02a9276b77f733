#pragma once

#include <stdexcept>
#include <string>

namespace qmacro {

/// Input violates a documented precondition (bad range, even N, ...).
class validation_error : public std::invalid_argument {
public:
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Requested system size exceeds the brute-force capacity caps.
class capacity_error : public validation_error {
public:
  explicit capacity_error(const std::string& msg) : validation_error(msg) {}
};

/// An internal numerical cross-check failed (analytic vs finite differences,
/// consistency certificates). Indicates a bug or an ill-conditioned input,
/// never a user error.
class numerical_health_error : public std::runtime_error {
public:
  explicit numerical_health_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw validation_error(msg);
}

inline void require_odd_qubits(int n_qubits) {
  require(n_qubits >= 1, "n_qubits must be positive, got " + std::to_string(n_qubits));
  require(n_qubits % 2 == 1,
          "n_qubits must be odd (the even-N cloner map is not supported), got " +
              std::to_string(n_qubits));
}

} // namespace qmacro
