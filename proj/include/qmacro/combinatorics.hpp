#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "qmacro/errors.hpp"

namespace qmacro {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// ln C(n,k) via log-gamma. Valid for any 0 <= k <= n.
inline double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) throw validation_error("log_binomial: need 0 <= k <= n");
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

/// Exact binomial coefficient. C(64,32) still fits in 64 bits; larger n must
/// go through log_binomial or binomial_big.
inline std::uint64_t binomial_exact(int n, int k) {
  if (k < 0 || k > n) throw validation_error("binomial_exact: need 0 <= k <= n");
  if (n > 64) throw validation_error("binomial_exact: n > 64 overflows, use binomial_big");
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  }
  return static_cast<std::uint64_t>(r);
}

inline BigInt binomial_big(int n, int k) {
  if (k < 0 || k > n) return BigInt(0);
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// C(n,k) with out-of-range k giving 0, as needed by hypergeometric sums.
inline BigInt binomial_or_zero(int n, int k) {
  if (n < 0 || k < 0 || k > n) return BigInt(0);
  return binomial_big(n, k);
}

/// sum_m (-1)^m C(p,m) C(q,r-m)  ==  [z^r] (1-z)^p (1+z)^q.
/// Exact; the alternating sum suffers heavy cancellation in floating point.
inline BigInt signed_vandermonde_sum(int p, int q, int r) {
  BigInt acc = 0;
  const int lo = std::max(0, r - q);
  const int hi = std::min(p, r);
  for (int m = lo; m <= hi; ++m) {
    BigInt term = binomial_big(p, m) * binomial_big(q, r - m);
    if (m % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

/// Natural log of |x| for big integers (x != 0), from the top bits.
inline double log_big(const BigInt& x) {
  BigInt a = abs(x);
  if (a == 0) return -std::numeric_limits<double>::infinity();
  const auto bits = msb(a); // index of highest set bit
  if (bits <= 960) return std::log(a.convert_to<double>());
  const unsigned shift = static_cast<unsigned>(bits - 960);
  const double mant = BigInt(a >> shift).convert_to<double>();
  return std::log(mant) + double(shift) * std::numbers::ln2;
}

inline double to_double(const BigRational& q) {
  // convert_to<double> on cpp_rational is exact up to final rounding only
  // when numerator/denominator fit in double; go through logs otherwise.
  const BigInt num = numerator(q), den = denominator(q);
  if (num == 0) return 0.0;
  const double ln = log_big(num) - log_big(den);
  if (std::abs(ln) < 690.0) {
    return q.convert_to<double>();
  }
  const double mag = std::exp(ln);
  return num < 0 ? -mag : mag;
}

} // namespace qmacro
