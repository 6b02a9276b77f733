#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace qmacro {

/// Golden-section minimization on [a,b]. Assumes unimodality inside the
/// bracket; callers are expected to bracket with a coarse grid first.
template <typename Fn>
std::pair<double, double> golden_min(Fn&& f, double a, double b, double tol = 1e-10) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (std::abs(b - a) > tol * (1.0 + std::abs(x1) + std::abs(x2))) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

template <typename Fn>
std::pair<double, double> golden_max(Fn&& f, double a, double b, double tol = 1e-10) {
  auto [x, negv] = golden_min([&](double t) { return -f(t); }, a, b, tol);
  return {x, -negv};
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < points; ++i)
    g[i] = std::exp(l0 + (l1 - l0) * double(i) / double(points - 1));
  return g;
}

/// Coarse grid scan followed by golden-section refinement around the best
/// grid point. The flag goes false when the grid shows more than one local
/// minimum.
struct GridMinResult {
  double x;
  double value;
  bool unimodal;
};

template <typename Fn>
GridMinResult grid_then_golden_min(Fn&& f, const std::vector<double>& grid,
                                   double tol = 1e-10) {
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (vals[i] < vals[best]) best = i;
  int local_minima = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool left_ok = (i == 0) || vals[i] <= vals[i - 1];
    const bool right_ok = (i + 1 == grid.size()) || vals[i] <= vals[i + 1];
    if (left_ok && right_ok) ++local_minima;
  }
  const double a = grid[best > 0 ? best - 1 : 0];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  auto [x, v] = golden_min(f, a, b, tol);
  if (vals[best] < v) {
    x = grid[best];
    v = vals[best];
  }
  return {x, v, local_minima <= 1};
}

} // namespace qmacro
