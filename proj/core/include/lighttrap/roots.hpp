#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace lighttrap {

/// One sign-change bracket [lo, hi] with f(lo)*f(hi) < 0.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

/// n log-spaced points on [lo, hi], lo > 0.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    g[i] = std::exp(llo + u * (lhi - llo));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Strict sign-change brackets of f over the grid. Exact zeros at grid points
/// are skipped: underflowed tails of smooth profiles evaluate to +-0 and must
/// not spawn spurious roots.
template <class F>
std::vector<Bracket> scan_sign_changes(F&& f, const std::vector<double>& grid) {
  std::vector<Bracket> out;
  if (grid.size() < 2) return out;
  double prev = f(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = f(grid[i]);
    if (prev * cur < 0.0) {
      out.push_back({grid[i - 1], grid[i], prev, cur});
    }
    prev = cur;
  }
  return out;
}

/// Plain bisection on a bracket. Stops when the interval is below xtol or a
/// few ulps wide. Accepts brackets whose endpoint values may be exactly zero.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double f_lo = f(lo);
  if (f_lo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= xtol || mid == lo || mid == hi) return mid;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_lo < 0.0) == (f_mid < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed once per order and cached.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussLegendre& order(int n);
};

}  // namespace lighttrap
