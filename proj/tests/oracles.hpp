#pragma once

// Reference computations written directly from the definitions, without the
// library's evaluation, search or pruning code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracles {

using Pt = std::vector<double>;
using Dist = std::function<double(const Pt&, const Pt&)>;

inline double euclid(const Pt& a, const Pt& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double sup(const Pt& a, const Pt& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

inline Dist coord(std::size_t i) {
  return [i](const Pt& a, const Pt& b) { return std::abs(a[i] - b[i]); };
}

inline double directed_hausdorff(const Dist& d, const std::vector<Pt>& a, const std::vector<Pt>& b) {
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) best = std::min(best, d(x, y));
    worst = std::max(worst, best);
  }
  return worst;
}

inline double hausdorff(const Dist& d, const std::vector<Pt>& a, const std::vector<Pt>& b) {
  return std::max(directed_hausdorff(d, a, b), directed_hausdorff(d, b, a));
}

/// Level-n Cantor cloud as integer numerators over 3^n, starting from {0, 1}.
inline std::vector<std::int64_t> cantor_level(int n) {
  std::vector<std::int64_t> k = {0, 1};
  for (int s = 0; s < n; ++s) {
    std::vector<std::int64_t> next;
    // x/3 and x/3 + 2/3 with x = k/3^s give k and k + 2*3^s over 3^(s+1).
    std::int64_t p = 1;
    for (int i = 0; i < s; ++i) p *= 3;
    for (auto v : k) next.push_back(v);
    for (auto v : k) next.push_back(v + 2 * p);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    k = std::move(next);
  }
  return k;
}

/// Exact Hausdorff residual between level n and level n+1 of the Cantor
/// iteration, as a double of an integer ratio.
inline double cantor_residual(int n) {
  const auto a = cantor_level(n), b = cantor_level(n + 1);
  // Bring level n to denominator 3^(n+1).
  std::vector<std::int64_t> a3;
  for (auto v : a) a3.push_back(3 * v);
  auto directed = [](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    std::int64_t worst = 0;
    for (auto v : x) {
      auto it = std::lower_bound(y.begin(), y.end(), v);
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      if (it != y.end()) best = *it - v;
      if (it != y.begin()) best = std::min(best, v - *std::prev(it));
      worst = std::max(worst, best);
    }
    return worst;
  };
  const std::int64_t num = std::max(directed(a3, b), directed(b, a3));
  return static_cast<double>(num) / std::pow(3.0, n + 1);
}

/// Operator 2-norm of a 2x2 matrix from the eigenvalues of A^T A.
inline double norm2_2x2(double a, double b, double c, double d) {
  const double p = a * a + c * c, q = a * b + c * d, r = b * b + d * d;
  const double mean = 0.5 * (p + r), disc = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
  return std::sqrt(mean + disc);
}

/// The fg example maps on [0, 2].
inline double f(double x) { return std::max(0.0, x - 1.0); }
inline double g(double x) { return std::min(2.0, x + 1.0); }

/// x_{n+1} = x_n + e^{-x_n}.
inline double exp_orbit(double x, long n) {
  for (long i = 0; i < n; ++i) x += std::exp(-x);
  return x;
}

/// max |h(x) - h(y)| over pairs of the h-grid of [lo, hi] with |x - y| <= t.
inline double grid_oscillation_1d(const std::function<double(double)>& h, double lo, double hi, std::size_t n, double t) {
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = h(x[i]);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (x[j] - x[i] <= t) best = std::max(best, std::abs(y[j] - y[i]));
  return best;
}

}  // namespace oracles
