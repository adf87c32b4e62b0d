#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "hutchfrac/metric.hpp"
#include "hutchfrac/parallel.hpp"
#include "hutchfrac/point.hpp"

namespace hutchfrac {

namespace detail {

/// Pairs (axis, w) with d(x, y) >= w * |x_axis - y_axis| for every x, y.
inline std::vector<std::pair<std::size_t, double>> axis_bounds(const PseudometricDescriptor& d, std::size_t dim) {
  return std::visit(
      [&](const auto& k) -> std::vector<std::pair<std::size_t, double>> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Euclidean> || std::is_same_v<T, SupNorm>) {
          std::vector<std::pair<std::size_t, double>> out;
          for (std::size_t i = 0; i < dim; ++i) out.emplace_back(i, 1.0);
          return out;
        } else if constexpr (std::is_same_v<T, Coordinate>) {
          return {{k.index, 1.0}};
        } else if constexpr (std::is_same_v<T, WeightedMax>) {
          return k.terms;
        } else if constexpr (std::is_same_v<T, MaxOf>) {
          std::vector<std::pair<std::size_t, double>> out;
          for (const auto& m : k.members) {
            auto b = axis_bounds(m, dim);
            out.insert(out.end(), b.begin(), b.end());
          }
          return out;
        } else if constexpr (std::is_same_v<T, HausdorffLift>) {
          return axis_bounds(*k.base, dim);
        } else {
          return {};
        }
      },
      d.kind());
}

inline const PseudometricDescriptor& unlift(const PseudometricDescriptor& d) {
  if (auto* h = std::get_if<HausdorffLift>(&d.kind())) return unlift(*h->base);
  return d;
}

inline void check_pair(const PseudometricDescriptor& d, const Cloud& a, const Cloud& b) {
  require_dim(a.dim(), b.dim(), "hausdorff clouds");
  if (a.size() == 0 || b.size() == 0) throw Error("hausdorff needs non-empty clouds");
  if (a.dim() < d.min_dim()) throw DimensionMismatch("pseudometric " + d.label() + " does not fit the cloud dimension");
  if (auto rd = d.required_dim()) require_dim(*rd, a.dim(), "hausdorff pseudometric");
}

}  // namespace detail

/// max_a min_b d(a, b) by exhaustive evaluation.
inline double directed_hausdorff_brute(const PseudometricDescriptor& d, const Cloud& a, const Cloud& b) {
  detail::check_pair(d, a, b);
  const auto& dd = detail::unlift(d);
  const std::size_t chunks = parallel::chunk_count(a.size(), 256);
  std::vector<double> local(chunks, 0.0);
  parallel::for_chunks(a.size(), 256, [&](std::size_t begin, std::size_t end, std::size_t c) {
    double worst = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < b.size(); ++j) best = std::min(best, dd.raw(a[i], b[j]));
      worst = std::max(worst, best);
    }
    local[c] = worst;
  });
  return *std::max_element(local.begin(), local.end());
}

inline double hausdorff_brute(const PseudometricDescriptor& d, const Cloud& a, const Cloud& b) {
  return std::max(directed_hausdorff_brute(d, a, b), directed_hausdorff_brute(d, b, a));
}

/// max_a min_b d(a, b). Same value as the exhaustive loop: when d dominates a
/// weighted coordinate difference, candidates are scanned outward in that
/// coordinate and the scan stops once the bound exceeds the best distance.
inline double directed_hausdorff(const PseudometricDescriptor& d, const Cloud& a, const Cloud& b) {
  detail::check_pair(d, a, b);
  const auto& dd = detail::unlift(d);
  const auto bounds = detail::axis_bounds(dd, a.dim());
  if (bounds.empty() || b.size() < 32) return directed_hausdorff_brute(dd, a, b);

  // Pick the bounding axis along which b is most spread out.
  std::size_t axis = bounds.front().first;
  double weight = bounds.front().second, spread = -1.0;
  for (auto [ax, w] : bounds) {
    double lo = b[0][ax], hi = lo;
    for (std::size_t j = 1; j < b.size(); ++j) {
      lo = std::min(lo, b[j][ax]);
      hi = std::max(hi, b[j][ax]);
    }
    if (w * (hi - lo) > spread) {
      spread = w * (hi - lo);
      axis = ax;
      weight = w;
    }
  }

  std::vector<std::pair<double, std::size_t>> keys(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) keys[j] = {b[j][axis], j};
  std::sort(keys.begin(), keys.end());

  constexpr double kPruneSlack = 1.0 + 1e-12;
  const std::size_t chunks = parallel::chunk_count(a.size(), 1024);
  std::vector<double> local(chunks, 0.0);
  parallel::for_chunks(a.size(), 1024, [&](std::size_t begin, std::size_t end, std::size_t c) {
    double worst = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto p = a[i];
      const double key = p[axis];
      auto pos = static_cast<std::ptrdiff_t>(
          std::lower_bound(keys.begin(), keys.end(), std::pair<double, std::size_t>{key, 0}) - keys.begin());
      std::ptrdiff_t left = pos - 1, right = pos;
      const auto n = static_cast<std::ptrdiff_t>(keys.size());
      double best = std::numeric_limits<double>::infinity();
      while (left >= 0 || right < n) {
        const double gl = left >= 0 ? weight * (key - keys[left].first) : std::numeric_limits<double>::infinity();
        const double gr = right < n ? weight * (keys[right].first - key) : std::numeric_limits<double>::infinity();
        const bool take_left = gl <= gr;
        const double gap = take_left ? gl : gr;
        if (gap > best * kPruneSlack) break;
        const std::size_t j = take_left ? keys[left--].second : keys[right++].second;
        best = std::min(best, dd.raw(p, b[j]));
        // This point can no longer raise the maximum.
        if (best <= worst) break;
      }
      worst = std::max(worst, best);
    }
    local[c] = worst;
  });
  return *std::max_element(local.begin(), local.end());
}

/// d_H(A, B) = max(max_a min_b d(a, b), max_b min_a d(b, a)).
inline double hausdorff(const PseudometricDescriptor& d, const Cloud& a, const Cloud& b) {
  return std::max(directed_hausdorff(d, a, b), directed_hausdorff(d, b, a));
}

/// diam_d(A) = max over all pairs.
inline double diameter(const PseudometricDescriptor& d, const Cloud& a) {
  if (a.size() == 0) throw Error("diameter needs a non-empty cloud");
  const auto& dd = detail::unlift(d);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) m = std::max(m, dd.raw(a[i], a[j]));
  return m;
}

inline double diameter(const PseudometricDescriptor& d, std::span<const double> flat, std::size_t dim) {
  const auto& dd = detail::unlift(d);
  const std::size_t n = flat.size() / dim;
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, dd.raw(flat.subspan(i * dim, dim), flat.subspan(j * dim, dim)));
  return m;
}

}  // namespace hutchfrac
