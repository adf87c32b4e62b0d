#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <vector>

#include "hutchfrac/metric.hpp"
#include "hutchfrac/point.hpp"
#include "hutchfrac/rng.hpp"

namespace hutchfrac {

template <typename D>
concept PseudometricLike = requires(const D& d, std::span<const double> x) {
  { d(x, x) } -> std::convertible_to<double>;
};

struct AxiomViolation {
  std::array<std::size_t, 3> indices{};  ///< sample indices; unused slots repeat the first
  double excess = 0.0;                   ///< amount by which the axiom fails
};

struct AxiomReport {
  std::vector<AxiomViolation> symmetry_violations;
  std::vector<AxiomViolation> triangle_violations;
  std::vector<AxiomViolation> diagonal_violations;
  std::size_t triples_checked = 0;
  bool exhaustive = false;

  bool ok() const { return symmetry_violations.empty() && triangle_violations.empty() && diagonal_violations.empty(); }
};

inline constexpr std::size_t kExhaustiveAxiomLimit = 60;
inline constexpr std::size_t kSampledTriples = 100000;

/// Audits symmetry, d(x,x) = 0, nonnegativity and the triangle inequality on a
/// sample. All triples when the sample has at most 60 points, otherwise 1e5
/// seeded triples. `tol` is the absolute slack granted to every inequality.
template <PseudometricLike D>
AxiomReport check_axioms(const D& d, const Cloud& sample, std::uint64_t seed, double tol = 1e-9) {
  AxiomReport r;
  const std::size_t n = sample.size();
  if (n == 0) throw Error("check_axioms needs a non-empty sample");

  std::vector<double> dist;
  const bool small = n <= kExhaustiveAxiomLimit;
  if (small) {
    dist.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = d(sample[i], sample[j]);
  }
  auto at = [&](std::size_t i, std::size_t j) { return small ? dist[i * n + j] : static_cast<double>(d(sample[i], sample[j])); };

  auto audit_pair = [&](std::size_t i, std::size_t j) {
    const double xy = at(i, j), yx = at(j, i);
    if (std::abs(xy - yx) > tol || !(xy >= -tol))
      r.symmetry_violations.push_back({{i, j, i}, std::abs(xy - yx) + std::max(0.0, -xy)});
  };
  auto audit = [&](std::size_t i, std::size_t j, std::size_t k) {
    const double xy = at(i, j), xz = at(i, k), zy = at(k, j);
    if (xy > xz + zy + tol) r.triangle_violations.push_back({{i, j, k}, xy - xz - zy});
    ++r.triples_checked;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double self = at(i, i);
    if (std::abs(self) > tol) r.diagonal_violations.push_back({{i, i, i}, std::abs(self)});
  }

  if (small) {
    r.exhaustive = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i < j) audit_pair(i, j);
        for (std::size_t k = 0; k < n; ++k) audit(i, j, k);
      }
  } else {
    Rng rng(seed);
    for (std::size_t t = 0; t < kSampledTriples; ++t) {
      const std::size_t i = rng.index(n), j = rng.index(n), k = rng.index(n);
      if (i != j) audit_pair(i, j);
      audit(i, j, k);
    }
  }
  return r;
}

/// Returns the first sampled pair of distinct points on which every member
/// vanishes, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> find_unseparated_pair(const Multimetric& mm, const Cloud& sample) {
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      bool all_zero = true;
      for (const auto& d : mm.members)
        if (d(sample[i], sample[j]) > 0.0) {
          all_zero = false;
          break;
        }
      if (all_zero) return std::pair{i, j};
    }
  return std::nullopt;
}

}  // namespace hutchfrac
