#pragma once

// Closed-form contraction data for the map kinds the library knows about.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "hutchfrac/maps.hpp"
#include "hutchfrac/metric.hpp"

namespace hutchfrac {

/// x -> clamp(slope * x + shift, lo, hi) with possibly infinite bounds. Every
/// 1-D affine, clamp, or halving map and their compositions have this form.
struct ClampForm {
  double slope = 1.0;
  double shift = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static ClampForm constant(double v) { return {0.0, v, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}; }

  double operator()(double x) const { return std::min(hi, std::max(lo, slope * x + shift)); }

  bool is_constant() const { return slope == 0.0 || lo == hi; }
};

/// outer o inner.
inline ClampForm compose(const ClampForm& outer, const ClampForm& inner) {
  if (inner.is_constant()) return ClampForm::constant(outer(inner(0.0)));
  if (outer.is_constant()) return ClampForm::constant(outer(0.0));
  const double s = outer.slope;
  double a = s > 0 ? s * inner.lo + outer.shift : s * inner.hi + outer.shift;
  double b = s > 0 ? s * inner.hi + outer.shift : s * inner.lo + outer.shift;
  if (b < outer.lo) return ClampForm::constant(outer.lo);
  if (a > outer.hi) return ClampForm::constant(outer.hi);
  return {s * inner.slope, s * inner.shift + outer.shift, std::max(a, outer.lo), std::min(b, outer.hi)};
}

inline std::optional<ClampForm> as_clamp_form(const MapDescriptor& map) {
  return std::visit(
      [](const auto& m) -> std::optional<ClampForm> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Affine>) {
          if (m.dim != 1) return std::nullopt;
          return ClampForm{m.matrix[0], m.offset[0]};
        } else if constexpr (std::is_same_v<T, Clamp1D>) {
          return ClampForm{m.slope, m.shift, m.lo, m.hi};
        } else if constexpr (std::is_same_v<T, Builtin>) {
          if (m.name == BuiltinName::Halving) return ClampForm{0.5, 0.0};
          return std::nullopt;
        } else {
          if (m.base->dim() != 1) return std::nullopt;
          ClampForm acc{};
          for (std::size_t k = m.word.size(); k-- > 0;) {
            auto f = as_clamp_form(m.base->map(m.word.letters[k]));
            if (!f) return std::nullopt;
            acc = compose(*f, acc);
          }
          return acc;
        }
      },
      map.kind());
}

inline Affine compose(const Affine& outer, const Affine& inner) {
  const std::size_t d = outer.dim;
  Affine r{d, std::vector<double>(d * d, 0.0), outer.offset};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += outer.at(i, k) * inner.at(k, j);
      r.matrix[i * d + j] = s;
      r.offset[i] += outer.at(i, j) * inner.offset[j];
    }
  return r;
}

inline std::optional<Affine> as_affine(const MapDescriptor& map, std::size_t dim) {
  return std::visit(
      [dim](const auto& m) -> std::optional<Affine> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Affine>) {
          return m;
        } else if constexpr (std::is_same_v<T, Builtin>) {
          if (m.name != BuiltinName::Halving) return std::nullopt;
          Affine a{dim, std::vector<double>(dim * dim, 0.0), std::vector<double>(dim, 0.0)};
          for (std::size_t i = 0; i < dim; ++i) a.matrix[i * dim + i] = 0.5;
          return a;
        } else if constexpr (std::is_same_v<T, WordComposite>) {
          Affine acc{dim, std::vector<double>(dim * dim, 0.0), std::vector<double>(dim, 0.0)};
          for (std::size_t i = 0; i < dim; ++i) acc.matrix[i * dim + i] = 1.0;
          for (std::size_t k = m.word.size(); k-- > 0;) {
            auto f = as_affine(m.base->map(m.word.letters[k]), dim);
            if (!f) return std::nullopt;
            acc = compose(*f, acc);
          }
          return acc;
        } else {
          return std::nullopt;
        }
      },
      map.kind());
}

/// A pseudometric seen as a seminorm of the difference: either Euclidean, or
/// max_i weight_i * |v_i| (weight 0 = coordinate ignored).
struct NormView {
  bool euclidean = false;
  std::vector<double> weights;
};

inline std::optional<NormView> as_norm(const PseudometricDescriptor& d, std::size_t dim) {
  return std::visit(
      [dim](const auto& k) -> std::optional<NormView> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Euclidean>) {
          return NormView{true, {}};
        } else if constexpr (std::is_same_v<T, SupNorm>) {
          return NormView{false, std::vector<double>(dim, 1.0)};
        } else if constexpr (std::is_same_v<T, Coordinate>) {
          if (k.index >= dim) return std::nullopt;
          NormView v{false, std::vector<double>(dim, 0.0)};
          v.weights[k.index] = 1.0;
          return v;
        } else if constexpr (std::is_same_v<T, WeightedMax>) {
          NormView v{false, std::vector<double>(dim, 0.0)};
          for (auto [i, w] : k.terms) {
            if (i >= dim) return std::nullopt;
            v.weights[i] = std::max(v.weights[i], w);
          }
          return v;
        } else if constexpr (std::is_same_v<T, MaxOf>) {
          std::optional<NormView> acc;
          for (const auto& m : k.members) {
            auto v = as_norm(m, dim);
            if (!v) return std::nullopt;
            if (!acc) {
              acc = v;
            } else if (acc->euclidean != v->euclidean) {
              return std::nullopt;
            } else if (!v->euclidean) {
              for (std::size_t i = 0; i < dim; ++i) acc->weights[i] = std::max(acc->weights[i], v->weights[i]);
            }
          }
          return acc;
        } else if constexpr (std::is_same_v<T, HausdorffLift>) {
          return as_norm(*k.base, dim);
        } else {
          return std::nullopt;
        }
      },
      d.kind());
}

/// Smallest L with |A v| <= L |v| for the seminorm; +inf when the seminorm
/// ignores a direction that A moves into a measured one.
inline double affine_lipschitz(const Affine& a, const NormView& norm) {
  const std::size_t d = a.dim;
  if (norm.euclidean) {
    Eigen::MatrixXd m(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a.at(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (norm.weights[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (a.at(i, j) == 0.0) continue;
      if (norm.weights[j] == 0.0) return std::numeric_limits<double>::infinity();
      row += std::abs(a.at(i, j)) / norm.weights[j];
    }
    best = std::max(best, norm.weights[i] * row);
  }
  return best;
}

/// Lipschitz constant of a clamp form restricted to [p, q] (whole line when
/// no interval is given).
inline double clamp_lipschitz(const ClampForm& f, std::optional<std::pair<double, double>> interval) {
  if (f.is_constant()) return 0.0;
  if (interval) {
    auto [p, q] = *interval;
    if (p == q) return 0.0;
    const double u = std::min(f.slope * p + f.shift, f.slope * q + f.shift);
    const double v = std::max(f.slope * p + f.shift, f.slope * q + f.shift);
    if (std::min(v, f.hi) - std::max(u, f.lo) <= 0.0) return 0.0;
  }
  return std::abs(f.slope);
}

namespace detail {
inline std::optional<std::pair<double, double>> interval_of(const DomainBox* domain) {
  if (!domain || domain->dim() != 1) return std::nullopt;
  return std::pair{domain->lo()[0], domain->hi()[0]};
}

inline std::size_t map_dim(const MapDescriptor& map, const PseudometricDescriptor& metric, const DomainBox* domain) {
  if (auto d = map.dim()) return *d;
  if (domain) return domain->dim();
  return metric.min_dim();
}

inline bool is_edelstein_exp(const MapDescriptor& map) {
  auto* b = std::get_if<Builtin>(&map.kind());
  return b && b->name == BuiltinName::EdelsteinExp;
}
}  // namespace detail

/// Smallest Lipschitz constant of `map` under `metric` on the domain box (or
/// the whole space), when the pair (map kind, metric kind) has a closed form.
inline std::optional<double> analytic_lipschitz(const MapDescriptor& map, const PseudometricDescriptor& metric,
                                                const DomainBox* domain = nullptr) {
  const std::size_t dim = detail::map_dim(map, metric, domain);
  auto norm = as_norm(metric, dim);
  if (!norm) return std::nullopt;
  if (dim == 1) {
    if (auto f = as_clamp_form(map)) return clamp_lipschitz(*f, detail::interval_of(domain));
    if (detail::is_edelstein_exp(map)) {
      auto iv = detail::interval_of(domain);
      if (!iv) return std::nullopt;
      // |f'(x)| = |1 - e^{-x}| is monotone on each side of 0, so the sup over
      // the interval sits at an endpoint.
      return std::max(std::abs(std::expm1(-iv->first)), std::abs(std::expm1(-iv->second)));
    }
    return std::nullopt;
  }
  if (auto a = as_affine(map, dim)) return affine_lipschitz(*a, *norm);
  return std::nullopt;
}

inline std::optional<double> analytic_lipschitz(const MapDescriptor& map, const PseudometricDescriptor& metric,
                                                const DomainBox& domain) {
  return analytic_lipschitz(map, metric, &domain);
}

/// True when d(f(x), f(y)) < d(x, y) is certain for all distinct x, y of the
/// box: either a Lipschitz constant below one, or a pointwise derivative bound
/// below one on a compact interval.
inline bool edelstein_certified(const MapDescriptor& map, const PseudometricDescriptor& metric, const DomainBox& domain) {
  if (auto l = analytic_lipschitz(map, metric, &domain); l && *l < 1.0) return true;
  if (detail::is_edelstein_exp(map) && domain.dim() == 1 && as_norm(metric, 1)) {
    // |1 - e^{-x}| < 1 exactly when x > -ln 2.
    return domain.lo()[0] > -std::numbers::ln2;
  }
  return false;
}

/// omega(t) <= min(slope * t, cap); `exact` when equality holds on the box.
struct AnalyticModulus {
  double slope = 0.0;
  double cap = std::numeric_limits<double>::infinity();
  bool exact = false;
  bool upper_only = false;

  double operator()(double t) const { return std::min(slope * t, cap); }
};

inline std::optional<AnalyticModulus> analytic_modulus(const MapDescriptor& map, const PseudometricDescriptor& metric,
                                                       const DomainBox* domain = nullptr) {
  const std::size_t dim = detail::map_dim(map, metric, domain);
  auto norm = as_norm(metric, dim);
  if (!norm) return std::nullopt;
  if (dim == 1) {
    const double scale = norm->euclidean ? 1.0 : norm->weights[0];
    if (auto f = as_clamp_form(map)) {
      auto iv = detail::interval_of(domain);
      AnalyticModulus m{clamp_lipschitz(*f, iv)};
      if (iv) {
        // Clamp forms are monotone, so the image of [p, q] is spanned by f(p), f(q).
        m.cap = scale * std::abs((*f)(iv->second) - (*f)(iv->first));
      } else if (!f->is_constant()) {
        m.cap = scale * (f->hi - f->lo);
      } else {
        m.cap = 0.0;
      }
      m.exact = true;
      return m;
    }
    if (detail::is_edelstein_exp(map)) {
      auto l = analytic_lipschitz(map, metric, domain);
      if (!l) return std::nullopt;
      return AnalyticModulus{*l, std::numeric_limits<double>::infinity(), false, true};
    }
    return std::nullopt;
  }
  if (auto a = as_affine(map, dim)) {
    return AnalyticModulus{affine_lipschitz(*a, *norm), std::numeric_limits<double>::infinity(), true, false};
  }
  return std::nullopt;
}

}  // namespace hutchfrac
