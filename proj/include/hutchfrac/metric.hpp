#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hutchfrac/errors.hpp"
#include "hutchfrac/point.hpp"

namespace hutchfrac {

/// Runtime-built pseudometric (remetrizations) exposed through a descriptor.
class PseudometricSource {
 public:
  virtual ~PseudometricSource() = default;
  virtual double distance(std::span<const double> x, std::span<const double> y) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string label() const = 0;
};

class PseudometricDescriptor;

struct Euclidean {};
struct SupNorm {};
/// |x_index - y_index|
struct Coordinate {
  std::size_t index = 0;
};
/// max_k weight_k * |x_{index_k} - y_{index_k}|
struct WeightedMax {
  std::vector<std::pair<std::size_t, double>> terms;
};
struct MaxOf {
  std::vector<PseudometricDescriptor> members;
};
/// Hausdorff lift of a base pseudometric to finite sets. On single points it
/// agrees with the base.
struct HausdorffLift {
  std::shared_ptr<const PseudometricDescriptor> base;
};
struct Remetrized {
  std::shared_ptr<const PseudometricSource> source;
};
struct BanachPower {
  std::shared_ptr<const PseudometricSource> source;
};

class PseudometricDescriptor {
 public:
  using Kind = std::variant<Euclidean, SupNorm, Coordinate, WeightedMax, MaxOf, HausdorffLift, Remetrized, BanachPower>;

  PseudometricDescriptor() : kind_(Euclidean{}) {}
  PseudometricDescriptor(Kind k) : kind_(std::move(k)) { validate(); }  // NOLINT(google-explicit-constructor)

  static PseudometricDescriptor euclidean() { return {Euclidean{}}; }
  static PseudometricDescriptor sup() { return {SupNorm{}}; }
  static PseudometricDescriptor coordinate(std::size_t i) { return {Coordinate{i}}; }
  static PseudometricDescriptor weighted_max(std::vector<std::pair<std::size_t, double>> terms) {
    return {WeightedMax{std::move(terms)}};
  }
  static PseudometricDescriptor hausdorff_lift(PseudometricDescriptor base) {
    return {HausdorffLift{std::make_shared<const PseudometricDescriptor>(std::move(base))}};
  }

  const Kind& kind() const { return kind_; }

  /// Dimension required by the descriptor, if it fixes one.
  std::optional<std::size_t> required_dim() const {
    if (auto* r = std::get_if<Remetrized>(&kind_)) return r->source->dim();
    if (auto* b = std::get_if<BanachPower>(&kind_)) return b->source->dim();
    if (auto* m = std::get_if<MaxOf>(&kind_)) {
      for (const auto& member : m->members)
        if (auto d = member.required_dim()) return d;
    }
    if (auto* h = std::get_if<HausdorffLift>(&kind_)) return h->base->required_dim();
    return std::nullopt;
  }

  /// Smallest dimension for which the coordinate indices make sense.
  std::size_t min_dim() const {
    return std::visit(
        [](const auto& k) -> std::size_t {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Coordinate>) {
            return k.index + 1;
          } else if constexpr (std::is_same_v<T, WeightedMax>) {
            std::size_t d = 1;
            for (auto [i, w] : k.terms) d = std::max(d, i + 1);
            return d;
          } else if constexpr (std::is_same_v<T, MaxOf>) {
            std::size_t d = 1;
            for (const auto& m : k.members) d = std::max(d, m.min_dim());
            return d;
          } else if constexpr (std::is_same_v<T, HausdorffLift>) {
            return k.base->min_dim();
          } else if constexpr (std::is_same_v<T, Remetrized> || std::is_same_v<T, BanachPower>) {
            return k.source->dim();
          } else {
            return 1;
          }
        },
        kind_);
  }

  /// Distance on raw coordinate spans; no dimension checks.
  double raw(std::span<const double> x, std::span<const double> y) const {
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Euclidean>) {
            return euclidean_distance(x, y);
          } else if constexpr (std::is_same_v<T, SupNorm>) {
            double m = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
            return m;
          } else if constexpr (std::is_same_v<T, Coordinate>) {
            return std::abs(x[k.index] - y[k.index]);
          } else if constexpr (std::is_same_v<T, WeightedMax>) {
            double m = 0.0;
            for (auto [i, w] : k.terms) m = std::max(m, w * std::abs(x[i] - y[i]));
            return m;
          } else if constexpr (std::is_same_v<T, MaxOf>) {
            double m = 0.0;
            for (const auto& member : k.members) m = std::max(m, member.raw(x, y));
            return m;
          } else if constexpr (std::is_same_v<T, HausdorffLift>) {
            return k.base->raw(x, y);
          } else {
            return k.source->distance(x, y);
          }
        },
        kind_);
  }

  double operator()(std::span<const double> x, std::span<const double> y) const {
    require_dim(x.size(), y.size(), "pseudometric arguments");
    if (x.size() < min_dim()) throw DimensionMismatch("pseudometric " + label() + " needs dimension >= " + std::to_string(min_dim()));
    if (auto d = required_dim()) require_dim(*d, x.size(), "pseudometric");
    return raw(x, y);
  }

  double operator()(const Point& x, const Point& y) const { return (*this)(x.coords(), y.coords()); }

  std::string label() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Euclidean>) {
            return "euclidean";
          } else if constexpr (std::is_same_v<T, SupNorm>) {
            return "sup";
          } else if constexpr (std::is_same_v<T, Coordinate>) {
            return "coordinate(" + std::to_string(k.index) + ")";
          } else if constexpr (std::is_same_v<T, WeightedMax>) {
            std::string s = "weighted_max(";
            for (std::size_t j = 0; j < k.terms.size(); ++j) {
              if (j) s += ",";
              s += std::to_string(k.terms[j].first) + ":" + std::to_string(k.terms[j].second);
            }
            return s + ")";
          } else if constexpr (std::is_same_v<T, MaxOf>) {
            std::string s = "max(";
            for (std::size_t j = 0; j < k.members.size(); ++j) {
              if (j) s += ",";
              s += k.members[j].label();
            }
            return s + ")";
          } else if constexpr (std::is_same_v<T, HausdorffLift>) {
            return "hausdorff(" + k.base->label() + ")";
          } else {
            return k.source->label();
          }
        },
        kind_);
  }

 private:
  void validate() const {
    if (auto* w = std::get_if<WeightedMax>(&kind_)) {
      if (w->terms.empty()) throw Error("weighted_max needs at least one term");
      for (auto [i, wt] : w->terms)
        if (!(wt > 0.0) || !std::isfinite(wt)) throw Error("weighted_max weights must be positive and finite");
    } else if (auto* m = std::get_if<MaxOf>(&kind_)) {
      if (m->members.empty()) throw Error("max_of needs at least one member");
    } else if (auto* h = std::get_if<HausdorffLift>(&kind_)) {
      if (!h->base) throw Error("hausdorff lift needs a base");
    } else if (auto* r = std::get_if<Remetrized>(&kind_)) {
      if (!r->source) throw Error("remetrized descriptor needs a source");
    } else if (auto* b = std::get_if<BanachPower>(&kind_)) {
      if (!b->source) throw Error("banach-power descriptor needs a source");
    }
  }

  Kind kind_;
};

/// pd_eval: d(x, y).
inline double pd_eval(const PseudometricDescriptor& d, const Point& x, const Point& y) { return d(x, y); }

/// The pointwise maximum of a finite family; nested maxima are flattened.
inline PseudometricDescriptor directed_max(const std::vector<PseudometricDescriptor>& family) {
  if (family.empty()) throw Error("directed_max needs a non-empty family");
  MaxOf out;
  for (const auto& d : family) {
    if (auto* m = std::get_if<MaxOf>(&d.kind())) {
      out.members.insert(out.members.end(), m->members.begin(), m->members.end());
    } else {
      out.members.push_back(d);
    }
  }
  return {std::move(out)};
}

/// A family of pseudometrics on the same space.
struct Multimetric {
  std::vector<PseudometricDescriptor> members;
  bool separates_points_declared = false;
};

}  // namespace hutchfrac
