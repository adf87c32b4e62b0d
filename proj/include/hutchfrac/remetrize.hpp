#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hutchfrac/hausdorff.hpp"
#include "hutchfrac/lipschitz.hpp"
#include "hutchfrac/maps.hpp"
#include "hutchfrac/metric.hpp"
#include "hutchfrac/parallel.hpp"
#include "hutchfrac/rng.hpp"

namespace hutchfrac {

/// Raised when no truncation depth up to the cap certifies the requested
/// accuracy, or when the Banach-power hypotheses fail.
class RemetrizeError : public Error {
 public:
  RemetrizeError(const std::string& what, std::optional<Word> word = std::nullopt)
      : Error(what), word_(std::move(word)) {}
  const std::optional<Word>& offending_word() const { return word_; }

 private:
  std::optional<Word> word_;
};

/// The weight sequence alpha_n with a printable name.
struct AlphaSequence {
  std::function<double(std::size_t)> value;
  std::string name;

  double operator()(std::size_t n) const { return value(n); }

  /// alpha_n = 2 - 2^-n.
  static AlphaSequence standard() {
    return {[](std::size_t n) { return 2.0 - std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(n, 1100))); },
            "2-2^-n"};
  }
};

namespace detail {

/// reach[n] = max over k in (n, depth] of weight(k) L^(k-n): with every map
/// L-Lipschitz, a pair at distance r on level n has no descendant term above
/// reach[n] * r. Empty when L is unknown.
inline std::vector<double> reach_table(const std::vector<double>& weights, std::optional<double> lipschitz) {
  if (!lipschitz || weights.empty()) return {};
  const std::size_t depth = weights.size() - 1;
  std::vector<double> reach(depth + 1, 0.0);
  for (std::size_t n = depth; n-- > 0;) reach[n] = *lipschitz * std::max(weights[n + 1], reach[n + 1]);
  return reach;
}

/// Largest analytic Lipschitz constant of the maps. The box constant is used
/// only for self-mapping systems, where every word image stays in the box.
inline std::optional<double> max_map_lipschitz(const IfsSystem& ifs, const PseudometricDescriptor& base) {
  double worst = 0.0;
  for (const auto& f : ifs.maps()) {
    const auto l = analytic_lipschitz(f, base, ifs.self_mapping_declared() ? &ifs.domain() : nullptr);
    if (!l) return std::nullopt;
    worst = std::max(worst, *l);
  }
  return worst;
}

/// max over n <= depth and words w in F^n of weight(n) * d(w x, w y). Depth
/// first, extending words on the outside; the level buffers are the only
/// memory kept. Subtrees whose reach bound cannot beat the running maximum
/// are skipped.
template <typename Weight>
double word_sup(const IfsSystem& ifs, const PseudometricDescriptor& base, std::size_t depth, const Weight& weight,
                std::span<const double> x, std::span<const double> y, const std::vector<double>& reach = {}) {
  const std::size_t d = x.size(), m = ifs.size();
  std::vector<double> bx((depth + 1) * d), by((depth + 1) * d);
  std::copy(x.begin(), x.end(), bx.begin());
  std::copy(y.begin(), y.end(), by.begin());
  double best = weight(0) * base.raw(x, y);
  if (depth == 0) return best;
  std::vector<std::size_t> next(depth + 1, 0);  // next letter to try at each level
  std::size_t level = 0;
  while (true) {
    if (next[level] == m) {
      if (level == 0) break;
      next[level] = 0;
      --level;
      continue;
    }
    const std::size_t f = next[level]++;
    std::span<double> ux{bx.data() + (level + 1) * d, d}, uy{by.data() + (level + 1) * d, d};
    apply_map(ifs.map(f), {bx.data() + level * d, d}, ux);
    apply_map(ifs.map(f), {by.data() + level * d, d}, uy);
    const double r = base.raw(ux, uy);
    best = std::max(best, weight(level + 1) * r);
    if (level + 1 < depth && (reach.empty() || reach[level + 1] * r * (1.0 + 1e-12) > best)) ++level;
  }
  return best;
}

inline std::vector<double> weights_table(const AlphaSequence& alphas, std::size_t depth) {
  std::vector<double> w(depth + 1);
  for (std::size_t n = 0; n <= depth; ++n) w[n] = alphas(n);
  return w;
}

/// Uniform seeded points of the box, two per pair: x_k then y_k.
inline std::vector<std::pair<Point, Point>> sample_box_pairs(const DomainBox& box, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<Point, Point>> out;
  out.reserve(count);
  auto draw = [&] {
    std::vector<double> c(box.dim());
    for (std::size_t k = 0; k < box.dim(); ++k) c[k] = rng.uniform(box.lo()[k], box.hi()[k]);
    return Point(std::move(c));
  };
  for (std::size_t i = 0; i < count; ++i) {
    Point x = draw();
    Point y = draw();
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

}  // namespace detail

/// d^(x, y) = max over n <= N and w in F^n of alpha_n d(w x, w y), truncated
/// at depth N. On the invariant cloud's hull the dropped terms are at most
/// tail_bound.
class RemetrizedPseudometric : public PseudometricSource {
 public:
  RemetrizedPseudometric(std::shared_ptr<const IfsSystem> ifs, PseudometricDescriptor base, AlphaSequence alphas,
                         std::size_t depth, Cloud invariant_cloud, double tail_bound)
      : ifs_(std::move(ifs)),
        base_(std::move(base)),
        alphas_(std::move(alphas)),
        depth_(depth),
        cloud_(std::move(invariant_cloud)),
        tail_(tail_bound),
        weights_(detail::weights_table(alphas_, depth)),
        reach_(detail::reach_table(weights_, detail::max_map_lipschitz(*ifs_, base_))) {}

  double distance(std::span<const double> x, std::span<const double> y) const override {
    return detail::word_sup(*ifs_, base_, depth_, [this](std::size_t n) { return weights_[n]; }, x, y, reach_);
  }
  std::size_t dim() const override { return ifs_->dim(); }
  std::string label() const override {
    return "remetrized(" + base_.label() + ", alpha=" + alphas_.name + ", depth=" + std::to_string(depth_) + ")";
  }

  const IfsSystem& ifs() const { return *ifs_; }
  const PseudometricDescriptor& base() const { return base_; }
  const AlphaSequence& alphas() const { return alphas_; }
  std::size_t depth() const { return depth_; }
  const Cloud& invariant_cloud() const { return cloud_; }
  double tail_bound() const { return tail_; }

 private:
  std::shared_ptr<const IfsSystem> ifs_;
  PseudometricDescriptor base_;
  AlphaSequence alphas_;
  std::size_t depth_;
  Cloud cloud_;
  double tail_;
  std::vector<double> weights_;
  std::vector<double> reach_;
};

/// tail(N) = 2 * max over w in F^N of diam_base(w(K)), with the maximising word.
struct TailLayer {
  double tail = 0.0;
  Word worst;
};

/// Tail bounds for N = 0..depth_cap, stopping early once one falls below eps.
inline std::vector<TailLayer> tail_layers(const IfsSystem& ifs, const PseudometricDescriptor& base, const Cloud& k,
                                          std::size_t depth_cap, double eps, std::size_t budget = kDefaultWordBudget) {
  const std::size_t d = ifs.dim(), p = k.size(), m = ifs.size();
  std::vector<double> images = k.data();  // [word][point][coord]
  std::vector<Word> words{Word{}};
  std::vector<TailLayer> out;
  for (std::size_t n = 0;; ++n) {
    TailLayer layer;
    double worst = -1.0;
    for (std::size_t w = 0; w < words.size(); ++w) {
      const double diam = diameter(base, {images.data() + w * p * d, p * d}, d);
      if (diam > worst) {
        worst = diam;
        layer.worst = words[w];
      }
    }
    layer.tail = 2.0 * worst;
    out.push_back(layer);
    if (layer.tail < eps || n == depth_cap) break;
    if (word_count(m, n + 1, budget) > budget)
      throw BudgetExceeded("remetrization needs more than " + std::to_string(budget) + " words at depth " +
                           std::to_string(n + 1));
    // Outer extension: f o w for every map f; word letters list the outer map first.
    std::vector<double> next(images.size() * m);
    std::vector<Word> next_words;
    next_words.reserve(words.size() * m);
    for (std::size_t f = 0; f < m; ++f)
      for (std::size_t w = 0; w < words.size(); ++w) {
        const std::size_t slot = f * words.size() + w;
        for (std::size_t i = 0; i < p; ++i)
          apply_map(ifs.map(f), {images.data() + (w * p + i) * d, d}, {next.data() + (slot * p + i) * d, d});
        next_words.push_back(Word{{f}} + words[w]);
      }
    images.swap(next);
    words.swap(next_words);
  }
  return out;
}

inline void check_alphas(const AlphaSequence& alphas, std::size_t upto) {
  if (alphas(0) != 1.0) throw RemetrizeError("alpha_0 must equal 1");
  for (std::size_t n = 1; n <= upto; ++n) {
    const double a = alphas(n), prev = alphas(n - 1);
    if (!(a > prev)) throw RemetrizeError("alpha must be strictly increasing (fails at n=" + std::to_string(n) + ")");
    if (!(a <= 2.0)) throw RemetrizeError("alpha must stay at most 2 (fails at n=" + std::to_string(n) + ")");
  }
}

/// Chooses the smallest N <= depth_cap whose tail bound is below eps.
inline std::shared_ptr<const RemetrizedPseudometric> build_remetrized(const IfsSystem& ifs, const PseudometricDescriptor& base,
                                                                      const AlphaSequence& alphas, const Cloud& k, double eps,
                                                                      std::size_t depth_cap) {
  if (!(eps > 0.0)) throw RemetrizeError("eps must be positive");
  require_dim(ifs.dim(), k.dim(), "invariant cloud");
  check_alphas(alphas, depth_cap + 1);
  std::vector<TailLayer> layers;
  try {
    layers = tail_layers(ifs, base, k, depth_cap, eps);
  } catch (const BudgetExceeded& e) {
    throw RemetrizeError(std::string("tail bound not reached: ") + e.what());
  }
  const auto& last = layers.back();
  if (!(last.tail < eps))
    throw RemetrizeError("tail bound " + format_number(last.tail) + " still >= eps=" + format_number(eps) + " at depth " +
                             std::to_string(layers.size() - 1) + "; word " + last.worst.to_string() +
                             " keeps the invariant cloud wide, so the system does not contract it",
                         last.worst);
  return std::make_shared<const RemetrizedPseudometric>(std::make_shared<const IfsSystem>(ifs), base, alphas,
                                                        layers.size() - 1, k, last.tail);
}

/// Fixed depth without alpha checks; used for negative controls.
inline std::shared_ptr<const RemetrizedPseudometric> build_remetrized_unchecked(const IfsSystem& ifs,
                                                                                const PseudometricDescriptor& base,
                                                                                const AlphaSequence& alphas, const Cloud& k,
                                                                                std::size_t depth) {
  const auto layers = tail_layers(ifs, base, k, depth, 0.0);
  return std::make_shared<const RemetrizedPseudometric>(std::make_shared<const IfsSystem>(ifs), base, alphas, depth, k,
                                                        layers.back().tail);
}

inline PseudometricDescriptor as_descriptor(std::shared_ptr<const RemetrizedPseudometric> rm) {
  return PseudometricDescriptor(Remetrized{std::move(rm)});
}

struct RhatValue {
  double value = 0.0;
  double error_bar = 0.0;
};

inline RhatValue rhat_eval(const RemetrizedPseudometric& rm, const Point& x, const Point& y) {
  require_dim(rm.dim(), x.dim(), "rhat_eval");
  require_dim(rm.dim(), y.dim(), "rhat_eval");
  return {rm.distance(x.coords(), y.coords()), rm.tail_bound()};
}

struct PairViolation {
  Point x, y;
  std::size_t map = 0;
  double before = 0.0;  ///< distance of (x, y)
  double after = 0.0;   ///< distance of (f x, f y)
};

struct EdelsteinCheck {
  std::size_t checked = 0;
  std::size_t skipped = 0;  ///< pairs below the significance threshold
  std::vector<PairViolation> violations;
  double max_ratio = 0.0;
  double threshold = 0.0;
};

/// d^(f x, f y) < d^(x, y) + 2 tail for every map and every sampled pair with
/// d^(x, y) above max(1e-6, 4 tail).
inline EdelsteinCheck verify_edelstein_under(const RemetrizedPseudometric& rm, const IfsSystem& ifs, std::size_t pair_samples,
                                             std::uint64_t seed) {
  const auto pairs = detail::sample_box_pairs(ifs.domain(), pair_samples, seed);
  const double tail = rm.tail_bound();
  EdelsteinCheck out;
  out.threshold = std::max(1e-6, 4.0 * tail);
  struct Row {
    double before = 0.0;
    std::vector<double> after;
  };
  std::vector<Row> rows(pairs.size());
  parallel::for_chunks(pairs.size(), 4, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t p = b; p < e; ++p) {
      const auto& [x, y] = pairs[p];
      rows[p].before = rm.distance(x.coords(), y.coords());
      if (rows[p].before <= out.threshold) continue;
      for (std::size_t f = 0; f < ifs.size(); ++f)
        rows[p].after.push_back(rm.distance(eval_map(ifs.map(f), x).coords(), eval_map(ifs.map(f), y).coords()));
    }
  });
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (rows[p].after.empty()) {
      ++out.skipped;
      continue;
    }
    ++out.checked;
    for (std::size_t f = 0; f < rows[p].after.size(); ++f) {
      out.max_ratio = std::max(out.max_ratio, rows[p].after[f] / rows[p].before);
      if (!(rows[p].after[f] < rows[p].before + 2.0 * tail))
        out.violations.push_back({pairs[p].first, pairs[p].second, f, rows[p].before, rows[p].after[f]});
    }
  }
  return out;
}

struct KrasnoselskiiCheck {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double sup_ratio = 0.0;
  /// max over m <= depth of alpha_m / alpha_{m+1}: the contraction factor the
  /// construction guarantees on bounded windows.
  double lambda_bound = 0.0;
  bool passed() const { return checked > 0 && sup_ratio < 1.0; }
};

/// Largest d^(f x, f y) / d^(x, y) over sampled pairs with d^(x, y) in [a_low, b_high].
inline KrasnoselskiiCheck verify_krasnoselskii_under(const RemetrizedPseudometric& rm, const IfsSystem& ifs, double a_low,
                                                     double b_high, std::size_t pair_samples, std::uint64_t seed) {
  if (!(a_low > 0.0) || !(b_high >= a_low)) throw Error("krasnoselskii window needs 0 < a_low <= b_high");
  const auto pairs = detail::sample_box_pairs(ifs.domain(), pair_samples, seed);
  KrasnoselskiiCheck out;
  for (std::size_t n = 0; n <= rm.depth(); ++n) out.lambda_bound = std::max(out.lambda_bound, rm.alphas()(n) / rm.alphas()(n + 1));
  std::vector<double> ratio(pairs.size(), -1.0);
  parallel::for_chunks(pairs.size(), 4, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t p = b; p < e; ++p) {
      const auto& [x, y] = pairs[p];
      const double before = rm.distance(x.coords(), y.coords());
      if (before < a_low || before > b_high) continue;
      double worst = 0.0;
      for (std::size_t f = 0; f < ifs.size(); ++f)
        worst = std::max(worst, rm.distance(eval_map(ifs.map(f), x).coords(), eval_map(ifs.map(f), y).coords()));
      ratio[p] = worst / before;
    }
  });
  for (double r : ratio) {
    if (r < 0.0) {
      ++out.skipped;
      continue;
    }
    ++out.checked;
    out.sup_ratio = std::max(out.sup_ratio, r);
  }
  return out;
}

/// Greedy eps-net of the invariant cloud under d^; its size witnesses total
/// boundedness on the finite data.
inline std::size_t epsilon_net_size(const RemetrizedPseudometric& rm, double eps) {
  const Cloud& k = rm.invariant_cloud();
  std::vector<std::size_t> centres;
  for (std::size_t i = 0; i < k.size(); ++i) {
    bool covered = false;
    for (auto c : centres)
      if (rm.distance(k[i], k[c]) < eps) {
        covered = true;
        break;
      }
    if (!covered) centres.push_back(i);
  }
  return centres.size();
}

// ---------------------------------------------------------------------------
// Banach-power metric

/// d^(x, y) = max over n <= depth and w in F^n of a^n d(w x, w y), for a > 1
/// with a^m lambda < 1 where lambda bounds the Lipschitz constants of F^m.
class BanachPowerMetric : public PseudometricSource {
 public:
  BanachPowerMetric(std::shared_ptr<const IfsSystem> ifs, PseudometricDescriptor base, std::size_t m, double lambda, double a,
                    std::size_t depth, double tail)
      : ifs_(std::move(ifs)), base_(std::move(base)), m_(m), lambda_(lambda), a_(a), depth_(depth), tail_(tail) {
    powers_.resize(depth_ + 1);
    for (std::size_t n = 0; n <= depth_; ++n) powers_[n] = std::pow(a_, static_cast<double>(n));
    reach_ = detail::reach_table(powers_, detail::max_map_lipschitz(*ifs_, base_));
  }

  double distance(std::span<const double> x, std::span<const double> y) const override {
    return detail::word_sup(*ifs_, base_, depth_, [this](std::size_t n) { return powers_[n]; }, x, y, reach_);
  }
  std::size_t dim() const override { return ifs_->dim(); }
  std::string label() const override {
    return "banach_power(" + base_.label() + ", m=" + std::to_string(m_) + ", a=" + format_number(a_) + ")";
  }

  const PseudometricDescriptor& base() const { return base_; }
  std::size_t m() const { return m_; }
  double lambda() const { return lambda_; }
  double a() const { return a_; }
  std::size_t depth() const { return depth_; }
  /// Relative size of the largest dropped term, as a multiple of the base diameter.
  double relative_tail() const { return tail_; }

 private:
  std::shared_ptr<const IfsSystem> ifs_;
  PseudometricDescriptor base_;
  std::size_t m_;
  double lambda_;
  double a_;
  std::size_t depth_;
  double tail_;
  std::vector<double> powers_;
  std::vector<double> reach_;
};

/// Largest analytic Lipschitz constant over F^m, if every word has one.
inline std::optional<double> power_lipschitz(const IfsSystem& ifs, const PseudometricDescriptor& base, std::size_t m) {
  auto shared = std::make_shared<const IfsSystem>(ifs);
  double worst = 0.0;
  for (const auto& w : enumerate_words(ifs, m)) {
    auto l = analytic_lipschitz(MapDescriptor::word(shared, w), base, ifs.domain());
    if (!l) return std::nullopt;
    worst = std::max(worst, *l);
  }
  return worst;
}

inline constexpr double kBanachPowerTail = 1e-9;

inline std::shared_ptr<const BanachPowerMetric> build_banach_power(const IfsSystem& ifs, const PseudometricDescriptor& base,
                                                                   std::size_t m, double a, std::size_t depth_cap) {
  if (m == 0) throw RemetrizeError("the power m must be at least 1");
  if (!(a > 1.0)) throw RemetrizeError("the base a must exceed 1");
  const auto lambda = power_lipschitz(ifs, base, m);
  if (!lambda) throw RemetrizeError("no analytic Lipschitz constant for F^" + std::to_string(m) + " under " + base.label());
  const double am = std::pow(a, static_cast<double>(m));
  if (!(am * *lambda < 1.0))
    throw RemetrizeError("a^m * lambda = " + format_number(am * *lambda) + " is not below 1 (a=" + format_number(a) +
                         ", m=" + std::to_string(m) + ", lambda=" + format_number(*lambda) + ")");
  // Term n = k m + r is at most a^n lambda^k L^r times the base distance.
  std::optional<double> single = 0.0;
  for (const auto& f : ifs.maps()) {
    auto l = analytic_lipschitz(f, base, ifs.domain());
    single = (single && l) ? std::optional(std::max(*single, *l)) : std::nullopt;
  }
  const double grow = std::max(1.0, single.value_or(1.0));
  auto term = [&](std::size_t n) {
    return std::pow(a, static_cast<double>(n)) * std::pow(*lambda, static_cast<double>(n / m)) *
           std::pow(grow, static_cast<double>(n % m));
  };
  std::size_t depth = 0;
  double tail = 0.0;
  for (;; ++depth) {
    tail = 0.0;
    for (std::size_t r = 1; r <= m; ++r) tail = std::max(tail, term(depth + r));
    if (tail < kBanachPowerTail || depth >= depth_cap) break;
  }
  if (word_count(ifs.size(), depth, kDefaultWordBudget) > kDefaultWordBudget)
    throw RemetrizeError("banach-power evaluation needs " + std::to_string(ifs.size()) + "^" + std::to_string(depth) +
                         " words; lower depth_cap");
  return std::make_shared<const BanachPowerMetric>(std::make_shared<const IfsSystem>(ifs), base, m, *lambda, a, depth, tail);
}

/// Explicit lambda and depth, no hypothesis checks; used for negative controls.
inline std::shared_ptr<const BanachPowerMetric> build_banach_power_unchecked(const IfsSystem& ifs,
                                                                             const PseudometricDescriptor& base, std::size_t m,
                                                                             double lambda, double a, std::size_t depth) {
  return std::make_shared<const BanachPowerMetric>(std::make_shared<const IfsSystem>(ifs), base, m, lambda, a, depth,
                                                   std::numeric_limits<double>::quiet_NaN());
}

inline PseudometricDescriptor as_descriptor(std::shared_ptr<const BanachPowerMetric> bp) {
  return PseudometricDescriptor(BanachPower{std::move(bp)});
}

struct BanachCheck {
  std::size_t checked = 0;
  double max_ratio = 0.0;
  std::vector<PairViolation> violations;
};

/// d^(f x, f y) <= d^(x, y) / a + 1e-9 * max(1, d^(x, y)) on sampled pairs.
inline BanachCheck verify_banach_under(const BanachPowerMetric& bp, const IfsSystem& ifs, std::size_t pair_samples,
                                       std::uint64_t seed) {
  const auto pairs = detail::sample_box_pairs(ifs.domain(), pair_samples, seed);
  std::vector<std::pair<double, std::vector<double>>> rows(pairs.size());
  parallel::for_chunks(pairs.size(), 4, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t p = b; p < e; ++p) {
      const auto& [x, y] = pairs[p];
      rows[p].first = bp.distance(x.coords(), y.coords());
      for (std::size_t f = 0; f < ifs.size(); ++f)
        rows[p].second.push_back(bp.distance(eval_map(ifs.map(f), x).coords(), eval_map(ifs.map(f), y).coords()));
    }
  });
  BanachCheck out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double before = rows[p].first;
    ++out.checked;
    for (std::size_t f = 0; f < rows[p].second.size(); ++f) {
      const double after = rows[p].second[f];
      if (before > 0.0) out.max_ratio = std::max(out.max_ratio, after / before);
      if (after > before / bp.a() + 1e-9 * std::max(1.0, before))
        out.violations.push_back({pairs[p].first, pairs[p].second, f, before, after});
    }
  }
  return out;
}

}  // namespace hutchfrac
