#pragma once

// Reference function systems with pinned parameters, expected verdicts and
// brute-force oracles.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hutchfrac/classify.hpp"
#include "hutchfrac/hutchinson.hpp"
#include "hutchfrac/maps.hpp"
#include "hutchfrac/metric.hpp"

namespace hutchfrac {

/// Expected verdicts for one pseudometric; empty slots are not pinned.
using ExpectedVerdicts = std::array<std::optional<Verdict>, 6>;

struct SubsystemExpectation {
  std::vector<std::size_t> indices;
  std::vector<ExpectedVerdicts> expected;  ///< one per multimetric member
};

struct AttractorSetup {
  Cloud seed;
  std::size_t stop_metric = 0;  ///< index into the multimetric
  double tol = 1e-6;
  std::size_t max_iter = 64;
  AttractorOptions options;
};

struct CorpusEntry {
  std::string name;
  IfsSystem system;
  Multimetric multimetric;
  std::vector<ExpectedVerdicts> expected;  ///< one per multimetric member
  std::vector<SubsystemExpectation> subsystems;
  ClassifyConfig config;
  AttractorSetup attractor;
  bool banach_attractor = false;  ///< Banach under some member and self-mapping
  std::string notes;
};

namespace corpus {

inline ExpectedVerdicts all(Verdict v) { return {v, v, v, v, v, v}; }

inline ExpectedVerdicts verdicts(std::initializer_list<std::pair<Condition, Verdict>> items) {
  ExpectedVerdicts e{};
  for (auto [c, v] : items) e[static_cast<std::size_t>(c)] = v;
  return e;
}

inline IfsSystem sierpinski_system() {
  return IfsSystem(2,
                   {MapDescriptor::similarity(0.5, {0.0, 0.0}), MapDescriptor::similarity(0.5, {0.5, 0.0}),
                    MapDescriptor::similarity(0.5, {0.0, 0.5})},
                   DomainBox::cube(2, 0.0, 1.0), true, {"s0", "s1", "s2"});
}

inline IfsSystem cantor_system() {
  return IfsSystem(1, {MapDescriptor::similarity(1.0 / 3.0, {0.0}), MapDescriptor::similarity(1.0 / 3.0, {2.0 / 3.0})},
                   DomainBox::cube(1, 0.0, 1.0), true, {"c0", "c1"});
}

/// f(x) = max{0, x - 1}, g(x) = min{2, x + 1} on [0, 2].
inline IfsSystem fg_system() {
  return IfsSystem(1, {MapDescriptor::clamp1d(1.0, -1.0, 0.0, 2.0), MapDescriptor::clamp1d(1.0, 1.0, 0.0, 2.0)},
                   DomainBox::cube(1, 0.0, 2.0), true, {"f", "g"});
}

/// x + e^-x on [0, b]. The box is not invariant: f(b) > b.
inline IfsSystem edelstein_exp_system(double b) {
  return IfsSystem(1, {MapDescriptor::builtin("edelstein_exp")}, DomainBox::cube(1, 0.0, b), false, {"e"});
}

inline IfsSystem product_halving_system(std::size_t k) {
  return IfsSystem(k, {MapDescriptor::builtin("halving")}, DomainBox::cube(k, -1.0, 1.0), true, {"h"});
}

inline IfsSystem plane_halving_system() {
  return IfsSystem(2, {MapDescriptor::builtin("halving")}, DomainBox::cube(2, 0.0, 1.0), true, {"h"});
}

/// g(x, y) = (y, x / 2).
inline IfsSystem swap_halve_system() {
  return IfsSystem(2, {MapDescriptor::affine({{0.0, 1.0}, {0.5, 0.0}}, {0.0, 0.0})}, DomainBox::cube(2, -1.0, 1.0), true,
                   {"g"});
}

inline Multimetric coordinate_family(std::size_t k) {
  Multimetric mm{{}, true};
  for (std::size_t i = 0; i < k; ++i) mm.members.push_back(PseudometricDescriptor::coordinate(i));
  return mm;
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {"sierpinski",         "cantor",           "fg_interval", "edelstein_exp",
                                             "product_halving_k8", "plane_two_coords", "swap_halve"};
  return n;
}

}  // namespace corpus

inline CorpusEntry load_example(const std::string& name) {
  using corpus::all;
  using corpus::verdicts;
  using V = Verdict;
  using C = Condition;
  const auto euclid = Multimetric{{PseudometricDescriptor::euclidean()}, true};

  if (name == "sierpinski") {
    auto sys = corpus::sierpinski_system();
    return CorpusEntry{name,
                       sys,
                       euclid,
                       {all(V::Verified)},
                       {},
                       {},
                       {Cloud::single(Point(std::vector<double>{0.0, 0.0})), 0, 1e-3, 64, {0.0, std::nullopt, 0}},
                       true,
                       "three half-scale similarities; generic Banach system with lambda = 1/2"};
  }
  if (name == "cantor") {
    auto sys = corpus::cantor_system();
    return CorpusEntry{name,
                       sys,
                       euclid,
                       {all(V::Verified)},
                       {},
                       {},
                       {Cloud(1, {0.0, 1.0}), 0, 1e-10, 64, {0.0, std::nullopt, 0}},
                       true,
                       "middle-thirds Cantor system; lambda = 1/3"};
  }
  if (name == "fg_interval") {
    auto sys = corpus::fg_system();
    const auto pair = verdicts({{C::Banach, V::Refuted},
                                {C::Rakotch, V::Refuted},
                                {C::Krasnoselskii, V::Refuted},
                                {C::Matkowski, V::Refuted},
                                {C::Eventual, V::Refuted},
                                {C::Edelstein, V::Refuted}});
    // Each map is an isometry on half of the interval, yet its square is constant.
    const auto single = verdicts({{C::Banach, V::Refuted},
                                  {C::Rakotch, V::Refuted},
                                  {C::Krasnoselskii, V::Refuted},
                                  {C::Matkowski, V::Refuted},
                                  {C::Eventual, V::Verified},
                                  {C::Edelstein, V::Refuted}});
    return CorpusEntry{name,
                       sys,
                       euclid,
                       {pair},
                       {{{0}, {single}}, {{1}, {single}}},
                       {},
                       {Cloud(1, DomainBox::cube(1, 0.0, 2.0).grid(201), default_dedup_tol(sys.domain())), 0, 1e-6, 64,
                        {}},
                       false,
                       "f(x)=max{0,x-1}, g(x)=min{2,x+1}: f^2 and g^2 are constant but (f o g)^n(x) = min{1,x}, so the "
                       "pair is not eventually contracting"};
  }
  if (name == "edelstein_exp") {
    auto sys = corpus::edelstein_exp_system(10.0);
    return CorpusEntry{name,
                       sys,
                       euclid,
                       {all(V::Verified)},
                       {},
                       {},
                       {Cloud(1, {0.0}), 0, 1e-6, 10, {}},
                       false,
                       "f(x)=x+e^-x is Edelstein contracting on [0,inf) without an attractor. Every bounded box [0,b] "
                       "makes it Banach with lambda = 1-e^-b, so verdicts here are box-relative; the missing attractor "
                       "shows up as orbits x_{n+1}=x_n+e^-x_n that grow like ln n and leave every box"};
  }
  if (name == "product_halving_k8") {
    auto sys = corpus::product_halving_system(8);
    std::vector<ExpectedVerdicts> expected(8, all(V::Verified));
    return CorpusEntry{name,
                       sys,
                       corpus::coordinate_family(8),
                       expected,
                       {},
                       {},
                       {Cloud(8, sys.domain().corners()), 0, 1e-6, 64, {}},
                       true,
                       "x -> x/2 on a k=8 truncation of the countable product, with the coordinate pseudometrics. The "
                       "statement that no continuous metric makes the full product eventually contracting concerns the "
                       "infinite product and is not testable on a truncation"};
  }
  if (name == "plane_two_coords") {
    auto sys = corpus::plane_halving_system();
    return CorpusEntry{name,
                       sys,
                       corpus::coordinate_family(2),
                       {all(V::Verified), all(V::Verified)},
                       {},
                       {},
                       {Cloud(2, sys.domain().grid(11)), 0, 1e-6, 64, {}},
                       true,
                       "d1 = |x-x'| and d2 = |y-y'| on the plane; their Hausdorff lifts do not separate the square from "
                       "its diagonal, while the lift of max{d1,d2} does"};
  }
  if (name == "swap_halve") {
    auto sys = corpus::swap_halve_system();
    const auto e = verdicts({{C::Banach, V::Refuted},
                             {C::Rakotch, V::Refuted},
                             {C::Krasnoselskii, V::Refuted},
                             {C::Matkowski, V::Refuted},
                             {C::Eventual, V::Verified},
                             {C::Edelstein, V::Refuted}});
    return CorpusEntry{name,
                       sys,
                       Multimetric{{PseudometricDescriptor::sup()}, true},
                       {e},
                       {},
                       {},
                       {Cloud::single(Point(std::vector<double>{1.0, 1.0})), 0, 1e-6, 128, {}},
                       false,
                       "g(x,y)=(y,x/2) is an isometry on some pairs under the sup metric, but g o g = x/2 is Banach; "
                       "the metric sup_n sup_w a^n d(w x, w y) with a^2/2 < 1 makes g itself Banach"};
  }
  throw Error("unknown corpus entry '" + name + "'");
}

inline std::vector<CorpusEntry> load_all_examples() {
  std::vector<CorpusEntry> out;
  for (const auto& n : corpus::names()) out.push_back(load_example(n));
  return out;
}

/// Verdict mismatches between classify() and the entry's expectations.
struct ExpectationMismatch {
  std::string where;
  Condition condition;
  Verdict expected, actual;
};

inline std::vector<ExpectationMismatch> compare_expected(const ContractivityReport& rep,
                                                         const std::vector<ExpectedVerdicts>& expected,
                                                         const std::string& where) {
  std::vector<ExpectationMismatch> out;
  for (std::size_t m = 0; m < expected.size() && m < rep.metrics.size(); ++m)
    for (auto c : kConditions)
      if (auto e = expected[m][static_cast<std::size_t>(c)]; e && *e != rep.metrics[m][c].verdict)
        out.push_back({where + " / " + rep.metrics[m].metric.label(), c, *e, rep.metrics[m][c].verdict});
  return out;
}

// ---------------------------------------------------------------------------
// Oracles: direct formulas, independent of the classifier and operators.

struct OracleValue {
  std::string key;
  double value = 0.0;
  std::string parameters;
};

struct OracleReport {
  std::string entry;
  std::vector<OracleValue> values;

  std::optional<double> get(const std::string& key) const {
    for (const auto& v : values)
      if (v.key == key) return v.value;
    return std::nullopt;
  }
};

namespace oracle {

/// x_{n+1} = x_n + e^{-x_n} from x_0.
inline double edelstein_orbit(double x0, std::size_t n) {
  double x = x0;
  for (std::size_t i = 0; i < n; ++i) x += std::exp(-x);
  return x;
}

/// max |w(x) - w(y)| over pairs of an h-grid of [0, 2] and w = (f o g)^k, with
/// |x - y| <= t.
inline double fg_power_oscillation(double h, std::size_t k, double t) {
  auto f = [](double x) { return std::max(0.0, x - 1.0); };
  auto g = [](double x) { return std::min(2.0, x + 1.0); };
  const auto n = static_cast<std::size_t>(std::llround(2.0 / h)) + 1;
  std::vector<double> img(n), pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = std::min(2.0, static_cast<double>(i) * h);
    double x = pts[i];
    for (std::size_t r = 0; r < k; ++r) x = f(g(x));
    img[i] = x;
  }
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (pts[j] - pts[i] <= t) best = std::max(best, std::abs(img[j] - img[i]));
  return best;
}

/// Successive Hausdorff residuals of K -> K/3 u (K/3 + 2/3) from {0, 1}, computed
/// on sorted vectors.
inline std::vector<double> cantor_residuals(std::size_t steps) {
  std::vector<double> k = {0.0, 1.0};
  auto directed = [](const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (double x : a) {
      auto it = std::lower_bound(b.begin(), b.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != b.end()) best = *it - x;
      if (it != b.begin()) best = std::min(best, x - *std::prev(it));
      worst = std::max(worst, best);
    }
    return worst;
  };
  std::vector<double> res;
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<double> next;
    next.reserve(2 * k.size());
    for (double x : k) next.push_back(x / 3.0);
    for (double x : k) next.push_back(x / 3.0 + 2.0 / 3.0);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    res.push_back(std::max(directed(k, next), directed(next, k)));
    k.swap(next);
  }
  return res;
}

/// Brute-force Hausdorff distance between the h-grid of [0,1]^2 and the
/// h-sampled diagonal, under d(p, q) = max_i w_i |p_i - q_i| (w = (1,0), (0,1))
/// or the Euclidean metric (euclid = true).
inline double square_vs_diagonal(double h, std::array<double, 2> w, bool euclid) {
  const auto n = static_cast<std::size_t>(std::llround(1.0 / h)) + 1;
  auto coord = [&](std::size_t i) { return std::min(1.0, static_cast<double>(i) * h); };
  auto d = [&](double x0, double y0, double x1, double y1) {
    if (euclid) return std::hypot(x0 - x1, y0 - y1);
    return std::max(w[0] * std::abs(x0 - x1), w[1] * std::abs(y0 - y1));
  };
  double sq_to_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) best = std::min(best, d(coord(i), coord(j), coord(k), coord(k)));
      sq_to_diag = std::max(sq_to_diag, best);
    }
  // Every diagonal sample is itself a grid node, so the other direction is 0.
  return sq_to_diag;
}

}  // namespace oracle

/// Reference numbers for an entry, each with the parameters used to get it.
inline OracleReport run_oracles(const CorpusEntry& e) {
  OracleReport r{e.name, {}};
  if (e.name == "fg_interval") {
    r.values.push_back({"power_oscillation_t2", oracle::fg_power_oscillation(0.005, 3, 2.0), "h=0.005, word=(f,g)^3 (length 6), t=2"});
    r.values.push_back({"power_oscillation_t1", oracle::fg_power_oscillation(0.005, 3, 1.0), "h=0.005, word=(f,g)^3 (length 6), t=1"});
  } else if (e.name == "edelstein_exp") {
    r.values.push_back({"orbit_1000", oracle::edelstein_orbit(0.0, 1000), "x0=0, n=1000"});
    r.values.push_back({"orbit_1000000", oracle::edelstein_orbit(0.0, 1000000), "x0=0, n=10^6"});
    r.values.push_back({"lipschitz_box", -std::expm1(-10.0), "sup of 1-e^-x on [0,10]"});
  } else if (e.name == "cantor") {
    const auto res = oracle::cantor_residuals(14);
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 1; i < res.size(); ++i) {
      lo = std::min(lo, res[i] / res[i - 1]);
      hi = std::max(hi, res[i] / res[i - 1]);
    }
    r.values.push_back({"residual_0", res.front(), "seed {0,1}"});
    r.values.push_back({"residual_ratio_min", lo, "14 steps from {0,1}"});
    r.values.push_back({"residual_ratio_max", hi, "14 steps from {0,1}"});
  } else if (e.name == "sierpinski") {
    // Every length-n word is x -> 2^-n x + c, so its Lipschitz constant is 2^-n.
    r.values.push_back({"word_lipschitz_4", std::ldexp(1.0, -4), "length-4 words"});
    r.values.push_back({"remetrize_depth", std::ceil(std::log2(2.0 * std::sqrt(2.0) / 1e-3)), "first N with 2*2^-N*sqrt(2) < 1e-3"});
  } else if (e.name == "plane_two_coords") {
    r.values.push_back({"d1_hausdorff", oracle::square_vs_diagonal(0.01, {1.0, 0.0}, false), "h=0.01 grid vs diagonal"});
    r.values.push_back({"d2_hausdorff", oracle::square_vs_diagonal(0.01, {0.0, 1.0}, false), "h=0.01 grid vs diagonal"});
    r.values.push_back({"euclidean_hausdorff", oracle::square_vs_diagonal(0.01, {1.0, 1.0}, true), "h=0.01 grid vs diagonal"});
  } else if (e.name == "product_halving_k8") {
    r.values.push_back({"coordinate_lipschitz", 0.5, "|x_i/2 - y_i/2| = |x_i - y_i|/2 for each coordinate"});
  } else if (e.name == "swap_halve") {
    // On a pure-y pair, max(|dy|, |dx|/2) equals max(|dx|, |dy|).
    auto sup = [](double dx, double dy) { return std::max(std::abs(dx), std::abs(dy)); };
    r.values.push_back({"sup_lipschitz_g", sup(1.0, 0.0 / 2.0) / sup(0.0, 1.0), "pair (0,0),(0,1)"});
    r.values.push_back({"sup_lipschitz_gg", 0.5, "g o g = x/2"});
  }
  return r;
}

}  // namespace hutchfrac
