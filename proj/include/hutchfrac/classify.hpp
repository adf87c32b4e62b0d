#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hutchfrac/lipschitz.hpp"
#include "hutchfrac/oscillation.hpp"

namespace hutchfrac {

enum class Verdict { Verified, Refuted, Undetermined };
enum class Condition { Banach, Rakotch, Krasnoselskii, Matkowski, Eventual, Edelstein };

inline constexpr std::array<Condition, 6> kConditions = {Condition::Banach,    Condition::Rakotch,  Condition::Krasnoselskii,
                                                         Condition::Matkowski, Condition::Eventual, Condition::Edelstein};

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Verified: return "verified";
    case Verdict::Refuted: return "refuted";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

inline Verdict verdict_from_name(std::string_view s) {
  if (s == "verified") return Verdict::Verified;
  if (s == "refuted") return Verdict::Refuted;
  if (s == "undetermined") return Verdict::Undetermined;
  throw Error("unknown verdict '" + std::string(s) + "'");
}

inline const char* condition_name(Condition c) {
  switch (c) {
    case Condition::Banach: return "banach";
    case Condition::Rakotch: return "rakotch";
    case Condition::Krasnoselskii: return "krasnoselskii";
    case Condition::Matkowski: return "matkowski";
    case Condition::Eventual: return "eventual";
    case Condition::Edelstein: return "edelstein";
  }
  return "?";
}

inline Condition condition_from_name(std::string_view s) {
  for (auto c : kConditions)
    if (s == condition_name(c)) return c;
  throw Error("unknown contraction condition '" + std::string(s) + "'");
}

/// A pair (x, y) and a word w with images w(x), w(y).
struct Witness {
  Point x, y, fx, fy;
  Word word;
  double ratio = 0.0;
};

struct ConditionResult {
  Verdict verdict = Verdict::Undetermined;
  std::optional<Witness> witness;
  std::vector<std::pair<std::string, double>> certificates;
  std::vector<std::string> notes;
};

/// Verdicts for one pseudometric of the family.
struct MetricReport {
  PseudometricDescriptor metric;
  std::array<ConditionResult, 6> results{};
  bool truncated = false;  ///< a word budget was hit; affected verdicts stay undetermined
  std::vector<std::string> notes;

  ConditionResult& operator[](Condition c) { return results[static_cast<std::size_t>(c)]; }
  const ConditionResult& operator[](Condition c) const { return results[static_cast<std::size_t>(c)]; }
};

struct ClassifyConfig {
  std::optional<double> a_low;   ///< default: first grid value
  std::optional<double> b_high;  ///< default: last grid value
  std::size_t depth_max = 8;
  std::size_t pair_budget = 20000;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  /// Eventual refutation needs dω_{F^n}(diam) >= plateau_eps * diam for all tested n.
  double plateau_eps = 1e-3;
  /// Sample grid nodes per axis; 0 picks the largest grid with at most 400 nodes.
  std::size_t sample_per_axis = 0;
  std::size_t word_budget = 1u << 16;
};

struct ContractivityReport {
  DomainBox domain;
  std::vector<MetricReport> metrics;
  std::vector<std::string> notes;
};

/// Ratios at least this close to 1 count as "not below 1"; the slack absorbs
/// rounding in isometric pairs.
inline constexpr double kRatioSlack = 1e-12;
/// Pairs closer than this are not treated as distinct by the Edelstein check.
inline constexpr double kDistinctPairFloor = 1e-9;

// ---------------------------------------------------------------------------
// Implication chain

struct Implication {
  Condition from, to;
  bool compact_only;
};

/// Banach => Rakotch => Krasnoselskii => Matkowski => Edelstein & Eventual,
/// plus Edelstein => Rakotch on the compact box.
inline constexpr std::array<Implication, 6> kImplications = {{
    {Condition::Banach, Condition::Rakotch, false},
    {Condition::Rakotch, Condition::Krasnoselskii, false},
    {Condition::Krasnoselskii, Condition::Matkowski, false},
    {Condition::Matkowski, Condition::Edelstein, false},
    {Condition::Matkowski, Condition::Eventual, false},
    {Condition::Edelstein, Condition::Rakotch, true},
}};

/// True when no implication goes from a verified to a refuted condition.
inline bool chain_consistent(const MetricReport& r) {
  for (const auto& imp : kImplications)
    if (r[imp.from].verdict == Verdict::Verified && r[imp.to].verdict == Verdict::Refuted) return false;
  return true;
}

inline bool chain_consistent(const ContractivityReport& r) {
  for (const auto& m : r.metrics)
    if (!chain_consistent(m)) return false;
  return true;
}

/// Pushes verified verdicts forward and refuted verdicts backward until
/// nothing changes. Undetermined slots are the only ones ever written.
inline void propagate_chain(MetricReport& r) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& imp : kImplications) {
      auto& from = r[imp.from];
      auto& to = r[imp.to];
      if (from.verdict == Verdict::Verified && to.verdict == Verdict::Undetermined) {
        to.verdict = Verdict::Verified;
        to.notes.push_back(std::string("implied by ") + condition_name(imp.from) +
                           (imp.compact_only ? " on the compact domain box" : ""));
        changed = true;
      }
      if (to.verdict == Verdict::Refuted && from.verdict == Verdict::Undetermined) {
        from.verdict = Verdict::Refuted;
        from.notes.push_back(std::string("implied by ") + condition_name(imp.to) + " being refuted");
        changed = true;
      }
    }
  }
  if (!chain_consistent(r)) r.notes.push_back("verdicts contradict the implication chain");
}

// ---------------------------------------------------------------------------
// Classification

/// Grid nodes per axis for the default sample (at most 400 nodes, at least 2 per axis).
inline std::size_t default_sample_per_axis(std::size_t dim) {
  std::size_t per = 2;
  while (std::pow(static_cast<double>(per + 1), static_cast<double>(dim)) <= static_cast<double>(kAllPairsLimit)) ++per;
  return per;
}

inline Cloud classification_sample(const DomainBox& box, std::size_t per_axis) {
  return Cloud(box.dim(), box.grid(per_axis == 0 ? default_sample_per_axis(box.dim()) : per_axis));
}

namespace detail {

struct RatioRecord {
  double ratio = -1.0;
  std::size_t map = 0, pair = 0;
  double input = 0.0;
};

inline bool better(const RatioRecord& a, const RatioRecord& b) { return a.ratio > b.ratio; }

inline Witness make_witness(const IfsSystem& ifs, const Word& w, std::span<const double> x, std::span<const double> y,
                            double ratio) {
  Point px(x), py(y);
  return Witness{px, py, eval_word(ifs, w, px), eval_word(ifs, w, py), w, ratio};
}

/// Largest ratio d(f x, f y) / d(x, y) in four windows: all pairs, distance
/// >= a_low, distance in [a_low, b_high], distance above the distinct floor.
/// A pair at distance 0 whose images separate has infinite ratio.
struct RatioScan {
  RatioRecord all, rakotch, kras, edelstein;
};

inline RatioScan scan_ratios(const IfsSystem& ifs, const PseudometricDescriptor& d, const Cloud& cloud,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs, double a_low, double b_high) {
  const std::size_t dim = cloud.dim(), n = cloud.size(), m = ifs.size();
  std::vector<double> img(m * n * dim);
  for (std::size_t f = 0; f < m; ++f)
    for (std::size_t i = 0; i < n; ++i) apply_map(ifs.map(f), cloud[i], {img.data() + (f * n + i) * dim, dim});

  const std::size_t chunks = parallel::chunk_count(pairs.size(), 2048);
  std::vector<RatioScan> local(chunks);
  parallel::for_chunks(pairs.size(), 2048, [&](std::size_t b, std::size_t e, std::size_t c) {
    RatioScan& s = local[c];
    for (std::size_t p = b; p < e; ++p) {
      const auto [i, j] = pairs[p];
      const double in = d.raw(cloud[i], cloud[j]);
      for (std::size_t f = 0; f < m; ++f) {
        const double* base = img.data() + f * n * dim;
        const double out = d.raw({base + i * dim, dim}, {base + j * dim, dim});
        double ratio;
        if (in > 0.0) {
          ratio = out / in;
        } else if (out > 0.0) {
          ratio = std::numeric_limits<double>::infinity();
        } else {
          continue;
        }
        const RatioRecord rec{ratio, f, p, in};
        if (better(rec, s.all)) s.all = rec;
        if (in >= a_low && better(rec, s.rakotch)) s.rakotch = rec;
        if (in >= a_low && in <= b_high && better(rec, s.kras)) s.kras = rec;
        if ((in > kDistinctPairFloor || in == 0.0) && better(rec, s.edelstein)) s.edelstein = rec;
      }
    }
  });
  RatioScan out;
  for (const auto& s : local) {
    if (better(s.all, out.all)) out.all = s.all;
    if (better(s.rakotch, out.rakotch)) out.rakotch = s.rakotch;
    if (better(s.kras, out.kras)) out.kras = s.kras;
    if (better(s.edelstein, out.edelstein)) out.edelstein = s.edelstein;
  }
  return out;
}

/// A word u with two fixed points a != b such that u preserves the distances
/// from a and from b of three interior points of the segment [a, b]. Every
/// power u^k then moves the pair (a, b) isometrically, so dω_{F^n} cannot
/// tend to zero.
struct PeriodicCertificate {
  Word word;
  Point a, b;
};

inline std::optional<PeriodicCertificate> find_periodic_certificate(const IfsSystem& ifs, const PseudometricDescriptor& d,
                                                                    const Cloud& cloud, double min_gap, double scale,
                                                                    std::size_t max_len, std::size_t word_budget) {
  const std::size_t dim = ifs.dim();
  const double fixed_tol = 1e-12 * std::max(1.0, scale);
  std::vector<double> x(dim), y(dim);
  for (std::size_t len = 1; len <= max_len; ++len) {
    if (word_count(ifs.size(), len, word_budget) > word_budget) break;
    for (const auto& u : enumerate_words(ifs, len, word_budget)) {
      std::vector<Point> fixed;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        std::copy(cloud[i].begin(), cloud[i].end(), x.begin());
        for (int r = 0; r < 64; ++r) {
          apply_word(ifs, u, x, y);
          x.swap(y);
        }
        apply_word(ifs, u, x, y);
        if (d.raw(x, y) > fixed_tol) continue;
        bool seen = false;
        for (const auto& p : fixed)
          if (d.raw(p.coords(), x) <= fixed_tol) {
            seen = true;
            break;
          }
        if (!seen) fixed.emplace_back(std::span<const double>(x));
      }
      // Farthest pair of fixed points, earliest on ties.
      double best = 0.0;
      std::optional<std::pair<std::size_t, std::size_t>> ab;
      for (std::size_t i = 0; i < fixed.size(); ++i)
        for (std::size_t j = i + 1; j < fixed.size(); ++j)
          if (double g = d(fixed[i], fixed[j]); g > best) {
            best = g;
            ab = std::pair{i, j};
          }
      if (!ab || best < min_gap) continue;
      const Point& a = fixed[ab->first];
      const Point& b = fixed[ab->second];
      const Point ua = eval_word(ifs, u, a), ub = eval_word(ifs, u, b);
      bool isometric = true;
      for (double s : {0.25, 0.5, 0.75}) {
        std::vector<double> z(dim);
        for (std::size_t k = 0; k < dim; ++k) z[k] = a[k] + s * (b[k] - a[k]);
        const Point pz(std::move(z));
        const Point uz = eval_word(ifs, u, pz);
        if (std::abs(d(uz, ua) - d(pz, a)) > fixed_tol || std::abs(d(uz, ub) - d(pz, b)) > fixed_tol) {
          isometric = false;
          break;
        }
      }
      if (isometric) return PeriodicCertificate{u, a, b};
    }
  }
  return std::nullopt;
}

inline double grid_diameter(const DomainBox& box, const PseudometricDescriptor& d) {
  return diameter(d, box.corners(), box.dim());
}

}  // namespace detail

/// Tri-state verdicts for the six contraction conditions under one pseudometric.
/// Sampling can refute; verification needs an analytic certificate. The
/// result is always relative to the system's domain box.
inline MetricReport classify_metric(const IfsSystem& ifs, const PseudometricDescriptor& d, const ClassifyConfig& cfg) {
  MetricReport r;
  r.metric = d;
  const DomainBox& box = ifs.domain();
  const auto grid = default_t_grid(box, d);
  const double diam = grid.back();
  const double a_low = cfg.a_low.value_or(grid.front());
  const double b_high = cfg.b_high.value_or(grid.back());
  if (!(a_low > 0.0) || !(b_high >= a_low)) throw ConfigError("classify needs 0 < a_low <= b_high");
  const Cloud sample = classification_sample(box, cfg.sample_per_axis);
  const auto pairs = sample_pairs(sample.size(), cfg.pair_budget, cfg.seed);

  // Analytic data.
  std::optional<double> lmax = 0.0;
  bool all_edelstein = true;
  for (const auto& m : ifs.maps()) {
    auto l = analytic_lipschitz(m, d, box);
    lmax = (lmax && l) ? std::optional(std::max(*lmax, *l)) : std::nullopt;
    all_edelstein = all_edelstein && edelstein_certified(m, d, box);
  }

  auto& banach = r[Condition::Banach];
  if (lmax) {
    banach.certificates.emplace_back("lipschitz_max", *lmax);
    if (*lmax < 1.0 - cfg.tol) {
      banach.verdict = Verdict::Verified;
      banach.certificates.emplace_back("lambda", *lmax);
    }
  }

  auto& edel = r[Condition::Edelstein];
  if (all_edelstein) {
    edel.verdict = Verdict::Verified;
    edel.notes.push_back("every map has a derivative or Lipschitz bound below 1 on the box");
  }

  // Sampled ratios. Once every map is certified Edelstein, a ratio that rounds
  // to 1 cannot be a genuine counterexample.
  const auto scan = detail::scan_ratios(ifs, d, sample, pairs, a_low, b_high);
  auto witness_of = [&](const detail::RatioRecord& rec) {
    const auto [i, j] = pairs[rec.pair];
    return detail::make_witness(ifs, Word{{rec.map}}, sample[i], sample[j], rec.ratio);
  };
  auto apply_scan = [&](ConditionResult& res, const detail::RatioRecord& rec, const char* key) {
    if (rec.ratio < 0.0) return;
    res.certificates.emplace_back(key, rec.ratio);
    if (rec.ratio >= 1.0 - kRatioSlack) {
      if (all_edelstein) {
        res.notes.push_back("sampled ratio rounds to 1 but every map is certified strictly contracting; ignored");
      } else if (res.verdict == Verdict::Undetermined) {
        res.verdict = Verdict::Refuted;
        res.witness = witness_of(rec);
      }
    }
  };
  apply_scan(banach, scan.all, "sampled_sup_ratio");
  apply_scan(r[Condition::Rakotch], scan.rakotch, "sampled_sup_ratio_above_a");
  apply_scan(r[Condition::Krasnoselskii], scan.kras, "sampled_sup_ratio_in_window");
  apply_scan(edel, scan.edelstein, "sampled_sup_ratio_distinct");
  r[Condition::Rakotch].certificates.emplace_back("a_low", a_low);
  r[Condition::Krasnoselskii].certificates.emplace_back("a_low", a_low);
  r[Condition::Krasnoselskii].certificates.emplace_back("b_high", b_high);

  // Matkowski from the closed-form system oscillation.
  auto& matk = r[Condition::Matkowski];
  if (auto prof = oscillation_analytic(ifs, d, grid)) {
    if (prof->mode == ProfileMode::AnalyticExact) {
      for (std::size_t k = 0; k < grid.size(); ++k)
        if (prof->values[k] >= grid[k] * (1.0 - kRatioSlack)) {
          matk.verdict = Verdict::Refuted;
          matk.certificates.emplace_back("fixed_t", grid[k]);
          matk.notes.push_back("exact oscillation satisfies omega(t) >= t, so its iterates never reach 0 at t");
          break;
        }
    }
    if (matk.verdict == Verdict::Undetermined) {
      for (std::size_t n = 1; n <= cfg.depth_max; ++n) {
        const auto it = iterate_profile(*prof, n);
        if (*std::max_element(it.values.begin(), it.values.end()) <= cfg.tol) {
          matk.verdict = Verdict::Verified;
          matk.certificates.emplace_back("iterations", static_cast<double>(n));
          break;
        }
      }
    }
  }

  // Eventual contractivity: analytic Lipschitz constants of every word of some length.
  auto& ev = r[Condition::Eventual];
  if (lmax) {
    auto shared = std::make_shared<const IfsSystem>(ifs);
    for (std::size_t n = 1; n <= cfg.depth_max && ev.verdict == Verdict::Undetermined; ++n) {
      if (word_count(ifs.size(), n, cfg.word_budget) > cfg.word_budget) {
        r.truncated = true;
        ev.notes.push_back("word budget reached at length " + std::to_string(n));
        break;
      }
      std::optional<double> worst = 0.0;
      for (const auto& w : enumerate_words(ifs, n, cfg.word_budget)) {
        auto l = analytic_lipschitz(MapDescriptor::word(shared, w), d, box);
        if (!l) {
          worst.reset();
          break;
        }
        worst = std::max(*worst, *l);
      }
      if (!worst) break;
      if (*worst < 1.0 - cfg.tol) {
        ev.verdict = Verdict::Verified;
        ev.certificates.emplace_back("power", static_cast<double>(n));
        ev.certificates.emplace_back("lambda", *worst);
      }
    }
  }

  propagate_chain(r);

  // Eventual refutation: a plateau of dω_{F^n}(diam) plus a periodic certificate.
  if (ev.verdict == Verdict::Undetermined) {
    double plateau = std::numeric_limits<double>::infinity();
    std::size_t tested = 0;
    for (std::size_t n = 1; n <= cfg.depth_max; ++n) {
      if (word_count(ifs.size(), n, cfg.word_budget) > cfg.word_budget) {
        r.truncated = true;
        ev.notes.push_back("plateau scan stopped at length " + std::to_string(n) + " by the word budget");
        break;
      }
      const auto p = system_power_oscillation(ifs, d, n, sample, grid, cfg.pair_budget, cfg.seed, cfg.word_budget);
      plateau = std::min(plateau, p.values.back());
      ++tested;
      if (plateau < cfg.plateau_eps * diam) break;
    }
    if (tested == cfg.depth_max && plateau >= cfg.plateau_eps * diam) {
      ev.certificates.emplace_back("plateau", plateau);
      if (auto cert = detail::find_periodic_certificate(ifs, d, sample, cfg.plateau_eps * diam, diam, 4, cfg.word_budget)) {
        const std::size_t reps = (cfg.depth_max + cert->word.size() - 1) / cert->word.size();
        const Word w = cert->word.repeated(reps);
        // Pair whose images stay farthest apart; larger input distance breaks ties.
        std::vector<double> img(sample.size() * ifs.dim());
        for (std::size_t i = 0; i < sample.size(); ++i) apply_word(ifs, w, sample[i], {img.data() + i * ifs.dim(), ifs.dim()});
        double best_out = -1.0, best_in = -1.0;
        std::size_t bi = 0, bj = 0;
        for (const auto& [i, j] : pairs) {
          const double out = d.raw({img.data() + i * ifs.dim(), ifs.dim()}, {img.data() + j * ifs.dim(), ifs.dim()});
          const double in = d.raw(sample[i], sample[j]);
          if (out > best_out || (out == best_out && in > best_in)) {
            best_out = out;
            best_in = in;
            bi = i;
            bj = j;
          }
        }
        ev.verdict = Verdict::Refuted;
        ev.witness = detail::make_witness(ifs, w, sample[bi], sample[bj], best_in > 0 ? best_out / best_in : 0.0);
        ev.certificates.emplace_back("fixed_gap", d(cert->a, cert->b));
        ev.notes.push_back("word " + cert->word.to_string() + " fixes two points and acts isometrically on the segment between them");
      }
    }
    propagate_chain(r);
  }
  return r;
}

/// classify(): one MetricReport per member of the family.
inline ContractivityReport classify(const IfsSystem& ifs, const Multimetric& dd, const ClassifyConfig& cfg = {}) {
  if (dd.members.empty()) throw ConfigError("classify needs at least one pseudometric");
  ContractivityReport rep;
  rep.domain = ifs.domain();
  for (const auto& d : dd.members) rep.metrics.push_back(classify_metric(ifs, d, cfg));
  rep.notes.push_back("verdicts are relative to the domain box " + format_box(ifs.domain()));
  return rep;
}

}  // namespace hutchfrac
