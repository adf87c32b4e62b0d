#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "hutchfrac/hausdorff.hpp"
#include "hutchfrac/maps.hpp"
#include "hutchfrac/metric.hpp"
#include "hutchfrac/parallel.hpp"
#include "hutchfrac/rng.hpp"

namespace hutchfrac {

/// Moves every coordinate to the nearest multiple of `resolution`.
inline void snap_to_grid(std::vector<double>& flat, double resolution) {
  for (double& v : flat) v = resolution * std::nearbyint(v / resolution);
}

/// F(K) = union of f(K). Images are listed map by map, so deduplication keeps
/// the first map's copy. Throws DomainEscape if an image leaves the box.
inline Cloud hutchinson_step(const IfsSystem& ifs, const Cloud& k, std::optional<double> dedup_tol = std::nullopt,
                             std::optional<double> snap = std::nullopt) {
  require_dim(ifs.dim(), k.dim(), "hutchinson_step");
  const std::size_t d = k.dim(), n = k.size(), m = ifs.size();
  std::vector<double> flat(m * n * d);
  std::vector<char> escaped(parallel::chunk_count(n, 4096), 0);
  const double slack = ifs.domain().escape_slack();
  parallel::for_chunks(n, 4096, [&](std::size_t b, std::size_t e, std::size_t c) {
    for (std::size_t f = 0; f < m; ++f)
      for (std::size_t i = b; i < e; ++i) {
        std::span<double> out{flat.data() + (f * n + i) * d, d};
        apply_map(ifs.map(f), k[i], out);
        if (!ifs.domain().contains(out, slack)) escaped[c] = 1;
      }
  });
  for (char e : escaped)
    if (e) throw DomainEscape("an image of the cloud leaves the domain box " + format_box(ifs.domain()));
  if (snap) snap_to_grid(flat, *snap);
  return Cloud(d, std::move(flat), dedup_tol.value_or(k.dedup_tol()));
}

struct ConvergenceTrace {
  std::vector<double> residuals;  ///< d_H(K_n, K_{n+1})
  std::size_t iterations = 0;
  bool converged = false;
  bool stopped_by_size = false;  ///< the cloud outgrew max_points before converging
  Cloud final_cloud;
};

struct AttractorOptions {
  std::optional<double> dedup_tol;  ///< default: the seed cloud's own tolerance
  std::optional<double> snap;       ///< voxel resolution applied after every step
  std::size_t max_points = 0;       ///< 0 = unlimited
};

/// Iterates K -> F(K) until successive iterates are within tol under
/// stop_metric's Hausdorff distance, or max_iter steps. Non-convergence is
/// reported, not thrown.
inline ConvergenceTrace attractor_deterministic(const IfsSystem& ifs, const Cloud& seed, const PseudometricDescriptor& stop_metric,
                                                double tol, std::size_t max_iter, const AttractorOptions& opt = {}) {
  if (!(tol > 0.0)) throw Error("attractor tolerance must be positive");
  if (opt.snap && !(*opt.snap > 0.0)) throw Error("snap resolution must be positive");
  ConvergenceTrace trace;
  Cloud k = seed;
  if (opt.dedup_tol || opt.snap) {
    std::vector<double> flat = k.data();
    if (opt.snap) snap_to_grid(flat, *opt.snap);
    k = Cloud(k.dim(), std::move(flat), opt.dedup_tol.value_or(seed.dedup_tol()));
  }
  while (trace.iterations < max_iter) {
    Cloud next = hutchinson_step(ifs, k, opt.dedup_tol.value_or(seed.dedup_tol()), opt.snap);
    const double r = hausdorff(stop_metric, k, next);
    trace.residuals.push_back(r);
    ++trace.iterations;
    k = std::move(next);
    if (r < tol) {
      trace.converged = true;
      break;
    }
    if (opt.max_points && k.size() * ifs.size() > opt.max_points) {
      trace.stopped_by_size = true;
      break;
    }
  }
  trace.final_cloud = std::move(k);
  return trace;
}

/// Random orbit: at each step a map index is drawn with Rng::index(|F|) and
/// applied. Points produced after the first burn_in steps are collected.
inline Cloud chaos_game(const IfsSystem& ifs, const Point& start, std::size_t iterations, std::size_t burn_in,
                        std::uint64_t seed) {
  require_dim(ifs.dim(), start.dim(), "chaos_game start");
  if (!(iterations > burn_in)) throw Error("chaos_game needs iterations > burn_in");
  Rng rng(seed);
  const std::size_t d = ifs.dim();
  std::vector<double> x(start.coords().begin(), start.coords().end()), y(d), out;
  out.reserve((iterations - burn_in) * d);
  for (std::size_t s = 0; s < iterations; ++s) {
    apply_map(ifs.map(rng.index(ifs.size())), x, y);
    x.swap(y);
    if (s >= burn_in) out.insert(out.end(), x.begin(), x.end());
  }
  return Cloud(d, std::move(out));
}

/// Eventually periodic symbol sequence: preperiod, then period repeated forever.
struct SymbolStream {
  Word preperiod;
  Word period;

  std::size_t at(std::size_t n) const {
    if (n < preperiod.size()) return preperiod.letters[n];
    return period.letters[(n - preperiod.size()) % period.size()];
  }

  /// The first n letters.
  Word prefix(std::size_t n) const {
    Word w;
    w.letters.reserve(n);
    for (std::size_t i = 0; i < n; ++i) w.letters.push_back(at(i));
    return w;
  }
};

struct CodingResult {
  Point point;
  double radius = 0.0;  ///< displacement of the last step, max over the metrics
  std::size_t depth = 0;
};

/// Thrown by coding_map when successive images never come within tol.
class NoContraction : public Error {
 public:
  NoContraction(const std::string& what, Point last) : Error(what), last_(std::move(last)) {}
  const Point& last_iterate() const { return last_; }

 private:
  Point last_;
};

/// pi(s) approximated by f_{s_0} o ... o f_{s_{n-1}}(x0), stopping once two
/// successive depths are within tol under every metric.
inline CodingResult coding_map(const IfsSystem& ifs, const SymbolStream& s, const Point& x0, double tol, std::size_t depth_cap,
                               const Multimetric& metrics = {{PseudometricDescriptor::euclidean()}}) {
  if (!(tol > 0.0)) throw Error("coding_map tolerance must be positive");
  if (s.period.empty()) throw Error("symbol stream needs a non-empty period");
  check_word(ifs, s.preperiod);
  check_word(ifs, s.period);
  require_dim(ifs.dim(), x0.dim(), "coding_map start");
  if (metrics.members.empty()) throw Error("coding_map needs at least one metric");
  Point prev = x0;
  for (std::size_t n = 1; n <= depth_cap; ++n) {
    Point cur = eval_word(ifs, s.prefix(n), x0);
    double step = 0.0;
    for (const auto& d : metrics.members) step = std::max(step, d(prev, cur));
    if (step < tol) return {cur, step, n};
    prev = std::move(cur);
  }
  throw NoContraction("no contraction detected within depth " + std::to_string(depth_cap), prev);
}

/// { w(base) : w in F^depth }, deduplicated.
inline Cloud attractor_by_words(const IfsSystem& ifs, std::size_t depth, const Point& base, double dedup_tol = 0.0,
                                std::size_t budget = kDefaultWordBudget) {
  require_dim(ifs.dim(), base.dim(), "attractor_by_words base");
  const auto words = enumerate_words(ifs, depth, budget);
  const std::size_t d = ifs.dim();
  std::vector<double> flat(words.size() * d);
  parallel::for_chunks(words.size(), 1024, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t w = b; w < e; ++w) apply_word(ifs, words[w], base.coords(), {flat.data() + w * d, d});
  });
  return Cloud(d, std::move(flat), dedup_tol);
}

}  // namespace hutchfrac
