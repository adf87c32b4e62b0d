#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hutchfrac/hausdorff.hpp"
#include "hutchfrac/lipschitz.hpp"
#include "hutchfrac/maps.hpp"
#include "hutchfrac/metric.hpp"
#include "hutchfrac/parallel.hpp"
#include "hutchfrac/rng.hpp"

namespace hutchfrac {

enum class ProfileMode { EmpiricalLowerBound, AnalyticExact, AnalyticUpperBound };

inline const char* profile_mode_name(ProfileMode m) {
  switch (m) {
    case ProfileMode::EmpiricalLowerBound: return "empirical_lower_bound";
    case ProfileMode::AnalyticExact: return "analytic_exact";
    case ProfileMode::AnalyticUpperBound: return "analytic_upper_bound";
  }
  return "?";
}

/// The pair and word realising the largest sampled image distance.
struct ProfileWitness {
  Word word;
  std::size_t i = 0, j = 0;  ///< indices into the sampled cloud
  double input = 0.0;
  double output = 0.0;
};

/// Sampled nondecreasing approximation of an oscillation t -> omega(t).
struct OscillationProfile {
  std::vector<double> t_grid;
  std::vector<double> values;
  ProfileMode mode = ProfileMode::EmpiricalLowerBound;
  /// omega(t) <= min(lipschitz * t, cap) for every t, when known.
  std::optional<double> lipschitz;
  double cap = std::numeric_limits<double>::infinity();
  std::optional<ProfileWitness> witness;

  /// Conservative reading: omega(s) is taken at the next grid value >= s.
  double at(double s) const {
    if (!(s > 0.0)) return 0.0;
    const auto it = std::lower_bound(t_grid.begin(), t_grid.end(), s);
    if (it == t_grid.end()) return lipschitz ? std::min(*lipschitz * s, cap) : std::numeric_limits<double>::infinity();
    double v = values[static_cast<std::size_t>(it - t_grid.begin())];
    if (lipschitz) v = std::min(v, *lipschitz * s);
    return v;
  }
};

inline constexpr std::size_t kDefaultGridSize = 32;

/// n log-spaced values from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw Error("log_grid needs 0 < lo <= hi and n > 0");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    g[i] = lo * std::pow(hi / lo, u);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// 32 log-spaced points from 1e-3 diam to diam, diam measured by d on the box.
inline std::vector<double> default_t_grid(const DomainBox& box, const PseudometricDescriptor& d) {
  const auto corners = box.corners();
  const double diam = diameter(d, corners, box.dim());
  if (!(diam > 0.0)) throw Error("the domain box has zero diameter under " + d.label());
  return log_grid(1e-3 * diam, diam, kDefaultGridSize);
}

inline void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw Error("oscillation needs a non-empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !std::isfinite(t_grid[i])) throw Error("t grid values must be positive and finite");
    if (i && !(t_grid[i] > t_grid[i - 1])) throw Error("t grid must be strictly increasing");
  }
}

inline constexpr std::size_t kAllPairsLimit = 400;

/// Index pairs (i < j): all of them for clouds of at most 400 points, otherwise
/// `budget` seeded uniform draws. Draws come from one stream, so a larger
/// budget extends a smaller one.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t budget, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n <= kAllPairsLimit) {
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
  }
  Rng rng(seed);
  out.reserve(budget);
  while (out.size() < budget) {
    std::size_t i = rng.index(n), j = rng.index(n);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    out.emplace_back(i, j);
  }
  return out;
}

namespace detail {

/// Images of every cloud point under every word, flat [word][point][coord].
inline std::vector<double> word_images(const IfsSystem& ifs, const std::vector<Word>& words, const Cloud& cloud) {
  const std::size_t d = cloud.dim(), n = cloud.size();
  std::vector<double> img(words.size() * n * d);
  parallel::for_chunks(words.size(), 8, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t w = b; w < e; ++w)
      for (std::size_t i = 0; i < n; ++i) apply_word(ifs, words[w], cloud[i], {img.data() + (w * n + i) * d, d});
  });
  return img;
}

/// Shared core: bucket each sampled pair at the first grid t >= d(x, y), keep
/// the largest image distance over all words, then take a running maximum.
inline OscillationProfile empirical_profile(const IfsSystem& ifs, const std::vector<Word>& words,
                                            const PseudometricDescriptor& d, const Cloud& cloud,
                                            const std::vector<double>& t_grid, std::size_t pair_budget,
                                            std::uint64_t seed) {
  check_grid(t_grid);
  if (cloud.size() == 0) throw Error("oscillation needs a non-empty domain cloud");
  require_dim(ifs.dim(), cloud.dim(), "oscillation domain");
  const std::size_t dim = cloud.dim(), n = cloud.size(), g = t_grid.size();
  const auto pairs = sample_pairs(n, pair_budget, seed);
  const auto img = word_images(ifs, words, cloud);

  std::vector<std::size_t> bucket(pairs.size(), g);
  std::vector<double> input(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    input[p] = d.raw(cloud[pairs[p].first], cloud[pairs[p].second]);
    bucket[p] = static_cast<std::size_t>(std::lower_bound(t_grid.begin(), t_grid.end(), input[p]) - t_grid.begin());
  }

  struct Local {
    std::vector<double> values;
    std::optional<ProfileWitness> best;
  };
  const std::size_t chunks = parallel::chunk_count(words.size(), 1);
  std::vector<Local> local(chunks);
  parallel::for_chunks(words.size(), 1, [&](std::size_t b, std::size_t e, std::size_t c) {
    Local& l = local[c];
    l.values.assign(g, 0.0);
    for (std::size_t w = b; w < e; ++w) {
      const double* base = img.data() + w * n * dim;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (bucket[p] == g) continue;
        const auto [i, j] = pairs[p];
        const double out = d.raw({base + i * dim, dim}, {base + j * dim, dim});
        l.values[bucket[p]] = std::max(l.values[bucket[p]], out);
        if (!l.best || out > l.best->output || (out == l.best->output && input[p] > l.best->input))
          l.best = ProfileWitness{words[w], i, j, input[p], out};
      }
    }
  });

  OscillationProfile prof;
  prof.t_grid = t_grid;
  prof.values.assign(g, 0.0);
  for (const auto& l : local) {
    for (std::size_t k = 0; k < g; ++k) prof.values[k] = std::max(prof.values[k], l.values[k]);
    // Chunks hold increasing word ranges, so strict comparison keeps the
    // earliest word among equal candidates.
    if (l.best && (!prof.witness || l.best->output > prof.witness->output ||
                   (l.best->output == prof.witness->output && l.best->input > prof.witness->input)))
      prof.witness = l.best;
  }
  for (std::size_t k = 1; k < g; ++k) prof.values[k] = std::max(prof.values[k], prof.values[k - 1]);
  return prof;
}

inline std::vector<Word> single_letters(std::size_t m) {
  std::vector<Word> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i].letters = {i};
  return w;
}

}  // namespace detail

/// Empirical d-oscillation of the whole system: for each t the largest
/// d(f(x), f(y)) over sampled pairs with d(x, y) <= t and all f in F.
inline OscillationProfile oscillation_empirical(const IfsSystem& ifs, const PseudometricDescriptor& d, const Cloud& domain,
                                                const std::vector<double>& t_grid, std::size_t pair_budget,
                                                std::uint64_t seed) {
  return detail::empirical_profile(ifs, detail::single_letters(ifs.size()), d, domain, t_grid, pair_budget, seed);
}

inline OscillationProfile oscillation_empirical(const MapDescriptor& map, const PseudometricDescriptor& d, const Cloud& domain,
                                                const std::vector<double>& t_grid, std::size_t pair_budget,
                                                std::uint64_t seed) {
  std::vector<double> lo(domain[0].begin(), domain[0].end()), hi = lo;
  for (std::size_t i = 1; i < domain.size(); ++i)
    for (std::size_t k = 0; k < domain.dim(); ++k) {
      lo[k] = std::min(lo[k], domain[i][k]);
      hi[k] = std::max(hi[k], domain[i][k]);
    }
  const IfsSystem single(domain.dim(), {map}, DomainBox(Point(std::move(lo)), Point(std::move(hi))));
  return oscillation_empirical(single, d, domain, t_grid, pair_budget, seed);
}

/// Closed-form oscillation of one map on the box, when its kind allows it.
inline std::optional<OscillationProfile> oscillation_analytic(const MapDescriptor& map, const PseudometricDescriptor& d,
                                                              const std::vector<double>& t_grid,
                                                              const DomainBox* domain = nullptr) {
  check_grid(t_grid);
  auto mod = analytic_modulus(map, d, domain);
  if (!mod) return std::nullopt;
  OscillationProfile p;
  p.t_grid = t_grid;
  p.mode = mod->exact ? ProfileMode::AnalyticExact : ProfileMode::AnalyticUpperBound;
  for (double t : t_grid) p.values.push_back((*mod)(t));
  p.lipschitz = mod->slope;
  p.cap = mod->cap;
  return p;
}

/// dω_F = max over the maps; exact only if every member profile is.
inline std::optional<OscillationProfile> oscillation_analytic(const IfsSystem& ifs, const PseudometricDescriptor& d,
                                                              const std::vector<double>& t_grid) {
  std::optional<OscillationProfile> acc;
  for (const auto& m : ifs.maps()) {
    auto p = oscillation_analytic(m, d, t_grid, &ifs.domain());
    if (!p) return std::nullopt;
    if (!acc) {
      acc = std::move(p);
      continue;
    }
    for (std::size_t k = 0; k < t_grid.size(); ++k) acc->values[k] = std::max(acc->values[k], p->values[k]);
    acc->lipschitz = std::max(*acc->lipschitz, *p->lipschitz);
    acc->cap = std::max(acc->cap, p->cap);
    if (p->mode != ProfileMode::AnalyticExact) acc->mode = ProfileMode::AnalyticUpperBound;
  }
  return acc;
}

/// n-fold composition omega o ... o omega on the grid. Intermediate values are
/// rounded up to the next grid point, which keeps upper bounds upper bounds.
inline OscillationProfile iterate_profile(const OscillationProfile& p, std::size_t n) {
  if (n == 0) throw Error("iterate_profile needs n >= 1");
  OscillationProfile out = p;
  out.witness.reset();
  for (std::size_t k = 0; k < p.t_grid.size(); ++k) {
    double v = p.values[k];
    for (std::size_t r = 1; r < n; ++r) v = p.at(v);
    out.values[k] = v;
  }
  if (p.lipschitz) out.lipschitz = std::pow(*p.lipschitz, static_cast<double>(n));
  return out;
}

/// Empirical dω_{F^n}: every word of length n against the sampled pairs.
inline OscillationProfile system_power_oscillation(const IfsSystem& ifs, const PseudometricDescriptor& d, std::size_t n,
                                                   const Cloud& domain, const std::vector<double>& t_grid,
                                                   std::size_t pair_budget, std::uint64_t seed,
                                                   std::size_t word_budget = kDefaultWordBudget) {
  return detail::empirical_profile(ifs, enumerate_words(ifs, n, word_budget), d, domain, t_grid, pair_budget, seed);
}

}  // namespace hutchfrac
