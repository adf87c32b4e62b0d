#pragma once

// JSON run configuration:
//
//   {
//     "name": "sierpinski",
//     "dim": 2,
//     "domain": {"lo": [0, 0], "hi": [1, 1]},
//     "self_mapping": true,
//     "maps": [
//       {"type": "affine", "matrix": [[0.5, 0], [0, 0.5]], "offset": [0, 0], "name": "s0"},
//       {"type": "clamp1d", "slope": 1, "shift": -1, "lo": 0, "hi": 2},
//       {"type": "builtin", "builtin": "halving", "parameters": []},
//       {"type": "word", "letters": [0, 1]}
//     ],
//     "metrics": [{"type": "euclidean"}, {"type": "coordinate", "index": 0}, ...],
//     "separates_points": true,
//     "options": {...}
//   }
//
// Word maps index the system made of the non-word maps, in listed order.
// Metric types: euclidean, sup, coordinate{index}, weighted_max{terms: [[i, w]]},
// max_of{members}, hausdorff{base}. Every options key is optional.

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hutchfrac/classify.hpp"
#include "hutchfrac/corpus.hpp"
#include "hutchfrac/errors.hpp"
#include "hutchfrac/maps.hpp"
#include "hutchfrac/metric.hpp"

namespace hutchfrac {

using Json = nlohmann::ordered_json;

struct RemetrizeOptions {
  double eps = 1e-3;
  std::size_t depth_cap = 20;
  std::size_t pairs = 500;
  std::optional<double> a_low;
  std::optional<double> b_high;
  std::size_t m = 2;    ///< banach-power exponent
  double a = 1.2;       ///< banach-power base
  std::size_t power_depth_cap = 400;
};

struct RunOptions {
  std::optional<std::vector<std::vector<double>>> seed_points;
  std::size_t seed_grid = 0;  ///< seed with a grid of the box when no points are given
  std::size_t stop_metric = 0;
  double tol = 1e-6;
  std::size_t max_iter = 64;
  std::optional<double> dedup_tol;
  std::optional<double> snap;
  std::size_t max_points = 0;
  ClassifyConfig classify;
  RemetrizeOptions remetrize;
};

struct RunConfig {
  std::string name;
  std::shared_ptr<const IfsSystem> system;
  Multimetric multimetric;
  RunOptions options;
  Json source;  ///< the JSON this config was read from (or written as)

  Cloud seed_cloud() const {
    const auto& box = system->domain();
    const double tol = options.dedup_tol.value_or(0.0);
    if (options.seed_points) {
      std::vector<Point> pts;
      for (const auto& p : *options.seed_points) pts.emplace_back(p);
      return Cloud::from_points(pts, tol);
    }
    if (options.seed_grid >= 2) return Cloud(box.dim(), box.grid(options.seed_grid), tol);
    return Cloud::single(box.lo());
  }
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

inline const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing key '") + key + "'");
  return j.at(key);
}

inline double num(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

inline std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(where, "expected a nonnegative integer");
  const auto v = j.get<long long>();
  if (v < 0) fail(where, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> vec(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Json vec_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

inline PseudometricDescriptor metric_from_json(const Json& j, const std::string& where) {
  const auto type = need(j, "type", where).get<std::string>();
  if (type == "euclidean") return PseudometricDescriptor::euclidean();
  if (type == "sup") return PseudometricDescriptor::sup();
  if (type == "coordinate") return PseudometricDescriptor::coordinate(count(need(j, "index", where), where + ".index"));
  if (type == "weighted_max") {
    std::vector<std::pair<std::size_t, double>> terms;
    const auto& t = need(j, "terms", where);
    if (!t.is_array()) fail(where, "terms must be an array of [index, weight]");
    for (const auto& term : t) {
      if (!term.is_array() || term.size() != 2) fail(where, "terms must be an array of [index, weight]");
      terms.emplace_back(count(term[0], where + ".terms"), num(term[1], where + ".terms"));
    }
    return PseudometricDescriptor::weighted_max(std::move(terms));
  }
  if (type == "max_of") {
    std::vector<PseudometricDescriptor> members;
    const auto& m = need(j, "members", where);
    if (!m.is_array() || m.empty()) fail(where, "max_of needs a non-empty members array");
    for (std::size_t i = 0; i < m.size(); ++i) members.push_back(metric_from_json(m[i], where + ".members[" + std::to_string(i) + "]"));
    return directed_max(members);
  }
  if (type == "hausdorff") return PseudometricDescriptor::hausdorff_lift(metric_from_json(need(j, "base", where), where + ".base"));
  fail(where, "unknown metric type '" + type + "'");
}

inline Json metric_to_json(const PseudometricDescriptor& d) {
  return std::visit(
      [](const auto& k) -> Json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Euclidean>) {
          return Json{{"type", "euclidean"}};
        } else if constexpr (std::is_same_v<T, SupNorm>) {
          return Json{{"type", "sup"}};
        } else if constexpr (std::is_same_v<T, Coordinate>) {
          return Json{{"type", "coordinate"}, {"index", k.index}};
        } else if constexpr (std::is_same_v<T, WeightedMax>) {
          Json terms = Json::array();
          for (auto [i, w] : k.terms) terms.push_back(Json::array({i, w}));
          return Json{{"type", "weighted_max"}, {"terms", terms}};
        } else if constexpr (std::is_same_v<T, MaxOf>) {
          Json members = Json::array();
          for (const auto& m : k.members) members.push_back(metric_to_json(m));
          return Json{{"type", "max_of"}, {"members", members}};
        } else if constexpr (std::is_same_v<T, HausdorffLift>) {
          return Json{{"type", "hausdorff"}, {"base", metric_to_json(*k.base)}};
        } else {
          throw ConfigError("remetrized pseudometrics are built at run time and have no config form");
        }
      },
      d.kind());
}

inline Json map_to_json(const MapDescriptor& m, const std::string& name) {
  Json j = std::visit(
      [](const auto& k) -> Json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Affine>) {
          Json rows = Json::array();
          for (std::size_t r = 0; r < k.dim; ++r) rows.push_back(vec_json({k.matrix.data() + r * k.dim, k.dim}));
          return Json{{"type", "affine"}, {"matrix", rows}, {"offset", vec_json(k.offset)}};
        } else if constexpr (std::is_same_v<T, Clamp1D>) {
          return Json{{"type", "clamp1d"}, {"slope", k.slope}, {"shift", k.shift}, {"lo", k.lo}, {"hi", k.hi}};
        } else if constexpr (std::is_same_v<T, Builtin>) {
          return Json{{"type", "builtin"}, {"builtin", std::string(builtin_name(k.name))}, {"parameters", vec_json(k.parameters)}};
        } else {
          Json letters = Json::array();
          for (auto l : k.word.letters) letters.push_back(l);
          return Json{{"type", "word"}, {"letters", letters}};
        }
      },
      m.kind());
  if (!name.empty()) j["name"] = name;
  return j;
}

template <typename T>
void opt_set(const Json& o, const char* key, T& out, const std::string& where) {
  if (!o.contains(key) || o.at(key).is_null()) return;
  if constexpr (std::is_same_v<T, double>) {
    out = num(o.at(key), where + "." + key);
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    out = num(o.at(key), where + "." + key);
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    out = static_cast<std::uint64_t>(count(o.at(key), where + "." + key));
  } else {
    out = count(o.at(key), where + "." + key);
  }
}

}  // namespace config_detail

/// Parses and validates a configuration; every problem raises ConfigError.
inline RunConfig config_from_json(const Json& j) {
  using namespace config_detail;
  if (!j.is_object()) fail("config", "top level must be an object");
  RunConfig cfg;
  cfg.source = j;
  cfg.name = j.value("name", std::string("config"));
  try {
    const std::size_t dim = count(need(j, "dim", "config"), "dim");
    const auto& dom = need(j, "domain", "config");
    auto lo = vec(need(dom, "lo", "domain"), "domain.lo");
    auto hi = vec(need(dom, "hi", "domain"), "domain.hi");
    if (lo.size() != dim || hi.size() != dim) fail("domain", "lo and hi must have dim entries");
    for (std::size_t i = 0; i < dim; ++i)
      if (!(lo[i] <= hi[i])) fail("domain", "lo must not exceed hi");
    DomainBox box(Point(std::move(lo)), Point(std::move(hi)));

    const auto& maps = need(j, "maps", "config");
    if (!maps.is_array() || maps.empty()) fail("maps", "need a non-empty array");
    std::vector<MapDescriptor> base_maps;
    std::vector<std::string> base_names;
    std::vector<std::pair<std::size_t, Word>> words;  // position in the final list, word
    std::vector<std::string> names;
    std::vector<std::optional<MapDescriptor>> slots;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const std::string where = "maps[" + std::to_string(i) + "]";
      const auto& m = maps[i];
      const auto type = need(m, "type", where).get<std::string>();
      names.push_back(m.value("name", std::string()));
      if (type == "affine") {
        const auto& rows = need(m, "matrix", where);
        if (!rows.is_array()) fail(where, "matrix must be an array of rows");
        std::vector<std::vector<double>> r;
        for (const auto& row : rows) r.push_back(vec(row, where + ".matrix"));
        slots.emplace_back(MapDescriptor::affine(std::move(r), vec(need(m, "offset", where), where + ".offset")));
      } else if (type == "clamp1d") {
        slots.emplace_back(MapDescriptor::clamp1d(num(need(m, "slope", where), where + ".slope"),
                                                  num(need(m, "shift", where), where + ".shift"),
                                                  num(need(m, "lo", where), where + ".lo"), num(need(m, "hi", where), where + ".hi")));
      } else if (type == "builtin") {
        std::vector<double> params;
        if (m.contains("parameters")) params = vec(m.at("parameters"), where + ".parameters");
        slots.emplace_back(MapDescriptor::builtin(need(m, "builtin", where).get<std::string>(), std::move(params)));
      } else if (type == "word") {
        Word w;
        const auto& letters = need(m, "letters", where);
        if (!letters.is_array()) fail(where, "letters must be an array");
        for (const auto& l : letters) w.letters.push_back(count(l, where + ".letters"));
        words.emplace_back(i, std::move(w));
        slots.emplace_back(std::nullopt);
        continue;
      } else {
        fail(where, "unknown map type '" + type + "'");
      }
      base_maps.push_back(*slots.back());
      base_names.push_back(names.back());
    }
    if (!words.empty()) {
      if (base_maps.empty()) fail("maps", "word maps need at least one non-word map");
      bool named = false;
      for (const auto& n : base_names) named = named || !n.empty();
      auto base = std::make_shared<const IfsSystem>(dim, base_maps, box, false, named ? base_names : std::vector<std::string>{});
      for (auto& [pos, w] : words) slots[pos] = MapDescriptor::word(base, w);
    }
    std::vector<MapDescriptor> all;
    for (auto& s : slots) all.push_back(*s);
    bool named = false;
    for (auto& n : names) named = named || !n.empty();
    if (named)
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i].empty()) names[i] = "f" + std::to_string(i);
    cfg.system = std::make_shared<const IfsSystem>(dim, std::move(all), box, j.value("self_mapping", false),
                                                   named ? names : std::vector<std::string>{});

    if (j.contains("metrics")) {
      const auto& ms = j.at("metrics");
      if (!ms.is_array() || ms.empty()) fail("metrics", "need a non-empty array");
      for (std::size_t i = 0; i < ms.size(); ++i)
        cfg.multimetric.members.push_back(metric_from_json(ms[i], "metrics[" + std::to_string(i) + "]"));
    } else {
      cfg.multimetric.members.push_back(PseudometricDescriptor::euclidean());
    }
    for (const auto& d : cfg.multimetric.members)
      if (d.min_dim() > dim) fail("metrics", d.label() + " needs dimension " + std::to_string(d.min_dim()));
    cfg.multimetric.separates_points_declared = j.value("separates_points", false);

    if (j.contains("options")) {
      const auto& o = j.at("options");
      if (!o.is_object()) fail("options", "must be an object");
      auto& r = cfg.options;
      if (o.contains("seed_points")) {
        std::vector<std::vector<double>> pts;
        for (const auto& p : o.at("seed_points")) {
          pts.push_back(vec(p, "options.seed_points"));
          if (pts.back().size() != dim) fail("options.seed_points", "every point needs dim coordinates");
        }
        if (pts.empty()) fail("options.seed_points", "must not be empty");
        r.seed_points = std::move(pts);
      }
      opt_set(o, "seed_grid", r.seed_grid, "options");
      opt_set(o, "stop_metric", r.stop_metric, "options");
      opt_set(o, "tol", r.tol, "options");
      opt_set(o, "max_iter", r.max_iter, "options");
      opt_set(o, "dedup_tol", r.dedup_tol, "options");
      opt_set(o, "snap", r.snap, "options");
      opt_set(o, "max_points", r.max_points, "options");
      if (r.stop_metric >= cfg.multimetric.members.size()) fail("options.stop_metric", "index out of range");
      if (!(r.tol > 0.0)) fail("options.tol", "must be positive");
      if (o.contains("classify")) {
        const auto& c = o.at("classify");
        auto& k = r.classify;
        opt_set(c, "a_low", k.a_low, "options.classify");
        opt_set(c, "b_high", k.b_high, "options.classify");
        opt_set(c, "depth_max", k.depth_max, "options.classify");
        opt_set(c, "pair_budget", k.pair_budget, "options.classify");
        opt_set(c, "tol", k.tol, "options.classify");
        opt_set(c, "plateau_eps", k.plateau_eps, "options.classify");
        opt_set(c, "sample_per_axis", k.sample_per_axis, "options.classify");
        opt_set(c, "word_budget", k.word_budget, "options.classify");
      }
      if (o.contains("remetrize")) {
        const auto& c = o.at("remetrize");
        auto& k = r.remetrize;
        opt_set(c, "eps", k.eps, "options.remetrize");
        opt_set(c, "depth_cap", k.depth_cap, "options.remetrize");
        opt_set(c, "pairs", k.pairs, "options.remetrize");
        opt_set(c, "a_low", k.a_low, "options.remetrize");
        opt_set(c, "b_high", k.b_high, "options.remetrize");
        opt_set(c, "m", k.m, "options.remetrize");
        opt_set(c, "a", k.a, "options.remetrize");
        opt_set(c, "power_depth_cap", k.power_depth_cap, "options.remetrize");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

/// Serialises a system with its metrics and options. Word maps are written
/// relative to the non-word maps, which must then form their base system.
inline Json config_to_json(const std::string& name, const IfsSystem& sys, const Multimetric& mm, const RunOptions& opt) {
  using namespace config_detail;
  Json j;
  j["name"] = name;
  j["dim"] = sys.dim();
  j["domain"] = Json{{"lo", vec_json(sys.domain().lo().coords())}, {"hi", vec_json(sys.domain().hi().coords())}};
  j["self_mapping"] = sys.self_mapping_declared();
  Json maps = Json::array();
  for (std::size_t i = 0; i < sys.size(); ++i)
    maps.push_back(map_to_json(sys.map(i), sys.map_names().empty() ? std::string() : sys.map_name(i)));
  j["maps"] = maps;
  Json metrics = Json::array();
  for (const auto& d : mm.members) metrics.push_back(metric_to_json(d));
  j["metrics"] = metrics;
  j["separates_points"] = mm.separates_points_declared;

  Json o;
  if (opt.seed_points) {
    Json pts = Json::array();
    for (const auto& p : *opt.seed_points) pts.push_back(vec_json(p));
    o["seed_points"] = pts;
  }
  if (opt.seed_grid) o["seed_grid"] = opt.seed_grid;
  o["stop_metric"] = opt.stop_metric;
  o["tol"] = opt.tol;
  o["max_iter"] = opt.max_iter;
  if (opt.dedup_tol) o["dedup_tol"] = *opt.dedup_tol;
  if (opt.snap) o["snap"] = *opt.snap;
  if (opt.max_points) o["max_points"] = opt.max_points;
  Json c;
  if (opt.classify.a_low) c["a_low"] = *opt.classify.a_low;
  if (opt.classify.b_high) c["b_high"] = *opt.classify.b_high;
  c["depth_max"] = opt.classify.depth_max;
  c["pair_budget"] = opt.classify.pair_budget;
  c["tol"] = opt.classify.tol;
  c["plateau_eps"] = opt.classify.plateau_eps;
  c["sample_per_axis"] = opt.classify.sample_per_axis;
  c["word_budget"] = opt.classify.word_budget;
  o["classify"] = c;
  Json r;
  r["eps"] = opt.remetrize.eps;
  r["depth_cap"] = opt.remetrize.depth_cap;
  r["pairs"] = opt.remetrize.pairs;
  if (opt.remetrize.a_low) r["a_low"] = *opt.remetrize.a_low;
  if (opt.remetrize.b_high) r["b_high"] = *opt.remetrize.b_high;
  r["m"] = opt.remetrize.m;
  r["a"] = opt.remetrize.a;
  r["power_depth_cap"] = opt.remetrize.power_depth_cap;
  o["remetrize"] = r;
  j["options"] = o;
  return j;
}

/// Run options matching a corpus entry's pinned attractor and classify setup.
inline RunOptions corpus_run_options(const CorpusEntry& e) {
  RunOptions o;
  const Cloud& seed = e.attractor.seed;
  const auto per_axis = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(seed.size()), 1.0 / static_cast<double>(seed.dim()))));
  if (per_axis >= 2 && seed == Cloud(seed.dim(), e.system.domain().grid(per_axis), seed.dedup_tol())) {
    o.seed_grid = per_axis;
  } else {
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < seed.size(); ++i) pts.emplace_back(seed[i].begin(), seed[i].end());
    o.seed_points = std::move(pts);
  }
  o.stop_metric = e.attractor.stop_metric;
  o.tol = e.attractor.tol;
  o.max_iter = e.attractor.max_iter;
  o.dedup_tol = e.attractor.options.dedup_tol.value_or(e.attractor.seed.dedup_tol());
  o.snap = e.attractor.options.snap;
  o.max_points = e.attractor.options.max_points;
  o.classify = e.config;
  if (e.name == "swap_halve") {
    o.remetrize.m = 2;
    o.remetrize.a = 1.2;
  }
  if (e.name == "sierpinski") {
    o.remetrize.a_low = 0.01;
    o.remetrize.b_high = 3.0;
  }
  return o;
}

inline Json corpus_config_json(const CorpusEntry& e) {
  return config_to_json(e.name, e.system, e.multimetric, corpus_run_options(e));
}

}  // namespace hutchfrac
