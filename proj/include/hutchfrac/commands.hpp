#pragma once

// Command implementations behind the hutchfrac executable. Each returns the
// process exit code and writes only to the given streams and output paths.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "hutchfrac/classify.hpp"
#include "hutchfrac/config.hpp"
#include "hutchfrac/hutchinson.hpp"
#include "hutchfrac/output.hpp"
#include "hutchfrac/remetrize.hpp"
#include "hutchfrac/report.hpp"

namespace hutchfrac {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
  kExitNoConvergence = 3,
  kExitRemetrizeFailed = 4,
};

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

/// Clouds expected to outgrow this are iterated on a snapping grid.
inline constexpr std::size_t kAutoSnapPoints = std::size_t{1} << 21;

/// Grid resolution for snapped runs: max(tol/4, extent / 2^k) with 2^k the
/// largest power of two not above kAutoSnapPoints^(1/dim), so the grid has at
/// most about kAutoSnapPoints nodes.
inline double auto_snap_resolution(const DomainBox& box, double tol) {
  double extent = 0.0;
  for (std::size_t i = 0; i < box.dim(); ++i) extent = std::max(extent, box.extent(i));
  const double cells = std::pow(static_cast<double>(kAutoSnapPoints), 1.0 / static_cast<double>(box.dim()));
  return std::max(tol / 4.0, extent / std::exp2(std::floor(std::log2(cells))));
}

/// Predicted size of the plain iteration when it reaches tol, from the
/// analytic contraction factor; nullopt when no factor below 1 is known.
inline std::optional<double> predicted_points(const IfsSystem& ifs, const PseudometricDescriptor& d, std::size_t seed_size,
                                              double tol, std::size_t max_iter) {
  double lambda = 0.0;
  for (const auto& f : ifs.maps()) {
    const auto l = analytic_lipschitz(f, d, ifs.domain());
    if (!l) return std::nullopt;
    lambda = std::max(lambda, *l);
  }
  if (!(lambda < 1.0)) return std::nullopt;
  double diam = 0.0;
  const Cloud corners(ifs.dim(), ifs.domain().corners());
  diam = diameter(d, corners);
  double steps = static_cast<double>(max_iter);
  if (lambda > 0.0 && diam > tol) steps = std::min(steps, std::ceil(std::log(tol / diam) / std::log(lambda)) + 1.0);
  if (diam <= tol) steps = 1.0;
  return static_cast<double>(seed_size) * std::pow(static_cast<double>(ifs.size()), steps);
}

struct AttractorArgs {
  std::string config;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::string out_csv;
  std::string render_ppm;
  std::size_t width = 512;
  std::size_t height = 512;
};

struct AttractorRun {
  ConvergenceTrace trace;
  std::optional<double> snap;
  std::string csv;
  std::string ppm;  ///< empty unless a raster was requested
};

/// Runs the deterministic iteration for a loaded config. Unless the config
/// fixes a snap, a run predicted (or observed) to outgrow kAutoSnapPoints is
/// done on the auto_snap_resolution grid instead.
inline AttractorRun run_attractor(const RunConfig& cfg, double tol, std::size_t max_iter, bool raster, std::size_t width,
                                  std::size_t height) {
  const auto& ifs = *cfg.system;
  const auto& stop = cfg.multimetric.members.at(cfg.options.stop_metric);
  const Cloud seed = cfg.seed_cloud();
  AttractorOptions opt{cfg.options.dedup_tol, cfg.options.snap, cfg.options.max_points};
  AttractorRun run;
  if (!opt.snap && opt.max_points == 0) {
    const auto predicted = predicted_points(ifs, stop, seed.size(), tol, max_iter);
    if (predicted && *predicted > static_cast<double>(kAutoSnapPoints)) {
      opt.snap = auto_snap_resolution(ifs.domain(), tol);
    } else {
      opt.max_points = kAutoSnapPoints;
      run.trace = attractor_deterministic(ifs, seed, stop, tol, max_iter, opt);
      if (run.trace.stopped_by_size) {
        opt.snap = auto_snap_resolution(ifs.domain(), tol);
        opt.max_points = 0;
      }
    }
  }
  if (opt.snap || run.trace.iterations == 0) run.trace = attractor_deterministic(ifs, seed, stop, tol, max_iter, opt);
  run.snap = opt.snap;
  run.csv = cloud_csv(run.trace.final_cloud);
  if (raster) run.ppm = render_ppm(run.trace.final_cloud, ifs.domain(), width, height);
  return run;
}

inline int cmd_attractor(const AttractorArgs& a, Streams io = {}) {
  RunConfig cfg;
  try {
    cfg = load_config(a.config);
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const double tol = a.tol.value_or(cfg.options.tol);
  const std::size_t max_iter = a.max_iter.value_or(cfg.options.max_iter);
  if (!(tol > 0.0) || a.width == 0 || a.height == 0) {
    io.err << "config error: tol, width and height must be positive\n";
    return kExitConfigError;
  }
  AttractorRun run;
  try {
    run = run_attractor(cfg, tol, max_iter, !a.render_ppm.empty(), a.width, a.height);
    if (!a.out_csv.empty()) write_file(a.out_csv, run.csv);
    if (!a.render_ppm.empty()) write_file(a.render_ppm, run.ppm);
  } catch (const DomainEscape& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  Json line = trace_json(run.trace);
  line["tol"] = tol;
  line["snap"] = run.snap ? Json(*run.snap) : Json(nullptr);
  io.out << line.dump() << "\n";
  return run.trace.converged ? kExitOk : kExitNoConvergence;
}

struct ClassifyArgs {
  std::string config;
  std::string report_json;
  std::optional<std::uint64_t> seed;
};

inline int cmd_classify(const ClassifyArgs& a, Streams io = {}) {
  RunConfig cfg;
  try {
    cfg = load_config(a.config);
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  ClassifyConfig cc = cfg.options.classify;
  if (a.seed) cc.seed = *a.seed;
  ContractivityReport rep;
  try {
    rep = classify(*cfg.system, cfg.multimetric, cc);
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const Json j = report_json(*cfg.system, rep);
  if (!a.report_json.empty()) write_file(a.report_json, dump_json(j));
  for (const auto& m : rep.metrics) {
    io.out << m.metric.label() << ":";
    for (auto c : kConditions) io.out << " " << condition_name(c) << "=" << verdict_name(m[c].verdict);
    io.out << "\n";
  }
  return kExitOk;
}

enum class RemetrizeCheck { Edelstein, Krasnoselskii, BanachPower };

inline RemetrizeCheck remetrize_check_from_name(std::string_view s) {
  if (s == "edelstein") return RemetrizeCheck::Edelstein;
  if (s == "krasnoselskii") return RemetrizeCheck::Krasnoselskii;
  if (s == "banach-power") return RemetrizeCheck::BanachPower;
  throw ConfigError("unknown verification '" + std::string(s) + "'");
}

struct RemetrizeArgs {
  std::string config;
  std::optional<double> eps;
  std::optional<std::size_t> pairs;
  std::string verify = "edelstein";
  std::string report_json;
  std::optional<std::size_t> depth_cap;
  std::optional<std::size_t> m;
  std::optional<double> a;
  std::optional<double> a_low, b_high;
  std::uint64_t seed = 0;
  std::size_t metric = 0;
};

inline int cmd_remetrize(const RemetrizeArgs& args, Streams io = {}) {
  RunConfig cfg;
  RemetrizeCheck check{};
  try {
    cfg = load_config(args.config);
    check = remetrize_check_from_name(args.verify);
    if (args.metric >= cfg.multimetric.members.size()) throw ConfigError("metric index out of range");
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const auto& ifs = *cfg.system;
  const auto& base = cfg.multimetric.members[args.metric];
  const auto& ro = cfg.options.remetrize;
  const std::size_t pairs = args.pairs.value_or(ro.pairs);
  Json rep;
  rep["system"] = cfg.name;
  rep["base"] = base.label();
  rep["verify"] = args.verify;
  rep["pairs"] = pairs;
  rep["seed"] = args.seed;
  bool ok = true;
  try {
    if (check == RemetrizeCheck::BanachPower) {
      const std::size_t m = args.m.value_or(ro.m);
      const double a = args.a.value_or(ro.a);
      auto bp = build_banach_power(ifs, base, m, a, args.depth_cap.value_or(ro.power_depth_cap));
      const auto res = verify_banach_under(*bp, ifs, pairs, args.seed);
      rep["m"] = m;
      rep["a"] = a;
      rep["lambda"] = bp->lambda();
      rep["depth"] = bp->depth();
      rep["tail_bound"] = bp->relative_tail();
      rep["checked"] = res.checked;
      rep["max_ratio"] = res.max_ratio;
      rep["ratio_bound"] = 1.0 / a;
      rep["violations"] = res.violations.size();
      Json v = Json::array();
      for (const auto& x : res.violations) v.push_back(violation_json(x));
      rep["violation_witnesses"] = v;
      ok = res.violations.empty();
    } else {
      const double eps = args.eps.value_or(ro.eps);
      const Cloud k(ifs.dim(), ifs.domain().corners());
      auto rm = build_remetrized(ifs, base, AlphaSequence::standard(), k, eps, args.depth_cap.value_or(ro.depth_cap));
      rep["alphas"] = rm->alphas().name;
      rep["eps"] = eps;
      rep["depth"] = rm->depth();
      rep["tail_bound"] = rm->tail_bound();
      if (check == RemetrizeCheck::Edelstein) {
        const auto res = verify_edelstein_under(*rm, ifs, pairs, args.seed);
        rep["threshold"] = res.threshold;
        rep["checked"] = res.checked;
        rep["skipped"] = res.skipped;
        rep["max_ratio"] = res.max_ratio;
        rep["violations"] = res.violations.size();
        Json v = Json::array();
        for (const auto& x : res.violations) v.push_back(violation_json(x));
        rep["violation_witnesses"] = v;
        ok = res.violations.empty();
      } else {
        const double diam = diameter(base, k);
        const double lo = args.a_low.value_or(ro.a_low.value_or(0.01 * diam));
        const double hi = args.b_high.value_or(ro.b_high.value_or(2.0 * diam + eps));
        const auto res = verify_krasnoselskii_under(*rm, ifs, lo, hi, pairs, args.seed);
        rep["a_low"] = lo;
        rep["b_high"] = hi;
        rep["checked"] = res.checked;
        rep["skipped"] = res.skipped;
        rep["sup_ratio"] = res.sup_ratio;
        rep["lambda_bound"] = res.lambda_bound;
        ok = res.passed();
      }
    }
  } catch (const RemetrizeError& e) {
    io.err << "remetrization failed: " << e.what() << "\n";
    rep["error"] = e.what();
    if (e.offending_word()) rep["offending_word"] = word_json(ifs, *e.offending_word());
    if (!args.report_json.empty()) write_file(args.report_json, dump_json(rep));
    io.out << rep.dump() << "\n";
    return kExitRemetrizeFailed;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  rep["passed"] = ok;
  if (!args.report_json.empty()) write_file(args.report_json, dump_json(rep));
  Json line = rep;
  line.erase("violation_witnesses");
  io.out << line.dump() << "\n";
  return ok ? kExitOk : kExitVerificationFailed;
}

struct ChaosArgs {
  std::string config;
  std::size_t iterations = 100000;
  std::size_t burn_in = 100;
  std::uint64_t seed = 0;
  std::string out_csv;
  std::string render_ppm;
  std::size_t width = 512;
  std::size_t height = 512;
};

inline int cmd_chaos(const ChaosArgs& a, Streams io = {}) {
  RunConfig cfg;
  try {
    cfg = load_config(a.config);
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    const Cloud start = cfg.seed_cloud();
    const Cloud c = chaos_game(*cfg.system, start.point(0), a.iterations, a.burn_in, a.seed);
    if (!a.out_csv.empty()) write_file(a.out_csv, cloud_csv(c));
    if (!a.render_ppm.empty()) write_file(a.render_ppm, render_ppm(c, cfg.system->domain(), a.width, a.height));
    io.out << Json{{"points", c.size()}, {"iterations", a.iterations}, {"burn_in", a.burn_in}, {"seed", a.seed}}.dump()
           << "\n";
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

/// Writes a corpus entry as a config file (or to the output stream).
inline int cmd_export(const std::string& entry, const std::string& out_path, Streams io = {}) {
  try {
    const std::string text = dump_json(corpus_config_json(load_example(entry)));
    if (out_path.empty()) {
      io.out << text;
    } else {
      write_file(out_path, text);
    }
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

}  // namespace hutchfrac
