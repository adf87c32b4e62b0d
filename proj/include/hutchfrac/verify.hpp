#pragma once

// Property suites run by `hutchfrac verify` and the acceptance binary.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hutchfrac/axioms.hpp"
#include "hutchfrac/classify.hpp"
#include "hutchfrac/commands.hpp"
#include "hutchfrac/corpus.hpp"
#include "hutchfrac/hausdorff.hpp"
#include "hutchfrac/hutchinson.hpp"
#include "hutchfrac/remetrize.hpp"

namespace hutchfrac {

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace verify_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// residual_n <= rate^n * residual_0 * slack for n <= last.
inline bool geometric_residuals(const std::vector<double>& r, double rate, double slack, std::size_t last, std::string& why) {
  if (r.empty()) {
    why = "no residuals";
    return false;
  }
  for (std::size_t n = 0; n < r.size() && n <= last; ++n) {
    const double bound = std::pow(rate, static_cast<double>(n)) * r[0] * slack;
    if (r[n] > bound) {
      why = "residual_" + std::to_string(n) + "=" + fmt(r[n]) + " > " + fmt(bound);
      return false;
    }
  }
  return true;
}

inline ConvergenceTrace corpus_attractor(const CorpusEntry& e) {
  const auto& s = e.attractor;
  return attractor_deterministic(e.system, s.seed, e.multimetric.members.at(s.stop_metric), s.tol, s.max_iter, s.options);
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Acceptance criteria

inline CheckLine criterion_banach_convergence() {
  using namespace verify_detail;
  CheckLine c{"1 banach attractor convergence", true, ""};
  struct Case {
    const char* name;
    double rate;
    std::size_t last;
  };
  for (const Case k : {Case{"cantor", 1.0 / 3.0, 20}, Case{"sierpinski", 0.5, 20}}) {
    const auto e = load_example(k.name);
    const auto t0 = std::chrono::steady_clock::now();
    const auto trace = corpus_attractor(e);
    const double secs = seconds_since(t0);
    std::string why;
    const bool rates = geometric_residuals(trace.residuals, k.rate, 1.01, k.last, why);
    const bool ok = rates && trace.converged && secs < 30.0 && trace.residuals.size() > std::min<std::size_t>(k.last, 8);
    c.passed = c.passed && ok;
    c.detail += std::string(c.detail.empty() ? "" : "; ") + k.name + ": " + std::to_string(trace.residuals.size()) +
                " steps, last residual " + fmt(trace.residuals.back()) + ", " + fmt(secs) + " s" + (rates ? "" : ", " + why) +
                (trace.converged ? "" : ", not converged");
  }
  return c;
}

inline CheckLine criterion_invariance() {
  using namespace verify_detail;
  CheckLine c{"2 attractor invariance d_H(F(A), A) <= 2 tol", true, ""};
  for (const auto& e : load_all_examples()) {
    if (!e.banach_attractor) continue;
    const auto trace = corpus_attractor(e);
    const Cloud& a = trace.final_cloud;
    const Cloud fa = hutchinson_step(e.system, a, e.attractor.options.dedup_tol, e.attractor.options.snap);
    const double dh = hausdorff(e.multimetric.members.at(e.attractor.stop_metric), fa, a);
    const bool ok = trace.converged && dh <= 2.0 * e.attractor.tol;
    c.passed = c.passed && ok;
    c.detail += std::string(c.detail.empty() ? "" : "; ") + e.name + " " + fmt(dh) + (ok ? "" : " FAIL");
  }
  return c;
}

inline CheckLine criterion_fg_counterexample() {
  CheckLine c{"3 fg_interval: pair not eventually contracting, singletons are", true, ""};
  const auto e = load_example("fg_interval");
  const auto rep = classify(e.system, e.multimetric, e.config);
  auto mism = compare_expected(rep, e.expected, "{f,g}");
  const auto& ev = rep.metrics.at(0)[Condition::Eventual];
  bool witness_ok = false;
  if (ev.witness) {
    const auto& w = *ev.witness;
    bool alternating = !w.word.empty() && w.word.size() % 2 == 0;
    for (std::size_t i = 0; i < w.word.size(); ++i) alternating = alternating && w.word.letters[i] == i % 2;
    const bool pair = (w.x == Point(std::vector<double>{0.0}) && w.y == Point(std::vector<double>{2.0}) &&
                       w.fx == Point(std::vector<double>{0.0}) && w.fy == Point(std::vector<double>{1.0})) ||
                      (w.x == Point(std::vector<double>{2.0}) && w.y == Point(std::vector<double>{0.0}) &&
                       w.fx == Point(std::vector<double>{1.0}) && w.fy == Point(std::vector<double>{0.0}));
    witness_ok = alternating && pair && std::abs(w.fx[0] - w.fy[0]) == 1.0;
    c.detail = "witness word " + w.word.to_string() + " maps (" + std::to_string(w.x[0]) + "," + std::to_string(w.y[0]) +
               ") to (" + std::to_string(w.fx[0]) + "," + std::to_string(w.fy[0]) + ")";
  } else {
    c.detail = "no eventual witness";
  }
  for (const auto& sub : e.subsystems) {
    const auto sys = e.system.subsystem(sub.indices);
    const auto srep = classify(sys, e.multimetric, e.config);
    auto more = compare_expected(srep, sub.expected, "{" + sys.map_name(0) + "}");
    mism.insert(mism.end(), more.begin(), more.end());
  }
  for (const auto& m : mism)
    c.detail += "; " + m.where + " " + condition_name(m.condition) + " expected " + verdict_name(m.expected) + " got " +
                verdict_name(m.actual);
  c.passed = mism.empty() && witness_ok;
  return c;
}

inline CheckLine criterion_edelstein_exp() {
  using namespace verify_detail;
  CheckLine c{"4 edelstein_exp: Edelstein on every box, orbits escape", true, ""};
  const auto euclid = Multimetric{{PseudometricDescriptor::euclidean()}, true};
  for (double b : {10.0, 20.0, 40.0}) {
    const auto rep = classify(corpus::edelstein_exp_system(b), euclid);
    const bool ok = rep.metrics[0][Condition::Edelstein].verdict == Verdict::Verified;
    c.passed = c.passed && ok;
    c.detail += "[0," + fmt(b) + "] edelstein=" + verdict_name(rep.metrics[0][Condition::Edelstein].verdict) + "; ";
  }
  const double x1k = oracle::edelstein_orbit(0.0, 1000), x1m = oracle::edelstein_orbit(0.0, 1000000);
  const bool orbit = x1k >= 6.5 && x1k <= 7.5 && x1m > 13.0;
  // The deterministic iteration on the widest box keeps moving: residuals ~ e^-x_n ~ 1/n.
  const auto sys = corpus::edelstein_exp_system(40.0);
  const auto trace = attractor_deterministic(sys, Cloud(1, {0.0}), PseudometricDescriptor::euclidean(), 1e-6, 1000);
  c.passed = c.passed && orbit && !trace.converged;
  c.detail += "f^1000(0)=" + fmt(x1k) + ", f^1e6(0)=" + fmt(x1m) + ", 1000 Hutchinson steps " +
              (trace.converged ? "converged" : "did not converge") + " (last residual " + fmt(trace.residuals.back()) + ")";
  return c;
}

inline CheckLine criterion_remetrize() {
  using namespace verify_detail;
  CheckLine c{"5 sierpinski remetrization contract", true, ""};
  const auto t0 = std::chrono::steady_clock::now();
  const auto e = load_example("sierpinski");
  const auto& base = e.multimetric.members[0];
  const Cloud k(2, e.system.domain().corners());
  const auto rm = build_remetrized(e.system, base, AlphaSequence::standard(), k, 1e-3, 30);
  const double diam = diameter(base, k);
  bool bounds = true;
  std::size_t bad = 0;
  for (const auto& [x, y] : detail::sample_box_pairs(e.system.domain(), 500, 0)) {
    const auto v = rhat_eval(*rm, x, y);
    if (!(base(x, y) <= v.value && v.value <= 2.0 * diam + 1e-3)) {
      bounds = false;
      ++bad;
    }
  }
  const auto ed = verify_edelstein_under(*rm, e.system, 500, 0);
  const auto kr = verify_krasnoselskii_under(*rm, e.system, 0.01, 3.0, 500, 0);
  const double secs = seconds_since(t0);
  c.passed = rm->depth() == 12 && bounds && ed.violations.empty() && kr.passed() && secs < 120.0;
  c.detail = "N=" + std::to_string(rm->depth()) + ", tail=" + fmt(rm->tail_bound()) + ", bound failures " +
             std::to_string(bad) + ", edelstein violations " + std::to_string(ed.violations.size()) + " over " +
             std::to_string(ed.checked) + " pairs, krasnoselskii sup_ratio " + fmt(kr.sup_ratio) + " over " +
             std::to_string(kr.checked) + " pairs, " + fmt(secs) + " s";
  return c;
}

inline CheckLine criterion_banach_power() {
  using namespace verify_detail;
  CheckLine c{"6 swap_halve banach-power contract", true, ""};
  const auto e = load_example("swap_halve");
  const auto& base = e.multimetric.members[0];
  const auto bp = build_banach_power(e.system, base, 2, 1.2, 400);
  const auto good = verify_banach_under(*bp, e.system, 500, 0);
  const auto bad_metric = build_banach_power_unchecked(e.system, base, 2, 0.5, 1.5, 16);
  const auto bad = verify_banach_under(*bad_metric, e.system, 500, 0);
  c.passed = bp->lambda() == 0.5 && good.max_ratio <= 1.0 / 1.2 + 1e-6 && good.violations.empty() && !bad.violations.empty();
  c.detail = "lambda=" + fmt(bp->lambda()) + ", depth " + std::to_string(bp->depth()) + ", max ratio " + fmt(good.max_ratio) +
             " (bound " + fmt(1.0 / 1.2 + 1e-6) + "); a=1.5 control: " + std::to_string(bad.violations.size()) +
             " violations";
  return c;
}

inline CheckLine criterion_hausdorff_fixture() {
  using namespace verify_detail;
  CheckLine c{"7 coordinate Hausdorff lifts miss square vs diagonal", true, ""};
  const double h = 0.01;
  const DomainBox unit = DomainBox::cube(2, 0.0, 1.0);
  const Cloud square(2, unit.grid(101));
  std::vector<double> diag;
  for (std::size_t i = 0; i <= 100; ++i) {
    const double t = std::min(1.0, static_cast<double>(i) * h);
    diag.push_back(t);
    diag.push_back(t);
  }
  const Cloud diagonal(2, diag);
  const double d1 = hausdorff(PseudometricDescriptor::coordinate(0), square, diagonal);
  const double d2 = hausdorff(PseudometricDescriptor::coordinate(1), square, diagonal);
  const double de = hausdorff(PseudometricDescriptor::euclidean(), square, diagonal);
  c.passed = d1 <= h && d2 <= h && de >= 0.70 && de <= 0.7072;
  c.detail = "d1_H=" + fmt(d1) + ", d2_H=" + fmt(d2) + ", euclidean d_H=" + fmt(de);
  return c;
}

/// Every corpus report (and subsystem report) is consistent with the chain.
inline std::vector<CheckLine> chain_checks() {
  std::vector<CheckLine> out;
  for (const auto& e : load_all_examples()) {
    const auto rep = classify(e.system, e.multimetric, e.config);
    auto mism = compare_expected(rep, e.expected, e.name);
    CheckLine line{"chain " + e.name, chain_consistent(rep) && mism.empty(), ""};
    for (const auto& m : rep.metrics) {
      line.detail += (line.detail.empty() ? "" : " | ") + m.metric.label() + ":";
      for (auto cnd : kConditions) line.detail += std::string(" ") + verdict_name(m[cnd].verdict)[0];
    }
    for (const auto& m : mism)
      line.detail += std::string("; expected ") + condition_name(m.condition) + "=" + verdict_name(m.expected);
    out.push_back(line);
    for (const auto& sub : e.subsystems) {
      const auto srep = classify(e.system.subsystem(sub.indices), e.multimetric, e.config);
      auto smism = compare_expected(srep, sub.expected, e.name);
      std::string idx;
      for (auto i : sub.indices) idx += (idx.empty() ? "" : ",") + e.system.map_name(i);
      out.push_back({"chain " + e.name + " {" + idx + "}", chain_consistent(srep) && smism.empty(), ""});
    }
  }
  return out;
}

inline CheckLine criterion_chain() {
  CheckLine c{"8 implication chain holds on every corpus report", true, ""};
  std::size_t n = 0;
  for (const auto& line : chain_checks()) {
    ++n;
    if (!line.passed) {
      c.passed = false;
      c.detail += line.name + " failed; ";
    }
  }
  c.detail += std::to_string(n) + " reports";
  return c;
}

inline CheckLine criterion_coding_map() {
  using namespace verify_detail;
  CheckLine c{"9 cantor coding map vs depth-40 words", true, ""};
  const auto ifs = corpus::cantor_system();
  const Point x0(std::vector<double>{0.5});
  const double tol = std::pow(3.0, -38.0);
  Rng rng(0);
  double worst = 0.0, worst_ulps = 0.0;
  std::size_t over = 0;
  for (int s = 0; s < 64; ++s) {
    SymbolStream st;
    const std::size_t pre = rng.index(6), per = 1 + rng.index(4);
    for (std::size_t i = 0; i < pre; ++i) st.preperiod.letters.push_back(rng.index(2));
    for (std::size_t i = 0; i < per; ++i) st.period.letters.push_back(rng.index(2));
    const auto res = coding_map(ifs, st, x0, std::pow(3.0, -39.0), 200);
    const Point ref = eval_word(ifs, st.prefix(40), x0);
    const double gap = std::abs(res.point[0] - ref[0]);
    worst = std::max(worst, gap);
    if (gap > tol) {
      ++over;
      worst_ulps = std::max(worst_ulps, gap / (std::nextafter(ref[0], 2.0) - ref[0]));
    }
  }
  double fixed = 0.0;
  for (std::size_t letter : {0u, 1u}) {
    const auto res = coding_map(ifs, SymbolStream{{}, Word{{letter}}}, x0, 1e-15, 200);
    fixed = std::max(fixed, std::abs(res.point[0] - (letter == 0 ? 0.0 : 1.0)));
  }
  c.passed = worst <= tol && fixed <= 1e-12;
  c.detail = "max |coding - word40| = " + fmt(worst) + " (bound " + fmt(tol) + "), " + std::to_string(over) +
             "/64 streams over the bound";
  if (over) c.detail += " by at most " + fmt(worst_ulps) + " ulp";
  c.detail += ", fixed point error " + fmt(fixed);
  return c;
}

inline CheckLine criterion_determinism() {
  CheckLine c{"10 deterministic attractor and chaos outputs", true, ""};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("hutchfrac_det_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cfg = (dir / "sierpinski.json").string();
  write_file(cfg, dump_json(corpus_config_json(load_example("sierpinski"))));
  std::ostringstream sink;
  std::vector<std::string> outs;
  const std::size_t saved = parallel::threads();
  for (std::size_t threads : {1u, 4u, 1u}) {
    parallel::set_threads(threads);
    const std::string tag = std::to_string(outs.size());
    AttractorArgs a;
    a.config = cfg;
    a.tol = 1e-5;
    a.out_csv = (dir / ("a" + tag + ".csv")).string();
    a.render_ppm = (dir / ("a" + tag + ".ppm")).string();
    const int code = cmd_attractor(a, {sink, sink});
    ChaosArgs ch;
    ch.config = cfg;
    ch.seed = 7;
    ch.out_csv = (dir / ("c" + tag + ".csv")).string();
    ch.render_ppm = (dir / ("c" + tag + ".ppm")).string();
    const int code2 = cmd_chaos(ch, {sink, sink});
    c.passed = c.passed && code == 0 && code2 == 0;
    outs.push_back(read_file(a.out_csv) + read_file(a.render_ppm) + read_file(ch.out_csv) + read_file(ch.render_ppm));
  }
  parallel::set_threads(saved);
  const auto direct = cloud_csv(chaos_game(corpus::sierpinski_system(), Point(std::vector<double>{0.0, 0.0}), 50000, 10, 3));
  const auto again = cloud_csv(chaos_game(corpus::sierpinski_system(), Point(std::vector<double>{0.0, 0.0}), 50000, 10, 3));
  c.passed = c.passed && outs[0] == outs[1] && outs[1] == outs[2] && direct == again;
  c.detail = std::to_string(outs[0].size()) + " bytes per run, 3 runs (threads 1, 4, 1)";
  fs::remove_all(dir);
  return c;
}

inline std::vector<std::function<CheckLine()>> acceptance_criteria() {
  return {criterion_banach_convergence, criterion_invariance,       criterion_fg_counterexample, criterion_edelstein_exp,
          criterion_remetrize,          criterion_banach_power,     criterion_hausdorff_fixture, criterion_chain,
          criterion_coding_map,         criterion_determinism};
}

// ---------------------------------------------------------------------------
// Suites

inline std::vector<CheckLine> axiom_checks() {
  std::vector<CheckLine> out;
  auto record = [&](const std::string& name, const AxiomReport& r) {
    out.push_back({"axioms " + name, r.ok(),
                   std::to_string(r.triples_checked) + " triples, " + std::to_string(r.symmetry_violations.size()) + "/" +
                       std::to_string(r.triangle_violations.size()) + "/" + std::to_string(r.diagonal_violations.size()) +
                       " symmetry/triangle/diagonal violations"});
  };
  for (const auto& e : load_all_examples()) {
    const Cloud sample = classification_sample(e.system.domain(), default_sample_per_axis(e.system.dim()));
    for (const auto& d : e.multimetric.members) record(e.name + " " + d.label(), check_axioms(d, sample, 0));
  }
  {
    const auto e = load_example("sierpinski");
    const Cloud k(2, e.system.domain().corners());
    auto rm = build_remetrized(e.system, e.multimetric.members[0], AlphaSequence::standard(), k, 1e-2, 30);
    record("sierpinski " + rm->label(), check_axioms(as_descriptor(rm), classification_sample(e.system.domain(), 6), 0, 1e-12));
  }
  {
    const auto e = load_example("swap_halve");
    auto bp = build_banach_power(e.system, e.multimetric.members[0], 2, 1.2, 400);
    record("swap_halve " + bp->label(), check_axioms(as_descriptor(bp), classification_sample(e.system.domain(), 7), 0, 1e-12));
  }
  return out;
}

inline std::vector<CheckLine> acceptance_checks() {
  std::vector<CheckLine> out;
  for (const auto& run : acceptance_criteria()) {
    try {
      out.push_back(run());
    } catch (const std::exception& e) {
      out.push_back({"criterion", false, std::string("exception: ") + e.what()});
    }
  }
  return out;
}

inline void print_check(std::ostream& os, const CheckLine& c) {
  os << (c.passed ? "PASS " : "FAIL ") << c.name;
  if (!c.detail.empty()) os << " -- " << c.detail;
  os << "\n";
}

/// Runs axioms, chain, paper-examples or all; exit 0 iff every check passes.
inline int cmd_verify(const std::string& suite, Streams io = {}) {
  std::vector<std::function<std::vector<CheckLine>()>> runs;
  if (suite == "axioms" || suite == "all") runs.emplace_back(axiom_checks);
  if (suite == "chain" || suite == "all") runs.emplace_back(chain_checks);
  if (suite == "paper-examples" || suite == "all") runs.emplace_back(acceptance_checks);
  if (runs.empty()) {
    io.err << "config error: unknown suite '" << suite << "'\n";
    return kExitConfigError;
  }
  bool ok = true;
  std::size_t n = 0;
  for (const auto& run : runs) {
    std::vector<CheckLine> lines;
    try {
      lines = run();
    } catch (const std::exception& e) {
      lines.push_back({"suite", false, std::string("exception: ") + e.what()});
    }
    for (const auto& line : lines) {
      print_check(io.out, line);
      io.out.flush();
      ok = ok && line.passed;
      ++n;
    }
  }
  io.out << (ok ? "all " : "some of ") << n << " checks " << (ok ? "passed" : "failed") << "\n";
  return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace hutchfrac
