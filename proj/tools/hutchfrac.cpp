#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hutchfrac/hutchfrac.hpp"

namespace {

// CLI11 has no optional<T> binding that leaves "unset" distinguishable from a
// default, so unset flags are read back through count().
template <typename T>
std::optional<T> if_given(const CLI::Option* opt, const T& value) {
  return opt->count() ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hutchfrac;
  CLI::App app{"hutchfrac: attractors, contraction classes and remetrizations of iterated function systems"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string threads = "auto";
  app.add_option("--seed", seed, "RNG seed for every sampled computation")->capture_default_str();
  app.add_option("--threads", threads, "worker threads, or 'auto' (HUTCHFRAC_THREADS wins)")->capture_default_str();

  AttractorArgs att;
  double att_tol = 0.0;
  std::size_t att_iter = 0;
  auto* c_att = app.add_subcommand("attractor", "iterate the Hutchinson operator from the config's seed cloud");
  c_att->add_option("config", att.config, "config JSON")->required();
  auto* o_tol = c_att->add_option("--tol", att_tol, "stop when successive iterates are this close (Hausdorff)");
  auto* o_iter = c_att->add_option("--max-iter", att_iter, "iteration cap");
  c_att->add_option("--out-csv", att.out_csv, "write the final cloud as CSV");
  c_att->add_option("--render-ppm", att.render_ppm, "write a binary PPM raster");
  c_att->add_option("--width", att.width)->capture_default_str();
  c_att->add_option("--height", att.height)->capture_default_str();

  ClassifyArgs cls;
  auto* c_cls = app.add_subcommand("classify", "verdicts for the six contraction conditions per pseudometric");
  c_cls->add_option("config", cls.config, "config JSON")->required();
  c_cls->add_option("--report-json", cls.report_json, "write the report here");

  RemetrizeArgs rem;
  double rem_eps = 0.0, rem_a = 0.0, rem_lo = 0.0, rem_hi = 0.0;
  std::size_t rem_pairs = 0, rem_cap = 0, rem_m = 0;
  auto* c_rem = app.add_subcommand("remetrize", "build a remetrized pseudometric and audit it");
  c_rem->add_option("config", rem.config, "config JSON")->required();
  auto* o_eps = c_rem->add_option("--eps", rem_eps, "tail bound to certify");
  auto* o_pairs = c_rem->add_option("--pairs", rem_pairs, "sampled pairs");
  c_rem->add_option("--verify", rem.verify, "edelstein | krasnoselskii | banach-power")
      ->check(CLI::IsMember({"edelstein", "krasnoselskii", "banach-power"}))
      ->capture_default_str();
  c_rem->add_option("--report-json", rem.report_json, "write the report here");
  auto* o_cap = c_rem->add_option("--depth-cap", rem_cap, "largest truncation depth");
  auto* o_m = c_rem->add_option("--m", rem_m, "banach-power: power of the system that is Banach");
  auto* o_a = c_rem->add_option("--a", rem_a, "banach-power: weight base, needs a^m lambda < 1");
  auto* o_lo = c_rem->add_option("--a-low", rem_lo, "krasnoselskii window lower end");
  auto* o_hi = c_rem->add_option("--b-high", rem_hi, "krasnoselskii window upper end");
  c_rem->add_option("--metric", rem.metric, "index of the base pseudometric")->capture_default_str();

  std::string suite = "all";
  auto* c_ver = app.add_subcommand("verify", "run property suites over the built-in corpus");
  c_ver->add_option("--suite", suite)->check(CLI::IsMember({"axioms", "chain", "paper-examples", "all"}))->capture_default_str();

  ChaosArgs chs;
  auto* c_chs = app.add_subcommand("chaos", "random-orbit rendering");
  c_chs->add_option("config", chs.config, "config JSON")->required();
  c_chs->add_option("--iterations", chs.iterations)->capture_default_str();
  c_chs->add_option("--burn-in", chs.burn_in)->capture_default_str();
  c_chs->add_option("--out-csv", chs.out_csv);
  c_chs->add_option("--render-ppm", chs.render_ppm);
  c_chs->add_option("--width", chs.width)->capture_default_str();
  c_chs->add_option("--height", chs.height)->capture_default_str();

  std::string entry, out;
  auto* c_exp = app.add_subcommand("export", "write a built-in corpus entry as a config file");
  c_exp->add_option("entry", entry)->required()->check(CLI::IsMember(corpus::names()));
  c_exp->add_option("--out", out, "output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (threads != "auto") {
    try {
      const long n = std::stol(threads);
      if (n <= 0) throw std::invalid_argument("threads");
      parallel::set_threads(static_cast<unsigned>(n));
    } catch (const std::exception&) {
      std::cerr << "config error: --threads must be a positive integer or 'auto'\n";
      return kExitConfigError;
    }
  }

  try {
    if (*c_att) {
      att.tol = if_given(o_tol, att_tol);
      att.max_iter = if_given(o_iter, att_iter);
      return cmd_attractor(att);
    }
    if (*c_cls) {
      cls.seed = seed;
      return cmd_classify(cls);
    }
    if (*c_rem) {
      rem.eps = if_given(o_eps, rem_eps);
      rem.pairs = if_given(o_pairs, rem_pairs);
      rem.depth_cap = if_given(o_cap, rem_cap);
      rem.m = if_given(o_m, rem_m);
      rem.a = if_given(o_a, rem_a);
      rem.a_low = if_given(o_lo, rem_lo);
      rem.b_high = if_given(o_hi, rem_hi);
      rem.seed = seed;
      return cmd_remetrize(rem);
    }
    if (*c_ver) return cmd_verify(suite);
    if (*c_chs) {
      chs.seed = seed;
      return cmd_chaos(chs);
    }
    if (*c_exp) return cmd_export(entry, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
