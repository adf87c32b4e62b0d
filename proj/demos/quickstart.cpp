// Sierpinski gasket end to end: attractor, verdicts, remetrization.

#include <iostream>

#include "hutchfrac/hutchfrac.hpp"

int main() {
  using namespace hutchfrac;
  const auto entry = load_example("sierpinski");
  const auto& d = entry.multimetric.members[0];

  const auto trace = attractor_deterministic(entry.system, entry.attractor.seed, d, 1e-3, 64);
  std::cout << "attractor: " << trace.final_cloud.size() << " points after " << trace.iterations << " steps, residual "
            << trace.residuals.back() << "\n";

  const auto report = classify(entry.system, entry.multimetric);
  for (auto c : kConditions) std::cout << "  " << condition_name(c) << ": " << verdict_name(report.metrics[0][c].verdict) << "\n";

  const Cloud corners(2, entry.system.domain().corners());
  const auto rm = build_remetrized(entry.system, d, AlphaSequence::standard(), corners, 1e-2, 30);
  const Point x(std::vector<double>{0.0, 0.0}), y(std::vector<double>{1.0, 0.0});
  std::cout << "d(x, y) = " << d(x, y) << ", remetrized = " << rhat_eval(*rm, x, y).value << " (depth " << rm->depth()
            << ", tail " << rm->tail_bound() << ")\n";

  write_file("sierpinski.ppm", render_ppm(trace.final_cloud, entry.system.domain(), 256, 256));
  std::cout << "wrote sierpinski.ppm\n";
}
