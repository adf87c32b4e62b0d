#include <gtest/gtest.h>

#include <cmath>

#include "hutchfrac/hutchfrac.hpp"
#include "oracles.hpp"

using namespace hutchfrac;

namespace {

Cloud interval_grid(double lo, double hi, std::size_t n) { return Cloud(1, DomainBox::cube(1, lo, hi).grid(n)); }

OscillationProfile line_profile(std::vector<double> grid, std::function<double(double)> w, std::optional<double> lip) {
  OscillationProfile p;
  p.t_grid = std::move(grid);
  for (double t : p.t_grid) p.values.push_back(w(t));
  p.mode = ProfileMode::AnalyticExact;
  p.lipschitz = lip;
  return p;
}

std::vector<double> integer_grid(int hi) {
  std::vector<double> g;
  for (int t = 1; t <= hi; ++t) g.push_back(t);
  return g;
}

}  // namespace

TEST(OscillationEmpirical, IdentityAttainsPairDistances) {
  const IfsSystem id(1, {MapDescriptor::similarity(1.0, {0.0})}, DomainBox::cube(1, 0, 1));
  const Cloud pts = interval_grid(0.0, 1.0, 11);
  const std::vector<double> grid = {0.05, 0.1, 0.35, 1.0};
  const auto p = oscillation_empirical(id, PseudometricDescriptor::euclidean(), pts, grid, 10000, 0);
  EXPECT_EQ(p.mode, ProfileMode::EmpiricalLowerBound);
  EXPECT_EQ(p.values[0], 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double attained = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (std::abs(pts[i][0] - pts[j][0]) <= grid[k]) attained = std::max(attained, std::abs(pts[i][0] - pts[j][0]));
    EXPECT_EQ(p.values[k], attained);
    EXPECT_LE(p.values[k], grid[k]);
  }
}

TEST(OscillationEmpirical, HalvingAtOne) {
  const auto p = oscillation_empirical(MapDescriptor::similarity(0.5, {0.0}), PseudometricDescriptor::euclidean(),
                                       interval_grid(0.0, 1.0, 101), {0.5, 1.0}, 100000, 0);
  EXPECT_DOUBLE_EQ(p.values[1], 0.5);
  EXPECT_DOUBLE_EQ(p.values[0], 0.25);
}

TEST(OscillationEmpirical, FgSingleLettersAtTwo) {
  const IfsSystem s = corpus::fg_system();
  const Cloud pts = interval_grid(0.0, 2.0, 201);
  const auto p = oscillation_empirical(s, PseudometricDescriptor::euclidean(), pts, {0.5, 2.0}, 1000000, 0);
  const double oracle = std::max(oracles::grid_oscillation_1d(oracles::f, 0.0, 2.0, 201, 2.0),
                                 oracles::grid_oscillation_1d(oracles::g, 0.0, 2.0, 201, 2.0));
  EXPECT_DOUBLE_EQ(oracle, 1.0);
  EXPECT_DOUBLE_EQ(p.values[1], oracle);
  ASSERT_TRUE(p.witness);
  EXPECT_EQ(p.witness->word.size(), 1u);
}

TEST(OscillationEmpirical, SameSeedSameProfile) {
  const IfsSystem s = corpus::sierpinski_system();
  const Cloud pts(2, s.domain().grid(40));
  const auto grid = default_t_grid(s.domain(), PseudometricDescriptor::euclidean());
  const auto a = oscillation_empirical(s, PseudometricDescriptor::euclidean(), pts, grid, 5000, 17);
  const auto b = oscillation_empirical(s, PseudometricDescriptor::euclidean(), pts, grid, 5000, 17);
  EXPECT_EQ(a.values, b.values);
  EXPECT_TRUE(std::is_sorted(a.values.begin(), a.values.end()));
}

TEST(OscillationAnalytic, Examples) {
  const auto half = oscillation_analytic(MapDescriptor::similarity(0.5, {0.0, 0.0}), PseudometricDescriptor::euclidean(), {2.0});
  ASSERT_TRUE(half);
  EXPECT_DOUBLE_EQ(half->values[0], 1.0);

  const IfsSystem s = corpus::fg_system();
  const std::vector<double> grid = {0.1, 0.5, 1.0, 1.5, 2.0};
  const auto f = oscillation_analytic(s.map(0), PseudometricDescriptor::euclidean(), grid, &s.domain());
  ASSERT_TRUE(f);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_DOUBLE_EQ(f->values[k], std::min(grid[k], 1.0));
    EXPECT_NEAR(f->values[k], oracles::grid_oscillation_1d(oracles::f, 0.0, 2.0, 401, grid[k]), 1e-12);
  }
}

TEST(OscillationAnalytic, EdelsteinUpperBoundDominatesSamples) {
  const DomainBox box = DomainBox::cube(1, 0.0, 10.0);
  const auto e = MapDescriptor::builtin("edelstein_exp");
  const auto grid = log_grid(0.01, 10.0, 16);
  const auto up = oscillation_analytic(e, PseudometricDescriptor::euclidean(), grid, &box);
  ASSERT_TRUE(up);
  EXPECT_EQ(up->mode, ProfileMode::AnalyticUpperBound);
  const auto emp = oscillation_empirical(e, PseudometricDescriptor::euclidean(), Cloud(1, box.grid(301)), grid, 100000, 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(up->values[k], grid[k] * (1.0 - std::exp(-10.0)), 1e-12);
    EXPECT_GE(up->values[k] * (1.0 + 1e-12), emp.values[k]);
  }
}

TEST(OscillationAnalytic, SystemIsMaxOverMaps) {
  const IfsSystem s = corpus::sierpinski_system();
  const auto p = oscillation_analytic(s, PseudometricDescriptor::euclidean(), {0.25, 1.0});
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->values[0], 0.125);
  EXPECT_DOUBLE_EQ(*p->lipschitz, 0.5);
}

TEST(IterateProfile, Examples) {
  const auto grid = integer_grid(8);
  const auto half = iterate_profile(line_profile(grid, [](double t) { return t / 2; }, 0.5), 3);
  EXPECT_DOUBLE_EQ(half.values[7], 1.0);

  const auto id = line_profile(grid, [](double t) { return t; }, 1.0);
  EXPECT_EQ(iterate_profile(id, 4).values, id.values);

  const auto cap = iterate_profile(line_profile(grid, [](double t) { return std::min(t, 1.0); }, 1.0), 5);
  EXPECT_DOUBLE_EQ(cap.values[1], 1.0);
  EXPECT_THROW(iterate_profile(id, 0), Error);
}

TEST(IterateProfile, NeverBelowDirectComposition) {
  // Rounding up to grid points keeps iterated upper bounds upper bounds.
  const auto grid = log_grid(1e-3, 4.0, 40);
  auto w = [](double t) { return 0.9 * t / (1.0 + t); };
  const auto p = line_profile(grid, w, 0.9);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto q = iterate_profile(p, n);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double direct = grid[k];
      for (std::size_t r = 0; r < n; ++r) direct = w(direct);
      EXPECT_GE(q.values[k] * (1.0 + 1e-12), direct);
    }
  }
}

TEST(SystemPowerOscillation, FgWordsKeepUnitOscillation) {
  const IfsSystem s = corpus::fg_system();
  const auto p = system_power_oscillation(s, PseudometricDescriptor::euclidean(), 6, interval_grid(0.0, 2.0, 41), {2.0}, 100000, 0);
  EXPECT_GE(p.values[0], 1.0);
  EXPECT_DOUBLE_EQ(p.values[0], oracles::grid_oscillation_1d(
                                    [](double x) {
                                      for (int r = 0; r < 3; ++r) x = oracles::f(oracles::g(x));
                                      return x;
                                    },
                                    0.0, 2.0, 41, 2.0));
}

TEST(SystemPowerOscillation, SingletonFSquaredIsConstant) {
  const IfsSystem f = corpus::fg_system().subsystem({0});
  const auto p = system_power_oscillation(f, PseudometricDescriptor::euclidean(), 2, interval_grid(0.0, 2.0, 41), {0.5, 1.0, 2.0}, 100000, 0);
  for (double v : p.values) EXPECT_EQ(v, 0.0);
}

TEST(SystemPowerOscillation, SierpinskiLengthFourWords) {
  const IfsSystem s = corpus::sierpinski_system();
  const auto p = system_power_oscillation(s, PseudometricDescriptor::euclidean(), 4, Cloud(2, s.domain().grid(9)),
                                          {std::sqrt(2.0)}, 100000, 0);
  EXPECT_LE(p.values[0], std::sqrt(2.0) / 16.0 + 1e-12);
  EXPECT_NEAR(p.values[0], std::sqrt(2.0) / 16.0, 1e-12);
}

TEST(LogGrid, EndpointsAndMonotone) {
  const auto g = log_grid(1e-3, 2.0, 32);
  ASSERT_EQ(g.size(), 32u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-3);
  EXPECT_DOUBLE_EQ(g.back(), 2.0);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}
