#include <gtest/gtest.h>

#include <cmath>

#include "hutchfrac/hutchfrac.hpp"
#include "oracles.hpp"

using namespace hutchfrac;

namespace {

std::vector<oracles::Pt> to_pts(const Cloud& c) {
  std::vector<oracles::Pt> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.emplace_back(c[i].begin(), c[i].end());
  return out;
}

Cloud random_cloud(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<double> flat;
  for (std::size_t i = 0; i < n * dim; ++i) flat.push_back(rng.uniform(-1.0, 1.0));
  return Cloud(dim, flat);
}

Cloud unit_grid() { return Cloud(2, DomainBox::cube(2, 0.0, 1.0).grid(101)); }

Cloud diagonal() {
  std::vector<double> flat;
  for (int i = 0; i <= 100; ++i) {
    const double t = i == 100 ? 1.0 : i / 100.0;
    flat.push_back(t);
    flat.push_back(t);
  }
  return Cloud(2, flat);
}

// Negated distances break nonnegativity and the triangle inequality.
struct Negated {
  double operator()(std::span<const double> x, std::span<const double> y) const { return -euclidean_distance(x, y); }
};

}  // namespace

TEST(PdEval, Examples) {
  EXPECT_DOUBLE_EQ(pd_eval(PseudometricDescriptor::euclidean(), {0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(pd_eval(PseudometricDescriptor::coordinate(0), {0, 7}, {1, 9}), 1.0);
  const auto both = directed_max({PseudometricDescriptor::coordinate(0), PseudometricDescriptor::coordinate(1)});
  EXPECT_DOUBLE_EQ(pd_eval(both, {0, 0}, {1, 2}), 2.0);
}

TEST(PdEval, DimensionErrors) {
  EXPECT_THROW(pd_eval(PseudometricDescriptor::euclidean(), {0, 0}, {1}), DimensionMismatch);
  EXPECT_THROW(pd_eval(PseudometricDescriptor::coordinate(2), {0, 0}, {1, 1}), DimensionMismatch);
  EXPECT_THROW(PseudometricDescriptor::weighted_max({{0, -1.0}}), Error);
}

TEST(DirectedMax, SingletonMatchesMember) {
  Rng rng(3);
  const auto d = PseudometricDescriptor::weighted_max({{0, 2.0}, {1, 0.5}});
  const auto m = directed_max({d});
  for (int i = 0; i < 100; ++i) {
    const Point x{rng.uniform(-5, 5), rng.uniform(-5, 5)}, y{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    EXPECT_EQ(m(x, y), d(x, y));
  }
}

TEST(DirectedMax, FlattensNestedFamilies) {
  const auto inner = directed_max({PseudometricDescriptor::coordinate(0), PseudometricDescriptor::coordinate(1)});
  const auto outer = directed_max({inner, PseudometricDescriptor::sup()});
  EXPECT_EQ(std::get<MaxOf>(outer.kind()).members.size(), 3u);
  EXPECT_THROW(directed_max({}), Error);
}

TEST(Hausdorff, Examples) {
  const auto d = PseudometricDescriptor::euclidean();
  EXPECT_DOUBLE_EQ(hausdorff(d, Cloud(1, {0.0}), Cloud(1, {1.0})), 1.0);
  const Cloud a = unit_grid(), b = diagonal();
  EXPECT_LE(hausdorff(PseudometricDescriptor::hausdorff_lift(PseudometricDescriptor::coordinate(0)), a, b), 0.01);
  const double e = hausdorff(d, a, b);
  EXPECT_GE(e, 0.70);
  EXPECT_LE(e, 0.7072);
  EXPECT_NEAR(e, oracles::hausdorff(oracles::euclid, to_pts(a), to_pts(b)), 1e-15);
}

TEST(Hausdorff, SweepMatchesBruteForceOnRandomClouds) {
  Rng rng(11);
  const std::vector<PseudometricDescriptor> metrics = {
      PseudometricDescriptor::euclidean(), PseudometricDescriptor::sup(), PseudometricDescriptor::coordinate(1),
      PseudometricDescriptor::weighted_max({{0, 0.3}, {2, 4.0}}),
      directed_max({PseudometricDescriptor::coordinate(0), PseudometricDescriptor::coordinate(2)})};
  for (int trial = 0; trial < 20; ++trial) {
    const Cloud a = random_cloud(rng, 40 + rng.index(200), 3), b = random_cloud(rng, 40 + rng.index(200), 3);
    for (const auto& d : metrics) {
      EXPECT_EQ(hausdorff(d, a, b), hausdorff_brute(d, a, b)) << d.label();
      EXPECT_EQ(directed_hausdorff(d, a, b), directed_hausdorff_brute(d, a, b)) << d.label();
    }
    EXPECT_NEAR(hausdorff(PseudometricDescriptor::euclidean(), a, b),
                oracles::hausdorff(oracles::euclid, to_pts(a), to_pts(b)), 1e-14);
    EXPECT_NEAR(hausdorff(PseudometricDescriptor::coordinate(1), a, b),
                oracles::hausdorff(oracles::coord(1), to_pts(a), to_pts(b)), 1e-14);
  }
}

TEST(Hausdorff, MetricPropertiesOnRandomClouds) {
  Rng rng(5);
  const auto d = PseudometricDescriptor::sup();
  for (int trial = 0; trial < 10; ++trial) {
    const Cloud a = random_cloud(rng, 50, 2), b = random_cloud(rng, 60, 2), c = random_cloud(rng, 70, 2);
    EXPECT_EQ(hausdorff(d, a, a), 0.0);
    EXPECT_EQ(hausdorff(d, a, b), hausdorff(d, b, a));
    EXPECT_LE(hausdorff(d, a, c), hausdorff(d, a, b) + hausdorff(d, b, c) + 1e-15);
  }
}

TEST(Hausdorff, LiftAgreesWithBaseOnPoints) {
  const auto base = PseudometricDescriptor::weighted_max({{0, 2.0}});
  const auto lift = PseudometricDescriptor::hausdorff_lift(base);
  EXPECT_EQ(lift(Point{0.0, 1.0}, Point{0.25, 3.0}), 0.5);
  EXPECT_EQ(hausdorff(lift, Cloud(2, {0.0, 1.0}), Cloud(2, {0.25, 3.0})), 0.5);
}

TEST(Diameter, Examples) {
  const Cloud corners(2, DomainBox::cube(2, 0.0, 1.0).corners());
  EXPECT_EQ(diameter(PseudometricDescriptor::euclidean(), Cloud(2, {0.3, 0.4})), 0.0);
  EXPECT_DOUBLE_EQ(diameter(PseudometricDescriptor::euclidean(), corners), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(diameter(PseudometricDescriptor::coordinate(1), corners), 1.0);
}

TEST(Axioms, EuclideanAndCoordinateHaveNoViolations) {
  Rng rng(1);
  const Cloud small = random_cloud(rng, 30, 2), big = random_cloud(rng, 500, 2);
  for (const auto& d : {PseudometricDescriptor::euclidean(), PseudometricDescriptor::coordinate(0)}) {
    const auto r = check_axioms(d, small, 0);
    EXPECT_TRUE(r.ok()) << d.label();
    EXPECT_TRUE(r.exhaustive);
    EXPECT_EQ(r.triples_checked, 30u * 30u * 30u);
    const auto s = check_axioms(d, big, 9);
    EXPECT_TRUE(s.ok());
    EXPECT_FALSE(s.exhaustive);
    EXPECT_EQ(s.triples_checked, kSampledTriples);
  }
}

TEST(Axioms, NegatedDistanceIsCaught) {
  Rng rng(2);
  const auto r = check_axioms(Negated{}, random_cloud(rng, 12, 2), 0);
  EXPECT_FALSE(r.ok());
  ASSERT_FALSE(r.triangle_violations.empty());
  const auto& v = r.triangle_violations.front();
  EXPECT_GT(v.excess, 0.0);
  EXPECT_FALSE(r.symmetry_violations.empty());
}

TEST(Axioms, UnseparatedPairFoundForSingleCoordinate) {
  const Cloud grid(2, DomainBox::cube(2, 0.0, 1.0).grid(3));
  EXPECT_TRUE(find_unseparated_pair({{PseudometricDescriptor::coordinate(0)}}, grid).has_value());
  EXPECT_FALSE(
      find_unseparated_pair({{PseudometricDescriptor::coordinate(0), PseudometricDescriptor::coordinate(1)}}, grid).has_value());
}

TEST(Cloud, DeduplicationKeepsFirstOccurrence) {
  const Cloud exact(1, {0.5, 0.25, 0.5, 0.25, 1.0});
  EXPECT_EQ(exact.data(), (std::vector<double>{0.5, 0.25, 1.0}));
  const Cloud near(1, {0.0, 1e-9, 0.5, 0.5 + 2e-3}, 1e-3);
  EXPECT_EQ(near.data(), (std::vector<double>{0.0, 0.5, 0.5 + 2e-3}));
  EXPECT_THROW(Cloud(2, {1.0, 2.0, 3.0}), Error);
  EXPECT_THROW(Point({1.0, std::nan("")}), Error);
}

TEST(DomainBox, GridIncludesEndpointsExactly) {
  const DomainBox box(Point{0.0, -1.0}, Point{0.3, 1.0});
  const auto g = box.grid(7);
  ASSERT_EQ(g.size(), 7u * 7u * 2u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], -1.0);
  EXPECT_EQ(g[g.size() - 2], 0.3);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_THROW(DomainBox(Point{1.0}, Point{0.0}), Error);
}
