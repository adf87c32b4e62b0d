#include <gtest/gtest.h>

#include <cmath>

#include "hutchfrac/hutchfrac.hpp"
#include "oracles.hpp"

using namespace hutchfrac;

namespace {

const IfsSystem kHalving(1, {MapDescriptor::similarity(0.5, {0.0})}, DomainBox::cube(1, 0.0, 1.0), true);

std::vector<oracles::Pt> to_pts(const Cloud& c) {
  std::vector<oracles::Pt> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.emplace_back(c[i].begin(), c[i].end());
  return out;
}

}  // namespace

TEST(HutchinsonStep, Examples) {
  EXPECT_EQ(hutchinson_step(kHalving, Cloud(1, {1.0})).data(), (std::vector<double>{0.5}));

  const auto s = hutchinson_step(corpus::sierpinski_system(), Cloud(2, {0.0, 0.0}));
  EXPECT_EQ(s.data(), (std::vector<double>{0.0, 0.0, 0.5, 0.0, 0.0, 0.5}));

  const auto fg = hutchinson_step(corpus::fg_system(), Cloud(1, {0.0, 2.0}));
  auto v = fg.data();
  std::sort(v.begin(), v.end());
  EXPECT_EQ(v, (std::vector<double>{0.0, 1.0, 2.0}));
}

TEST(HutchinsonStep, EscapeIsReported) {
  const auto sys = corpus::edelstein_exp_system(10.0);
  EXPECT_THROW(hutchinson_step(sys, Cloud(1, {10.0})), DomainEscape);
  EXPECT_NO_THROW(hutchinson_step(sys, Cloud(1, {0.0})));
}

TEST(AttractorDeterministic, CantorResidualsMatchExactOracle) {
  const auto e = load_example("cantor");
  const auto tr = attractor_deterministic(e.system, Cloud(1, {0.0, 1.0}), PseudometricDescriptor::euclidean(), 1e-6, 64);
  ASSERT_TRUE(tr.converged);
  ASSERT_GE(tr.residuals.size(), 12u);
  for (std::size_t n = 0; n < tr.residuals.size(); ++n) {
    const double exact = oracles::cantor_residual(static_cast<int>(n));
    EXPECT_NEAR(tr.residuals[n], exact, 1e-15 + 1e-12 * exact) << "step " << n;
    if (n) {
      EXPECT_NEAR(tr.residuals[n] / tr.residuals[n - 1], 1.0 / 3.0, 1e-9);
    }
  }
  EXPECT_LT(tr.residuals.back(), 1e-6);
  EXPECT_GE(tr.residuals[tr.residuals.size() - 2], 1e-6);
}

TEST(AttractorDeterministic, SierpinskiFromGridContractsByHalf) {
  const auto s = corpus::sierpinski_system();
  const auto tr = attractor_deterministic(s, Cloud(2, s.domain().grid(5)), PseudometricDescriptor::euclidean(), 1e-3, 30);
  ASSERT_TRUE(tr.converged);
  for (std::size_t n = 1; n < tr.residuals.size(); ++n)
    EXPECT_LE(tr.residuals[n], std::ldexp(tr.residuals[0], -static_cast<int>(n)) * (1.0 + 1e-6));
}

TEST(AttractorDeterministic, InvarianceOfTheResult) {
  const auto s = corpus::sierpinski_system();
  const double tol = 1e-3;
  const auto tr = attractor_deterministic(s, Cloud(2, {0.0, 0.0}), PseudometricDescriptor::euclidean(), tol, 64);
  ASSERT_TRUE(tr.converged);
  const Cloud next = hutchinson_step(s, tr.final_cloud);
  EXPECT_LE(hausdorff(PseudometricDescriptor::euclidean(), next, tr.final_cloud), 2 * tol);
}

TEST(AttractorDeterministic, MaxPointsStopsGrowth) {
  const auto s = corpus::sierpinski_system();
  AttractorOptions opt;
  opt.max_points = 1000;
  const auto tr = attractor_deterministic(s, Cloud(2, {0.0, 0.0}), PseudometricDescriptor::euclidean(), 1e-9, 64, opt);
  EXPECT_FALSE(tr.converged);
  EXPECT_TRUE(tr.stopped_by_size);
  EXPECT_LE(tr.final_cloud.size(), 1000u);
}

TEST(AttractorDeterministic, SnapKeepsPointsOnTheGrid) {
  const auto s = corpus::sierpinski_system();
  AttractorOptions opt;
  opt.snap = 1.0 / 64.0;
  const auto tr = attractor_deterministic(s, Cloud(2, {0.3, 0.3}), PseudometricDescriptor::euclidean(), 1e-2, 64, opt);
  ASSERT_TRUE(tr.converged);
  for (double v : tr.final_cloud.data()) EXPECT_EQ(v * 64.0, std::nearbyint(v * 64.0));
  EXPECT_THROW(attractor_deterministic(s, Cloud(2, {0.0, 0.0}), PseudometricDescriptor::euclidean(), 0.0, 4), Error);
}

TEST(ChaosGame, HalvingOrbitCollapses) {
  const Cloud c = chaos_game(kHalving, {1.0}, 50, 40, 0);
  for (double v : c.data()) EXPECT_LT(v, std::ldexp(1.0, -40));
}

TEST(ChaosGame, SierpinskiPointsLieNearTheAttractor) {
  const auto s = corpus::sierpinski_system();
  const auto tr = attractor_deterministic(s, Cloud(2, {0.0, 0.0}), PseudometricDescriptor::euclidean(), 5e-4, 64);
  ASSERT_TRUE(tr.converged);
  const Cloud c = chaos_game(s, {0.3, 0.3}, 100000, 100, 1);
  EXPECT_LE(directed_hausdorff(PseudometricDescriptor::euclidean(), c, tr.final_cloud), 1e-3);
}

TEST(ChaosGame, SameSeedIsBitIdentical) {
  const auto s = corpus::sierpinski_system();
  const Cloud a = chaos_game(s, {0.0, 0.0}, 20000, 10, 42), b = chaos_game(s, {0.0, 0.0}, 20000, 10, 42);
  EXPECT_EQ(a.data(), b.data());
  EXPECT_NE(a.data(), chaos_game(s, {0.0, 0.0}, 20000, 10, 43).data());
  EXPECT_THROW(chaos_game(s, {0.0, 0.0}, 10, 10, 0), Error);
}

TEST(ChaosGame, MapChoicesFollowTheDocumentedRng) {
  // index(n) = next() % n on mt19937_64.
  const auto s = corpus::sierpinski_system();
  std::mt19937_64 eng(5);
  std::vector<double> x = {0.0, 0.0}, expect;
  for (int i = 0; i < 30; ++i) {
    const auto f = eng() % 3;
    const double ox = f == 1 ? 0.5 : 0.0, oy = f == 2 ? 0.5 : 0.0;
    x = {0.5 * x[0] + ox, 0.5 * x[1] + oy};
    expect.insert(expect.end(), x.begin(), x.end());
  }
  EXPECT_EQ(chaos_game(s, {0.0, 0.0}, 30, 0, 5).data(), Cloud(2, expect).data());
}

TEST(CodingMap, ConstantStreamsReachTheVertices) {
  const auto s = corpus::sierpinski_system();
  const std::vector<Point> vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto r = coding_map(s, {Word{}, Word{{i}}}, {0.3, 0.7}, 1e-12, 200);
    EXPECT_NEAR(r.point[0], vertices[i][0], 1e-11);
    EXPECT_NEAR(r.point[1], vertices[i][1], 1e-11);
    EXPECT_LT(r.radius, 1e-12);
  }
}

TEST(CodingMap, CantorAlternatingStreamMatchesDeepWords) {
  const auto s = corpus::cantor_system();
  const SymbolStream st{Word{}, Word{{0, 1}}};
  const auto r = coding_map(s, st, {0.5}, 1e-12, 200);
  // pi(0,1,0,1,...) = sum over odd k of 2/3^(k+1) = 2/3 * 1/3 / (1 - 1/9) = 1/4.
  EXPECT_NEAR(r.point[0], 0.25, 1e-12);
  const Word w40 = st.prefix(40);
  EXPECT_NEAR(eval_word(s, w40, {0.0})[0], eval_word(s, w40, {1.0})[0], std::pow(3.0, -40) + 1e-16);
  EXPECT_NEAR(r.point[0], eval_word(s, w40, {0.0})[0], 2e-12);
}

TEST(CodingMap, FgAlternatingStreamFromTwo) {
  const auto r = coding_map(corpus::fg_system(), {Word{}, Word{{0, 1}}}, {2.0}, 1e-9, 50);
  EXPECT_EQ(r.point, (Point{1.0}));
}

TEST(CodingMap, NoContractionCarriesTheLastIterate) {
  const IfsSystem rot(1, {MapDescriptor::clamp1d(-1.0, 1.0, 0.0, 1.0)}, DomainBox::cube(1, 0.0, 1.0));
  try {
    coding_map(rot, {Word{}, Word{{0}}}, {0.0}, 1e-6, 9);
    FAIL() << "expected NoContraction";
  } catch (const NoContraction& e) {
    EXPECT_EQ(e.last_iterate(), (Point{1.0}));
  }
}

TEST(AttractorByWords, Examples) {
  const auto s = corpus::cantor_system();
  EXPECT_EQ(attractor_by_words(s, 0, {0.4}).data(), (std::vector<double>{0.4}));

  const Cloud c = attractor_by_words(s, 8, {0.0});
  ASSERT_EQ(c.size(), 256u);
  auto v = c.data();
  std::sort(v.begin(), v.end());
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GE(v[i] - v[i - 1], std::pow(3.0, -8) * (1 - 1e-9));
  const auto tr = attractor_deterministic(s, Cloud(1, {0.0, 1.0}), PseudometricDescriptor::euclidean(), 1e-7, 64);
  EXPECT_LE(hausdorff(PseudometricDescriptor::euclidean(), c, tr.final_cloud), std::pow(3.0, -8) + 1e-12);
}

TEST(AttractorByWords, SierpinskiDepthSeven) {
  const auto s = corpus::sierpinski_system();
  const Cloud c = attractor_by_words(s, 7, {0.0, 0.0});
  const auto tr = attractor_deterministic(s, Cloud(2, {0.0, 0.0}), PseudometricDescriptor::euclidean(), 1e-3, 64);
  const double d = hausdorff(PseudometricDescriptor::euclidean(), c, tr.final_cloud);
  EXPECT_LE(d, std::ldexp(std::sqrt(2.0), -7));
  // The same value from the exhaustive oracle on a smaller pair of clouds.
  const Cloud c4 = attractor_by_words(s, 4, {0.0, 0.0}), c5 = attractor_by_words(s, 5, {0.0, 0.0});
  EXPECT_NEAR(hausdorff(PseudometricDescriptor::euclidean(), c4, c5),
              oracles::hausdorff(oracles::euclid, to_pts(c4), to_pts(c5)), 1e-15);
}

TEST(AttractorByWords, DeeperWordsStayNearby) {
  // w(K) for |w| = n lies within lambda^n diam of the depth-n cloud, for any base.
  const auto s = corpus::sierpinski_system();
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Point base{rng.unit(), rng.unit()};
    for (std::size_t n = 2; n <= 6; ++n) {
      const Cloud a = attractor_by_words(s, n, base), b = attractor_by_words(s, n + 1, base);
      EXPECT_LE(hausdorff(PseudometricDescriptor::euclidean(), a, b), std::ldexp(std::sqrt(2.0), -static_cast<int>(n)) + 1e-12);
    }
  }
}
