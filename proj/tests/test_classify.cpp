#include <gtest/gtest.h>

#include "hutchfrac/hutchfrac.hpp"

using namespace hutchfrac;

namespace {

std::optional<double> certificate(const ConditionResult& r, const std::string& key) {
  for (const auto& [k, v] : r.certificates)
    if (k == key) return v;
  return std::nullopt;
}

std::string describe(const std::vector<ExpectationMismatch>& ms) {
  std::string s;
  for (const auto& m : ms)
    s += m.where + " " + condition_name(m.condition) + ": expected " + verdict_name(m.expected) + ", got " +
         verdict_name(m.actual) + "\n";
  return s;
}

class CorpusClassify : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST_P(CorpusClassify, MatchesExpectedVerdicts) {
  const auto e = load_example(GetParam());
  const auto rep = classify(e.system, e.multimetric, e.config);
  ASSERT_EQ(rep.metrics.size(), e.multimetric.members.size());
  EXPECT_TRUE(chain_consistent(rep));
  const auto ms = compare_expected(rep, e.expected, e.name);
  EXPECT_TRUE(ms.empty()) << describe(ms);
  for (const auto& sub : e.subsystems) {
    const auto srep = classify(e.system.subsystem(sub.indices), e.multimetric, e.config);
    const auto sms = compare_expected(srep, sub.expected, e.name + " subsystem");
    EXPECT_TRUE(sms.empty()) << describe(sms);
  }
}

INSTANTIATE_TEST_SUITE_P(AllEntries, CorpusClassify, ::testing::ValuesIn(corpus::names()));

TEST(Classify, SierpinskiBanachLambdaIsOneHalf) {
  const auto e = load_example("sierpinski");
  const auto rep = classify(e.system, e.multimetric, e.config);
  const auto& b = rep.metrics[0][Condition::Banach];
  EXPECT_EQ(b.verdict, Verdict::Verified);
  ASSERT_TRUE(certificate(b, "lambda"));
  EXPECT_DOUBLE_EQ(*certificate(b, "lambda"), 0.5);
}

TEST(Classify, FgEventualWitnessAlternatesLetters) {
  const auto e = load_example("fg_interval");
  const auto rep = classify(e.system, e.multimetric, e.config);
  const auto& ev = rep.metrics[0][Condition::Eventual];
  ASSERT_EQ(ev.verdict, Verdict::Refuted);
  ASSERT_TRUE(ev.witness);
  const auto& w = *ev.witness;
  ASSERT_GE(w.word.size(), 2u);
  for (std::size_t i = 0; i < w.word.size(); ++i) EXPECT_EQ(w.word.letters[i], i % 2);
  EXPECT_EQ(w.x, (Point{0.0}));
  EXPECT_EQ(w.y, (Point{2.0}));
  EXPECT_EQ(w.fx, (Point{0.0}));
  EXPECT_EQ(w.fy, (Point{1.0}));
}

TEST(Classify, ReportCarriesTheDomainBox) {
  const auto e = load_example("edelstein_exp");
  const auto rep = classify(e.system, e.multimetric, e.config);
  EXPECT_EQ(rep.domain, e.system.domain());
  EXPECT_EQ(rep.metrics[0][Condition::Edelstein].verdict, Verdict::Verified);
  const auto lambda = certificate(rep.metrics[0][Condition::Banach], "lambda");
  ASSERT_TRUE(lambda);
  EXPECT_NEAR(*lambda, 1.0 - std::exp(-10.0), 1e-12);
}

TEST(Classify, EmptyFamilyIsAConfigError) {
  EXPECT_THROW(classify(corpus::cantor_system(), Multimetric{}), ConfigError);
}

TEST(Classify, TinyWordBudgetLeavesEventualUndeterminedAndFlagsTruncation) {
  const auto e = load_example("swap_halve");
  ClassifyConfig cfg = e.config;
  cfg.word_budget = 0;
  const auto rep = classify(e.system, e.multimetric, cfg);
  EXPECT_TRUE(rep.metrics[0].truncated);
  EXPECT_EQ(rep.metrics[0][Condition::Eventual].verdict, Verdict::Undetermined);
  EXPECT_TRUE(chain_consistent(rep));
}

TEST(PropagateChain, VerifiedFlowsForwardRefutedFlowsBackward) {
  MetricReport r;
  r[Condition::Krasnoselskii].verdict = Verdict::Verified;
  propagate_chain(r);
  EXPECT_EQ(r[Condition::Matkowski].verdict, Verdict::Verified);
  EXPECT_EQ(r[Condition::Eventual].verdict, Verdict::Verified);
  EXPECT_EQ(r[Condition::Edelstein].verdict, Verdict::Verified);
  // Edelstein implies Rakotch on the compact box.
  EXPECT_EQ(r[Condition::Rakotch].verdict, Verdict::Verified);
  EXPECT_EQ(r[Condition::Banach].verdict, Verdict::Undetermined);

  MetricReport s;
  s[Condition::Eventual].verdict = Verdict::Refuted;
  propagate_chain(s);
  for (auto c : {Condition::Banach, Condition::Rakotch, Condition::Krasnoselskii, Condition::Matkowski})
    EXPECT_EQ(s[c].verdict, Verdict::Refuted) << condition_name(c);
  EXPECT_EQ(s[Condition::Edelstein].verdict, Verdict::Refuted);
}

TEST(PropagateChain, RandomReportsStayConsistentOrGetFlagged) {
  Rng rng(99);
  for (int trial = 0; trial < 2000; ++trial) {
    MetricReport r;
    for (auto c : kConditions) {
      const auto pick = rng.index(4);
      r[c].verdict = pick == 0 ? Verdict::Verified : pick == 1 ? Verdict::Refuted : Verdict::Undetermined;
    }
    const MetricReport before = r;
    const bool consistent = chain_consistent(r);
    propagate_chain(r);
    // Only undetermined slots are ever written.
    for (auto c : kConditions) {
      if (before[c].verdict != Verdict::Undetermined) {
        EXPECT_EQ(r[c].verdict, before[c].verdict);
      }
    }
    if (consistent) {
      // A consistent seed can still become inconsistent once implications close
      // over it; in that case the contradiction must be noted.
      if (!chain_consistent(r)) {
        EXPECT_FALSE(r.notes.empty());
      }
      // Closure: nothing left to propagate.
      for (const auto& imp : kImplications) {
        if (r[imp.from].verdict == Verdict::Verified) {
          EXPECT_NE(r[imp.to].verdict, Verdict::Undetermined);
        }
        if (r[imp.to].verdict == Verdict::Refuted) {
          EXPECT_NE(r[imp.from].verdict, Verdict::Undetermined);
        }
      }
    } else {
      EXPECT_FALSE(r.notes.empty());
    }
  }
}

TEST(VerdictNames, RoundTrip) {
  for (auto c : kConditions) EXPECT_EQ(condition_from_name(condition_name(c)), c);
  for (auto v : {Verdict::Verified, Verdict::Refuted, Verdict::Undetermined}) EXPECT_EQ(verdict_from_name(verdict_name(v)), v);
  EXPECT_THROW(condition_from_name("lipschitz"), Error);
}
