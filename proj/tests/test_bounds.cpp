#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rested/bounds.hpp"
#include "rested/error.hpp"
#include "rested/kl_math.hpp"
#include "rested/presets.hpp"
#include "rested/tail_sums.hpp"
#include "rested/verify.hpp"

using namespace rested;

namespace {

// Frozen from a 40-digit mpmath evaluation of the closed forms.
constexpr double kRate21 = 0.030896400271195715;
constexpr double kS1Lower = 9.895627968662993;
constexpr double kS1CaseA = 9.050330952473573;
constexpr double kS1UcbSm = 30690.979093378537;
constexpr double kS2Lower = 1.7372914263428246;
constexpr double kS2CaseA = 17964.773659746554;
constexpr double kS2UcbSm = 30690979.093378536;
// 4 * sum_{t>=1} e^{-(2/9) sqrt t} and sum_{t>=1} (t+1)^3 e^{-2 sqrt(t-1)}, by direct summation.
constexpr double kFourG = 160.17674360315593;
constexpr double kH = 80.622164431896203;

void expect_rel(double got, double want, double rel) {
  EXPECT_NEAR(got, want, rel * std::abs(want)) << "got " << got << " want " << want;
}

}  // namespace

TEST(KlRate, IdenticalArmsGiveZero) {
  const ArmParams a{0.3, 0.6};
  EXPECT_EQ(kl_rate(a, a), 0.0);
}

TEST(KlRate, ScenarioOneArmTwoAgainstArmOne) {
  const auto s1 = preset_arms("scenario1");
  expect_rel(kl_rate(s1[1], s1[0]), kRate21, 1e-14);
}

TEST(LowerBound, SingleSuboptimalArmIsOneTerm) {
  const std::vector<ArmParams> arms{{0.5, 0.4}, {0.4, 0.55}};
  const LowerBound lb = regret_lower_bound(arms);
  const double gap = arms[0].mean_reward() - arms[1].mean_reward();
  EXPECT_EQ(lb.per_arm[0], 0.0);
  expect_rel(lb.total, gap / kl_rate(arms[1], arms[0]), 1e-15);
}

TEST(LowerBound, ScenarioValues) {
  expect_rel(regret_lower_bound(preset_arms("scenario1")).total, kS1Lower, 1e-13);
  expect_rel(regret_lower_bound(preset_arms("scenario2")).total, kS2Lower, 1e-12);
}

TEST(LowerBound, IidInstanceCollapsesToMeanDivergence) {
  RandomStream rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto arms = random_iid_instance(rng);
    const InstanceSummary s = instance_summary(arms);
    double expect = 0.0;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      if (i != s.best) expect += s.gap[i] / bern_kl(s.mean[i], s.best_mean);
    }
    expect_rel(regret_lower_bound(arms).total, expect, 1e-12);
  }
}

TEST(AsymptoticBound, ScenarioOneIsCaseA) {
  const BoundReport r = asymptotic_upper_bound(preset_arms("scenario1"), BoundCase::Auto);
  EXPECT_EQ(r.case_label, "a");
  EXPECT_EQ(r.arms.size(), 4u);
  expect_rel(r.asymptotic_total, kS1CaseA, 1e-13);
  expect_rel(asymptotic_upper_bound(preset_arms("scenario1"), BoundCase::A).asymptotic_total, kS1CaseA, 1e-13);
}

TEST(AsymptoticBound, ScenarioTwoIsCaseA) {
  const BoundReport r = asymptotic_upper_bound(preset_arms("scenario2"), BoundCase::Auto);
  EXPECT_EQ(r.case_label, "a");
  expect_rel(r.asymptotic_total, kS2CaseA, 1e-12);
}

TEST(AsymptoticBound, IidInstanceIsCaseD) {
  const std::vector<double> means{0.5, 0.4, 0.2};
  EXPECT_EQ(asymptotic_upper_bound(preset_arms("iid_bernoulli", means), BoundCase::Auto).case_label, "d");
}

TEST(AsymptoticBound, MixedInstanceIsLabelledMixed) {
  const std::vector<ArmParams> arms{{0.5, 0.4}, {0.4, 0.6}, {0.2, 0.5}};
  const BoundReport r = asymptotic_upper_bound(arms, BoundCase::Auto);
  EXPECT_EQ(r.case_label, "mixed");
  EXPECT_EQ(r.arms[0].bound_case, BoundCase::C);
  EXPECT_EQ(r.arms[1].bound_case, BoundCase::A);
}

TEST(AsymptoticBound, ClassifyPair) {
  const ArmParams iid{0.3, 0.7};
  const ArmParams markov{0.3, 0.5};
  EXPECT_EQ(classify_pair(markov, markov), BoundCase::A);
  EXPECT_EQ(classify_pair(iid, markov), BoundCase::B);
  EXPECT_EQ(classify_pair(markov, iid), BoundCase::C);
  EXPECT_EQ(classify_pair(iid, iid), BoundCase::D);
}

TEST(AsymptoticBound, CaseDMatchesLowerBoundOnIidInstances) {
  RandomStream rng(11);
  for (int k = 0; k < 1000; ++k) {
    const auto arms = random_iid_instance(rng);
    const double lower = regret_lower_bound(arms).total;
    const double upper = asymptotic_upper_bound(arms, BoundCase::D).asymptotic_total;
    EXPECT_NEAR(upper, lower, 1e-12 * std::max(1.0, std::abs(lower)));
  }
}

TEST(AsymptoticBound, DegenerateFirstTermDropped) {
  // p01_best * p10_i / p10_best = 0.9 * 0.5 / 0.1 >= 1.
  const std::vector<ArmParams> arms{{0.9, 0.1}, {0.2, 0.5}};
  const BoundReport r = asymptotic_upper_bound(arms, BoundCase::A);
  ASSERT_EQ(r.arms.size(), 1u);
  EXPECT_EQ(r.arms[0].dropped.size(), 1u);
  const double gap = arms[0].mean_reward() - arms[1].mean_reward();
  const double y = 0.1 * 0.2 / 0.9;
  expect_rel(r.asymptotic_total, gap * 2.0 / bern_kl(0.5, y), 1e-14);
}

TEST(AsymptoticBound, NeverBelowLowerBoundOnScenarioOne) {
  const auto s1 = preset_arms("scenario1");
  EXPECT_LE(regret_lower_bound(s1).total, asymptotic_upper_bound(s1, BoundCase::Auto).asymptotic_total);
}

TEST(AsymptoticBound, NeverBelowLowerBoundOnRandomInstances) {
  RandomStream rng(21);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto arms = k % 2 == 0 ? random_markov_instance(rng, 0.0) : random_iid_instance(rng);
    double lower = 0.0;
    double upper = 0.0;
    try {
      lower = regret_lower_bound(arms).total;
      upper = asymptotic_upper_bound(arms, BoundCase::Auto).asymptotic_total;
    } catch (const DomainError&) {
      continue;
    }
    if (lower > upper * (1.0 + 1e-12)) {
      ++violations;
      worst = std::max(worst, lower / upper);
    }
  }
  EXPECT_EQ(violations, 0) << "largest lower / upper ratio " << worst;
}

TEST(AsymptoticBound, RequiresCommonRewards) {
  const std::vector<ArmParams> arms{{0.5, 0.4, 0.0, 1.0}, {0.4, 0.55, 0.0, 2.0}};
  EXPECT_THROW(asymptotic_upper_bound(arms, BoundCase::Auto), ValidationError);
  EXPECT_THROW(regret_lower_bound(arms), ValidationError);
}

TEST(UcbSmBound, TwoArmArithmetic) {
  const std::vector<ArmParams> arms{{0.5, 0.5}, {0.36, 0.54}};
  expect_rel(ucb_sm_upper_bound(arms), 16000.0, 1e-12);
}

TEST(UcbSmBound, ScenarioValues) {
  expect_rel(ucb_sm_upper_bound(preset_arms("scenario1")), kS1UcbSm, 1e-13);
  expect_rel(ucb_sm_upper_bound(preset_arms("scenario2")), kS2UcbSm, 1e-13);
  EXPECT_GT(ucb_sm_upper_bound(preset_arms("scenario1")), kS1CaseA);
}

TEST(Dominance, IidInstancesAlwaysDominate) {
  RandomStream rng(5);
  for (int k = 0; k < 500; ++k) EXPECT_TRUE(dominance_check(random_iid_instance(rng)).dominates);
}

TEST(Dominance, MarkovianWithModerateSigmaDominates) {
  const std::vector<ArmParams> arms{{0.3, 0.2}, {0.25, 0.25}, {0.1, 0.4}};
  const Dominance d = dominance_check(arms);
  EXPECT_TRUE(d.dominates);
  EXPECT_GT(d.margin, 1.0);
}

TEST(Dominance, SmallSigmaReportsMargin) {
  const Dominance d = dominance_check(preset_arms("scenario2"));
  EXPECT_TRUE(std::isfinite(d.margin));
  EXPECT_EQ(d.dominates, d.tvklucb <= d.ucb_sm);
}

TEST(Dominance, RandomMarkovianSweep) {
  const SuiteReport r = verify_dominance(1000, 2);
  EXPECT_TRUE(r.passed());
}

TEST(TailSums, SeriesConstants) {
  expect_rel(4.0 * stretched_constant(), kFourG, 1e-13);
  expect_rel(poly_stretched_constant(), kH, 1e-13);
}

TEST(TailSums, TruncationBracketsFinerEvaluation) {
  for (double a : {1e-3, 0.01, 0.1, 1.0}) {
    const TailSum coarse = poly_exp_sum(a, 1e-6);
    const double fine = poly_exp_sum(a, 1e-16).value();
    EXPECT_LE(coarse.partial, fine * (1.0 + 1e-14)) << a;
    EXPECT_GE(coarse.value(), fine * (1.0 - 1e-14)) << a;
  }
  for (double b : {2.0 / 9.0, 0.5, 2.0}) {
    const TailSum coarse = stretched_exp_sum(b, 1e-6);
    const double fine = stretched_exp_sum(b, 1e-16).value();
    EXPECT_LE(coarse.partial, fine * (1.0 + 1e-14)) << b;
    EXPECT_GE(coarse.value(), fine * (1.0 - 1e-14)) << b;
  }
  const TailSum coarse = poly_stretched_sum(1e-6);
  const double fine = poly_stretched_sum(1e-16).value();
  EXPECT_LE(coarse.partial, fine * (1.0 + 1e-14));
  EXPECT_GE(coarse.value(), fine * (1.0 - 1e-14));
}

TEST(TailSums, ClosedFormAgreesWithDirectSum) {
  for (double a : {1e-4, 1e-3, 0.05, 0.5, 3.0}) {
    const TailSum direct = poly_exp_sum(a);
    ASSERT_GT(direct.terms, 0) << a;
    expect_rel(poly_exp_sum_closed(a), direct.value(), 1e-11);
  }
}

TEST(TailSums, LargeRateIsDominatedByFirstTerm) {
  const TailSum s = poly_exp_sum(50.0);
  EXPECT_NEAR(s.value(), 8.0, 1e-12);
}

TEST(TailSums, TinyRateUsesClosedForm) {
  const TailSum s = poly_exp_sum(1e-8);
  EXPECT_EQ(s.terms, 0);
  EXPECT_GT(s.value(), 0.0);
  EXPECT_TRUE(std::isfinite(s.value()));
}

TEST(FiniteTimeBound, DefaultEpsilonOutOfRangeOnScenarioOne) {
  BoundConfig cfg;
  cfg.horizon = 100000;
  EXPECT_THROW(finite_time_upper_bound(preset_arms("scenario1"), BoundCase::Auto, cfg), DomainError);
}

TEST(FiniteTimeBound, DefaultEpsilon) {
  BoundConfig cfg;
  cfg.horizon = 100000;
  EXPECT_NEAR(cfg.eps1(), std::pow(std::log(1e5), -0.25), 1e-15);
  cfg.horizon = 2;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(FiniteTimeBound, TermsAddUp) {
  BoundConfig cfg{100000, 1e-3, 1e-3, 1e-3, 1e-3};
  const BoundReport r = finite_time_upper_bound(preset_arms("scenario1"), BoundCase::Auto, cfg);
  ASSERT_TRUE(r.finite_total.has_value());
  double total = 0.0;
  for (const ArmBound& a : r.arms) {
    ASSERT_TRUE(a.finite.has_value());
    const FiniteTimeTerms& f = *a.finite;
    EXPECT_EQ(f.tau, f.tv_warmup + f.kl_terms);
    EXPECT_EQ(f.pulls, f.tau + f.epsilon_terms + f.tail_terms);
    EXPECT_GT(f.tv_warmup, 0.0);
    total += a.gap * f.pulls;
  }
  expect_rel(*r.finite_total, total, 1e-15);
}

TEST(FiniteTimeBound, LogCoefficientIsHorizonFreeAndTendsToAsymptotic) {
  const auto arms = preset_arms("scenario1");
  const double asym = asymptotic_upper_bound(arms, BoundCase::Auto).asymptotic_total;
  double prev_err = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
    double first = 0.0;
    for (std::int64_t n : {10000, 100000, 10000000}) {
      const BoundReport r = finite_time_upper_bound(arms, BoundCase::Auto, BoundConfig{n, eps, eps, eps, eps});
      double coeff = 0.0;
      for (const ArmBound& a : r.arms) coeff += a.gap * a.finite->kl_terms;
      coeff /= log_f(static_cast<double>(n));
      if (first == 0.0) first = coeff;
      expect_rel(coeff, first, 1e-12);
    }
    const double err = first / asym - 1.0;
    EXPECT_GE(err, 0.0);
    EXPECT_LT(err, prev_err);
    prev_err = err;
  }
  EXPECT_LT(prev_err, 1e-4);
}

TEST(FiniteTimeBound, IidInstanceCaseD) {
  const std::vector<double> means{0.6, 0.4};
  BoundConfig cfg{100000, 0.05, 0.05, 0.05, 0.05};
  const BoundReport r = finite_time_upper_bound(preset_arms("iid_bernoulli", means), BoundCase::Auto, cfg);
  const FiniteTimeTerms& f = *r.arms[0].finite;
  EXPECT_EQ(f.tv_warmup, 0.0);
  expect_rel(f.epsilon_terms, 1.0 / (2.0 * 0.05 * 0.05) + 2.0 / (0.05 * 0.05), 1e-15);
  expect_rel(f.tail_terms, 2.0 * kFourG + 2.0 * kH, 1e-13);
}

TEST(FiniteTimeBound, ShiftedArgumentOutOfRange) {
  // Scenario 2 needs tiny epsilons: the shifted p01 of arm 2 turns negative.
  BoundConfig cfg{100000, 1e-3, 1e-3, 1e-3, 1e-3};
  EXPECT_THROW(finite_time_upper_bound(preset_arms("scenario2"), BoundCase::Auto, cfg), DomainError);
}

TEST(BoundCase, NamesRoundTrip) {
  for (BoundCase c : {BoundCase::A, BoundCase::B, BoundCase::C, BoundCase::D, BoundCase::Auto}) {
    EXPECT_EQ(parse_bound_case(to_string(c)), c);
  }
  EXPECT_THROW(parse_bound_case("e"), ValidationError);
}
