#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rested/error.hpp"
#include "rested/harness.hpp"
#include "rested/kl_math.hpp"
#include "rested/policies.hpp"
#include "rested/presets.hpp"

using namespace rested;

namespace {

ArmStatistics stats_of(std::int64_t plays0, std::int64_t trans01, std::int64_t plays1, std::int64_t trans10,
                       double reward_sum, ArmState last) {
  ArmStatistics s;
  s.plays0 = plays0;
  s.trans01 = trans01;
  s.plays1 = plays1;
  s.trans10 = trans10;
  s.reward_sum = reward_sum;
  s.last_state = last;
  return s;
}

PolicyConfig policy(PolicyKind kind) {
  PolicyConfig p;
  p.kind = kind;
  return p;
}

}  // namespace

TEST(SmIndex, ZeroBudgetGivesSampleMean) {
  const ArmStatistics s = stats_of(2, 1, 2, 1, 2.0, ArmState::Zero);
  EXPECT_EQ(klucbsm_index(s, {}, 1, policy(PolicyKind::KlUcbSm)), 0.5);
  EXPECT_EQ(klucbsm2_index(s, {}, 1, policy(PolicyKind::KlUcbSm2)), 0.5);
}

TEST(SmIndex, ZeroMeanClosedForm) {
  const ArmStatistics s = stats_of(4, 0, 0, 0, 0.0, ArmState::Zero);
  for (std::int64_t t : {2, 10, 1000}) {
    const double c = log_f(static_cast<double>(t)) / 4.0;
    EXPECT_NEAR(klucbsm_index(s, {}, t, policy(PolicyKind::KlUcbSm)), -std::expm1(-c), 1e-10);
  }
}

TEST(SmIndex, UnitMeanStaysAtOne) {
  const ArmStatistics s = stats_of(0, 0, 5, 0, 5.0, ArmState::One);
  EXPECT_EQ(klucbsm_index(s, {}, 100, policy(PolicyKind::KlUcbSm)), 1.0);
}

TEST(SmIndex, ComposesSolverWithBudget) {
  const ArmStatistics s = stats_of(1, 1, 0, 0, 0.5, ArmState::One);
  const double expect = kl_ucb_upper(0.5, ConfidenceBudget(log_f(3.0)));
  EXPECT_EQ(klucbsm_index(s, {}, 3, policy(PolicyKind::KlUcbSm)), expect);
}

TEST(SmIndex, PlainLogVariantIsNeverMoreOptimistic) {
  RandomStream rng(4);
  for (int k = 0; k < 2000; ++k) {
    const auto n = static_cast<std::int64_t>(1 + rng.below(200));
    const ArmStatistics s = stats_of(n, 0, 0, 0, static_cast<double>(rng.below(static_cast<std::uint64_t>(n) + 1)),
                                     ArmState::Zero);
    const auto t = static_cast<std::int64_t>(3 + rng.below(100000));
    EXPECT_LE(klucbsm2_index(s, {}, t, policy(PolicyKind::KlUcbSm2)),
              klucbsm_index(s, {}, t, policy(PolicyKind::KlUcbSm)));
  }
}

TEST(SmIndex, NonUnitRewardsMapThroughUnitInterval) {
  const RewardMap r{2.0, 5.0};
  const ArmStatistics s = stats_of(2, 1, 2, 1, 2.0 + 5.0 + 2.0 + 5.0, ArmState::Zero);
  const double expect = 2.0 + 3.0 * kl_ucb_upper(0.5, ConfidenceBudget(log_f(50.0) / 4.0));
  EXPECT_NEAR(klucbsm_index(s, r, 50, policy(PolicyKind::KlUcbSm)), expect, 1e-12);
}

TEST(UcbSmIndex, TimeOneGivesSampleMean) {
  PolicyConfig p = policy(PolicyKind::UcbSm);
  p.ucb_sm_constant = 2.0;
  const ArmStatistics s = stats_of(4, 2, 4, 2, 3.0, ArmState::Zero);
  EXPECT_EQ(ucbsm_index(s, {}, 1, p), 3.0 / 8.0);
}

TEST(UcbSmIndex, DirectArithmetic) {
  PolicyConfig p = policy(PolicyKind::UcbSm);
  p.ucb_sm_constant = 2.0;
  const ArmStatistics s = stats_of(4, 2, 4, 2, 4.0, ArmState::Zero);
  EXPECT_NEAR(ucbsm_index(s, {}, 55, p), 0.5 + std::sqrt(2.0 * std::log(55.0) / 8.0), 1e-15);
  // With log t = 4 the bonus is exactly 1.
  const double t4 = std::exp(4.0);
  EXPECT_NEAR(0.5 + std::sqrt(2.0 * std::log(t4) / 8.0), 1.5, 1e-15);
}

TEST(UcbSmIndex, RequiresResolvedConstant) {
  const ArmStatistics s = stats_of(1, 0, 0, 0, 0.0, ArmState::Zero);
  EXPECT_THROW(ucbsm_index(s, {}, 10, policy(PolicyKind::UcbSm)), ValidationError);
}

TEST(UcbSmIndex, DefaultConstantFromMinimumSigma) {
  const BanditInstance inst = preset("scenario1");
  const PolicyConfig p = resolve_for(policy(PolicyKind::UcbSm), inst.summary());
  ASSERT_TRUE(p.ucb_sm_constant.has_value());
  EXPECT_NEAR(*p.ucb_sm_constant, 360.0 / 0.8, 1e-12);
  PolicyConfig fixed = policy(PolicyKind::UcbSm);
  fixed.ucb_sm_constant = 3.0;
  EXPECT_EQ(*resolve_for(fixed, inst.summary()).ucb_sm_constant, 3.0);
}

TEST(StpIndex, StateZeroUsesUpperBoundOnP01) {
  const ArmStatistics s = stats_of(10, 5, 10, 4, 9.0, ArmState::Zero);
  const std::int64_t t = 20000;
  const double c = log_f(static_cast<double>(t)) / 20.0;
  const double p = kl_ucb_upper(0.5, ConfidenceBudget(c));
  const IndexValue mc = klucbmc_index(s, {}, t, policy(PolicyKind::KlUcbMc));
  EXPECT_EQ(mc.phase, Phase::Stp);
  EXPECT_NEAR(mc.value, p / (p + 0.4), 1e-15);
  EXPECT_GT(mc.value, 5.0 / 9.0);
  // |0.5 + 0.4 - 1| = 0.1 beats 19999^(-1/4), so the adaptive rule is in STP too.
  const IndexValue tv = tvklucb_index(s, {}, t, policy(PolicyKind::TvKlUcb));
  EXPECT_EQ(tv.phase, Phase::Stp);
  EXPECT_EQ(tv.value, mc.value);
}

TEST(StpIndex, StateOneUsesLowerBoundOnP10) {
  const ArmStatistics s = stats_of(10, 5, 10, 4, 9.0, ArmState::One);
  const std::int64_t t = 500;
  const double q = kl_lcb_lower(0.4, ConfidenceBudget(log_f(500.0) / 20.0));
  EXPECT_NEAR(klucbmc_index(s, {}, t, policy(PolicyKind::KlUcbMc)).value, 0.5 / (0.5 + q), 1e-15);
}

TEST(StpIndex, FreshInitializationCorner) {
  const ArmStatistics s = stats_of(1, 1, 1, 1, 1.0, ArmState::One);
  EXPECT_EQ(klucbmc_index(s, {}, 1, policy(PolicyKind::KlUcbMc)).value, 0.5);
}

TEST(StpIndex, ZeroBudgetGivesPlugInMean) {
  const ArmStatistics s = stats_of(10, 3, 10, 7, 5.0, ArmState::Zero);
  EXPECT_NEAR(klucbmc_index(s, {}, 1, policy(PolicyKind::KlUcbMc)).value, 0.3, 1e-15);
}

TEST(StpIndex, MarkovChainRuleIgnoresIidArms) {
  const ArmStatistics s = stats_of(10, 5, 10, 5, 10.0, ArmState::Zero);
  for (std::int64_t t : {2, 100, 100000}) {
    EXPECT_EQ(klucbmc_index(s, {}, t, policy(PolicyKind::KlUcbMc)).phase, Phase::Stp);
    EXPECT_EQ(tvklucb_index(s, {}, t, policy(PolicyKind::TvKlUcb)).phase, Phase::Sm);
  }
}

TEST(StpIndex, DegenerateRatioResolvesToTopReward) {
  PolicyConfig p = policy(PolicyKind::KlUcbMc);
  p.estimator_init = 0.0;
  const ArmStatistics s = stats_of(0, 0, 3, 0, 3.0 * 0.7, ArmState::One);
  EXPECT_EQ(klucbmc_index(s, RewardMap{0.1, 0.7}, 10, p).value, 0.7);
}

TEST(StpIndex, NonUnitRewards) {
  const RewardMap r{0.1, 0.7};
  const ArmStatistics s = stats_of(10, 3, 10, 7, 5.0, ArmState::Zero);
  EXPECT_NEAR(klucbmc_index(s, r, 1, policy(PolicyKind::KlUcbMc)).value, (0.1 * 0.7 + 0.7 * 0.3) / 1.0, 1e-15);
}

TEST(Indices, Optimism) {
  RandomStream rng(12);
  for (int k = 0; k < 5000; ++k) {
    const auto n0 = static_cast<std::int64_t>(1 + rng.below(50));
    const auto n1 = static_cast<std::int64_t>(1 + rng.below(50));
    const auto t01 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n0) + 1));
    const auto t10 = static_cast<std::int64_t>(1 + rng.below(static_cast<std::uint64_t>(n1)));
    const double reward = static_cast<double>(rng.below(static_cast<std::uint64_t>(n0 + n1) + 1));
    const ArmStatistics s = stats_of(n0, t01, n1, t10, reward, ArmState::Zero);
    const auto t = static_cast<std::int64_t>(2 + rng.below(100000));
    const Estimates e = estimates(s, 1.0);
    const IndexValue tv = tvklucb_index(s, {}, t, policy(PolicyKind::TvKlUcb));
    if (tv.phase == Phase::Sm) {
      EXPECT_GE(tv.value, e.mu_hat);
    }
    const IndexValue mc = klucbmc_index(s, {}, t, policy(PolicyKind::KlUcbMc));
    EXPECT_GE(mc.value, e.p01_hat / (e.p01_hat + e.p10_hat) - 1e-15);
  }
}

TEST(Indices, SmPhaseMatchesSampleMeanRuleAlongAnEpisode) {
  const BanditInstance inst = preset("scenario1");
  const PolicyConfig tv = policy(PolicyKind::TvKlUcb);
  const PolicyConfig sm = policy(PolicyKind::KlUcbSm);
  std::vector<ArmStatistics> stats(inst.size());
  std::vector<RandomStream> streams;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    streams.emplace_back(derive_seed(99, i));
    stats[i].last_state = draw_initial_state(inst.arm(i), streams[i]);
  }
  RandomStream ties(5);
  int sm_rounds = 0;
  for (std::int64_t t = 1; t <= 20000; ++t) {
    std::size_t a = static_cast<std::size_t>(t - 1);
    if (t > static_cast<std::int64_t>(inst.size())) {
      std::vector<double> values;
      for (std::size_t i = 0; i < inst.size(); ++i) {
        const IndexValue v = tvklucb_index(stats[i], {}, t, tv);
        if (v.phase == Phase::Sm) {
          ++sm_rounds;
          EXPECT_NEAR(v.value, klucbsm_index(stats[i], {}, t, sm), 1e-10);
        }
        values.push_back(v.value);
      }
      a = select_arm(values, TieBreak::SeededUniform, ties);
    }
    const StepOutcome o = env_step(inst.arm(a), stats[a].last_state, streams[a]);
    stats[a].record(o.next_state, o.reward);
  }
  EXPECT_GT(sm_rounds, 0);
}

TEST(SelectArm, PicksTheMaximum) {
  RandomStream rng(1);
  const std::vector<double> v{0.2, 0.9, 0.5};
  EXPECT_EQ(select_arm(v, TieBreak::SeededUniform, rng), 1u);
}

TEST(SelectArm, LowestIndexOnTies) {
  RandomStream rng(1);
  const std::vector<double> v{0.7, 0.7};
  EXPECT_EQ(select_arm(v, TieBreak::LowestIndex, rng), 0u);
}

TEST(SelectArm, SeededTieBreakIsReproducible) {
  const std::vector<double> v{0.7, 0.1, 0.7, 0.7};
  RandomStream a(31);
  RandomStream b(31);
  std::vector<std::size_t> picks;
  for (int k = 0; k < 200; ++k) {
    const std::size_t x = select_arm(v, TieBreak::SeededUniform, a);
    EXPECT_EQ(x, select_arm(v, TieBreak::SeededUniform, b));
    EXPECT_NE(x, 1u);
    picks.push_back(x);
  }
  EXPECT_NE(std::count(picks.begin(), picks.end(), 0u), 200);
}

TEST(SelectArm, DrawsOnlyOnTies) {
  RandomStream a(8);
  RandomStream b(8);
  const std::vector<double> v{0.1, 0.3, 0.2};
  for (int k = 0; k < 10; ++k) select_arm(v, TieBreak::SeededUniform, a);
  EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(SelectArm, ScaleInvariance) {
  RandomStream rng(44);
  for (int k = 0; k < 2000; ++k) {
    std::vector<double> v(2 + rng.below(6));
    for (double& x : v) x = rng.uniform();
    const double scale = 1e-3 + 100.0 * rng.uniform();
    std::vector<double> w = v;
    for (double& x : w) x *= scale;
    RandomStream r1(k);
    RandomStream r2(k);
    EXPECT_EQ(select_arm(v, TieBreak::SeededUniform, r1), select_arm(w, TieBreak::SeededUniform, r2));
  }
}

TEST(SelectArm, NanAndMinusInfinityNeverWin) {
  RandomStream rng(1);
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> v{std::nan(""), -inf, 0.1};
  EXPECT_EQ(select_arm(v, TieBreak::LowestIndex, rng), 2u);
  const std::vector<double> none{std::nan(""), -inf};
  EXPECT_THROW(select_arm(none, TieBreak::LowestIndex, rng), ValidationError);
}

TEST(PolicyConfig, DefaultExploration) {
  EXPECT_EQ(policy(PolicyKind::TvKlUcb).effective_exploration(), Exploration::LogF);
  EXPECT_EQ(policy(PolicyKind::KlUcbSm).effective_exploration(), Exploration::LogF);
  EXPECT_EQ(policy(PolicyKind::KlUcbSm2).effective_exploration(), Exploration::PlainLog);
  EXPECT_EQ(policy(PolicyKind::UcbSm).effective_exploration(), Exploration::PlainLog);
}

TEST(PolicyConfig, NamesRoundTrip) {
  for (PolicyKind k : {PolicyKind::TvKlUcb, PolicyKind::KlUcbMc, PolicyKind::UcbSm, PolicyKind::KlUcbSm,
                       PolicyKind::KlUcbSm2}) {
    EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_exploration("log"), Exploration::PlainLog);
  EXPECT_EQ(parse_tie_break("lowest-index"), TieBreak::LowestIndex);
  EXPECT_THROW(parse_policy_kind("thompson"), ValidationError);
}

TEST(PolicyConfig, Validation) {
  PolicyConfig p;
  p.estimator_init = 1.5;
  EXPECT_THROW(p.validate(), ValidationError);
  p.estimator_init = 0.0;
  p.ucb_sm_constant = -1.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Policies, IdenticalSpecsGiveIdenticalActions) {
  for (PolicyKind k : {PolicyKind::TvKlUcb, PolicyKind::KlUcbMc, PolicyKind::UcbSm, PolicyKind::KlUcbSm,
                       PolicyKind::KlUcbSm2}) {
    const ExperimentSpec spec{preset("scenario1"), policy(k), 2000, 1, 17, {}};
    const EpisodeTrace a = run_episode(spec, 0);
    const EpisodeTrace b = run_episode(spec, 0);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) ASSERT_EQ(a.steps[i].arm, b.steps[i].arm) << to_string(k);
  }
}
