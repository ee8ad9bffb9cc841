#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rested/bandit_core.hpp"
#include "rested/random.hpp"

namespace rested {

enum class PolicyKind { TvKlUcb, KlUcbMc, UcbSm, KlUcbSm, KlUcbSm2 };

/// Numerator of the confidence budget: log f(t) or plain log t.
enum class Exploration { LogF, PlainLog };

enum class TieBreak { SeededUniform, LowestIndex };

std::string_view to_string(PolicyKind kind);
std::string_view to_string(Exploration exploration);
std::string_view to_string(TieBreak tie_break);
PolicyKind parse_policy_kind(std::string_view name);
Exploration parse_exploration(std::string_view name);
TieBreak parse_tie_break(std::string_view name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::TvKlUcb;
  /// Unset means the kind's default: PlainLog for KL-UCB-SM2 and UCB-SM,
  /// LogF for the others.
  std::optional<Exploration> exploration;
  /// UCB-SM constant L. Unset means 360 / min_i sigma_i of the instance the
  /// policy is run on (see resolve_for).
  std::optional<double> ucb_sm_constant;
  TieBreak tie_break = TieBreak::SeededUniform;
  /// Value of a transition estimate whose source state has never been left.
  double estimator_init = 1.0;

  void validate() const;
  Exploration effective_exploration() const noexcept;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

/// L = 360 / min_i sigma_i.
double default_ucb_sm_constant(const InstanceSummary& summary);

/// Copy of config with every instance-dependent default filled in.
PolicyConfig resolve_for(const PolicyConfig& config, const InstanceSummary& summary);

/// What the learner knows about an arm's rewards: the value of each state.
struct RewardMap {
  double r0 = 0.0;
  double r1 = 1.0;

  double normalize(double reward) const noexcept { return (reward - r0) / (r1 - r0); }
  double denormalize(double unit) const noexcept { return r0 + (r1 - r0) * unit; }
};

inline RewardMap reward_map(const ArmParams& arm) noexcept { return {arm.r0, arm.r1}; }

struct IndexValue {
  double value;
  Phase phase;
};

/// Budget numerator at time t.
double exploration_numerator(Exploration exploration, std::int64_t t);

/// TV-KL-UCB: phase test, then the transition-probability index (STP) or the
/// sample-mean KL-UCB index (SM).
IndexValue tvklucb_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                         const PolicyConfig& config);

/// KL-UCB-MC: the STP index unconditionally.
IndexValue klucbmc_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                         const PolicyConfig& config);

/// KL-UCB on the sample mean with budget log f(t) / T_i (or the override).
double klucbsm_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                     const PolicyConfig& config);

/// KL-UCB on the sample mean with budget log t / T_i (or the override).
double klucbsm2_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                      const PolicyConfig& config);

/// mu_hat + sqrt(L log t / T_i).
double ucbsm_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                   const PolicyConfig& config);

/// Dispatch on config.kind. Baselines report Phase::NotApplicable.
IndexValue policy_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                        const PolicyConfig& config);

/// Argmax with tie-breaking. NaN and -inf never win; throws ValidationError
/// when no index is finite. SeededUniform only consumes a draw on a tie.
std::size_t select_arm(std::span<const double> indices, TieBreak tie_break, RandomStream& rng);

struct IndexReport {
  std::vector<double> values;
  std::vector<Phase> phases;
  std::size_t chosen = 0;
};

IndexReport compute_indices(std::span<const ArmStatistics> stats, std::span<const RewardMap> rewards,
                            std::int64_t t, const PolicyConfig& config, RandomStream& tie_rng);

}  // namespace rested
