#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rested/random.hpp"

namespace rested {

enum class ArmState : std::uint8_t { Zero = 0, One = 1 };

enum class InitStateRule { Fixed0, Fixed1, Stationary, Uniform };

enum class Phase : std::uint8_t { Stp, Sm, NotApplicable };

std::string_view to_string(InitStateRule rule);
std::string_view to_string(Phase phase);
InitStateRule parse_init_state_rule(std::string_view name);

/// Ground truth for one rested two-state arm.
///
/// Rewards must satisfy r0 < r1. Indices work on the affine image of the
/// reward into [0, 1], which for r = (0, 1) is the identity; with r0 < r1 the
/// state-1 reward is the optimistic one, which is what makes the state-0 and
/// state-1 index formulas maximize at the confidence-bound endpoints.
struct ArmParams {
  double p01 = 0.5;
  double p10 = 0.5;
  double r0 = 0.0;
  double r1 = 1.0;
  InitStateRule init_state = InitStateRule::Stationary;

  /// Throws ValidationError unless 0 < p01, p10 <= 1, rewards finite and r0 < r1.
  void validate() const;

  double sigma() const noexcept { return p01 + p10; }
  double stationary0() const noexcept { return p10 / (p01 + p10); }
  double stationary1() const noexcept { return p01 / (p01 + p10); }
  double mean_reward() const noexcept { return r0 * stationary0() + r1 * stationary1(); }
  double reward(ArmState s) const noexcept { return s == ArmState::One ? r1 : r0; }

  /// True iff |p01 + p10 - 1| < tol, i.e. the reward sequence is i.i.d.
  bool is_iid(double tol = 1e-12) const noexcept;

  double normalize(double reward) const noexcept { return (reward - r0) / (r1 - r0); }
  double denormalize(double unit) const noexcept { return r0 + (r1 - r0) * unit; }

  friend bool operator==(const ArmParams&, const ArmParams&) = default;
};

/// Per-arm counts observed by the learner.
///
/// Playing an arm moves it from last_state to a freshly drawn state; the
/// play is counted against the state it left (plays0/plays1), the move is
/// counted as a transition when the state changes, and the reward is that of
/// the new state.
struct ArmStatistics {
  std::int64_t plays0 = 0;
  std::int64_t plays1 = 0;
  std::int64_t trans01 = 0;
  std::int64_t trans10 = 0;
  double reward_sum = 0.0;
  ArmState last_state = ArmState::Zero;

  std::int64_t plays() const noexcept { return plays0 + plays1; }
  void record(ArmState next, double reward) noexcept;

  friend bool operator==(const ArmStatistics&, const ArmStatistics&) = default;
};

struct Estimates {
  double p01_hat;
  double p10_hat;
  double mu_hat;
};

/// Empirical transition probabilities and sample mean. A transition row never
/// visited takes init_value. Throws ValidationError if the arm was never played.
Estimates estimates(const ArmStatistics& stats, double init_value);

/// The phase test on explicit estimates: Stp iff |p01 + p10 - 1| > (t-1)^(-1/4).
/// Requires t >= 2.
Phase tv_phase(double p01_hat, double p10_hat, std::int64_t t);

/// tv_phase applied to the arm's estimates.
Phase tv_test(const ArmStatistics& stats, std::int64_t t, double init_value);

struct StepOutcome {
  ArmState next_state;
  double reward;
};

/// One rested transition of a played arm.
StepOutcome env_step(const ArmParams& arm, ArmState current, RandomStream& rng);

/// Initial state according to arm.init_state. Consumes one draw for the
/// random rules and none for the fixed ones.
ArmState draw_initial_state(const ArmParams& arm, RandomStream& rng);

/// Derived per-instance quantities.
struct InstanceSummary {
  std::vector<double> mean;         // mu_i in reward units
  std::vector<double> gap;          // Delta_i = mu_best - mu_i
  std::vector<double> sigma;        // eigenvalue gap p01 + p10
  std::vector<double> stationary0;  // pi_i(0)
  std::size_t best = 0;
  double best_mean = 0.0;
  double min_sigma = 0.0;
};

/// At least two valid arms with a unique best mean.
class BanditInstance {
 public:
  /// Means closer than this are treated as a tie.
  static constexpr double kTieTolerance = 1e-12;

  explicit BanditInstance(std::vector<ArmParams> arms);

  std::span<const ArmParams> arms() const noexcept { return arms_; }
  const ArmParams& arm(std::size_t i) const { return arms_.at(i); }
  std::size_t size() const noexcept { return arms_.size(); }
  const InstanceSummary& summary() const noexcept { return summary_; }

 private:
  std::vector<ArmParams> arms_;
  InstanceSummary summary_;
};

/// Throws ValidationError when the instance is invalid or the best arm is not
/// unique.
InstanceSummary instance_summary(std::span<const ArmParams> arms);

inline const InstanceSummary& instance_summary(const BanditInstance& instance) {
  return instance.summary();
}

}  // namespace rested
