#include "rested/bandit_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rested/error.hpp"
#include "rested/kl_math.hpp"

namespace rested {

std::string_view to_string(InitStateRule rule) {
  switch (rule) {
    case InitStateRule::Fixed0: return "fixed0";
    case InitStateRule::Fixed1: return "fixed1";
    case InitStateRule::Stationary: return "stationary";
    case InitStateRule::Uniform: return "uniform";
  }
  return "?";
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Stp: return "STP";
    case Phase::Sm: return "SM";
    case Phase::NotApplicable: return "NA";
  }
  return "?";
}

InitStateRule parse_init_state_rule(std::string_view name) {
  if (name == "fixed0") return InitStateRule::Fixed0;
  if (name == "fixed1") return InitStateRule::Fixed1;
  if (name == "stationary") return InitStateRule::Stationary;
  if (name == "uniform") return InitStateRule::Uniform;
  throw ValidationError("unknown init_state '" + std::string(name) +
                        "' (expected fixed0, fixed1, stationary or uniform)");
}

void ArmParams::validate() const {
  if (!(p01 > 0.0 && p01 <= 1.0) || !(p10 > 0.0 && p10 <= 1.0)) {
    throw ValidationError("transition probabilities must lie in (0, 1], got p01=" +
                          std::to_string(p01) + " p10=" + std::to_string(p10));
  }
  if (!std::isfinite(r0) || !std::isfinite(r1) || !(r0 < r1)) {
    throw ValidationError("state rewards must be finite with r0 < r1, got r0=" + std::to_string(r0) +
                          " r1=" + std::to_string(r1));
  }
}

bool ArmParams::is_iid(double tol) const noexcept { return std::abs(p01 + p10 - 1.0) < tol; }

void ArmStatistics::record(ArmState next, double reward) noexcept {
  if (last_state == ArmState::Zero) {
    ++plays0;
    if (next == ArmState::One) ++trans01;
  } else {
    ++plays1;
    if (next == ArmState::Zero) ++trans10;
  }
  reward_sum += reward;
  last_state = next;
}

Estimates estimates(const ArmStatistics& stats, double init_value) {
  if (stats.plays() <= 0) {
    throw ValidationError("estimates need at least one play of the arm");
  }
  if (!(init_value >= 0.0 && init_value <= 1.0)) {
    throw ValidationError("estimator init value must lie in [0, 1]");
  }
  Estimates e{};
  e.p01_hat = stats.plays0 > 0 ? static_cast<double>(stats.trans01) / static_cast<double>(stats.plays0)
                               : init_value;
  e.p10_hat = stats.plays1 > 0 ? static_cast<double>(stats.trans10) / static_cast<double>(stats.plays1)
                               : init_value;
  e.mu_hat = stats.reward_sum / static_cast<double>(stats.plays());
  return e;
}

Phase tv_phase(double p01_hat, double p10_hat, std::int64_t t) {
  if (t < 2) {
    throw ValidationError("phase test needs t >= 2");
  }
  const double statistic = bern_tv(p01_hat, 1.0 - p10_hat);
  // (t-1)^(-1/4) via two square roots: exact on perfect fourth powers.
  const double threshold = 1.0 / std::sqrt(std::sqrt(static_cast<double>(t - 1)));
  return statistic > threshold ? Phase::Stp : Phase::Sm;
}

Phase tv_test(const ArmStatistics& stats, std::int64_t t, double init_value) {
  const Estimates e = estimates(stats, init_value);
  return tv_phase(e.p01_hat, e.p10_hat, t);
}

StepOutcome env_step(const ArmParams& arm, ArmState current, RandomStream& rng) {
  const double p_one = current == ArmState::Zero ? arm.p01 : 1.0 - arm.p10;
  const ArmState next = rng.bernoulli(p_one) ? ArmState::One : ArmState::Zero;
  return {next, arm.reward(next)};
}

ArmState draw_initial_state(const ArmParams& arm, RandomStream& rng) {
  switch (arm.init_state) {
    case InitStateRule::Fixed0: return ArmState::Zero;
    case InitStateRule::Fixed1: return ArmState::One;
    case InitStateRule::Stationary: return rng.bernoulli(arm.stationary1()) ? ArmState::One : ArmState::Zero;
    case InitStateRule::Uniform: return rng.bernoulli(0.5) ? ArmState::One : ArmState::Zero;
  }
  return ArmState::Zero;
}

InstanceSummary instance_summary(std::span<const ArmParams> arms) {
  if (arms.size() < 2) {
    throw ValidationError("an instance needs at least 2 arms, got " + std::to_string(arms.size()));
  }
  InstanceSummary s;
  s.mean.reserve(arms.size());
  for (std::size_t i = 0; i < arms.size(); ++i) {
    try {
      arms[i].validate();
    } catch (const ValidationError& e) {
      throw ValidationError("arm " + std::to_string(i + 1) + ": " + e.what());
    }
    s.mean.push_back(arms[i].mean_reward());
    s.sigma.push_back(arms[i].sigma());
    s.stationary0.push_back(arms[i].stationary0());
  }

  s.best = static_cast<std::size_t>(std::max_element(s.mean.begin(), s.mean.end()) - s.mean.begin());
  s.best_mean = s.mean[s.best];
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i != s.best && s.best_mean - s.mean[i] <= BanditInstance::kTieTolerance) {
      throw ValidationError("no unique best arm: arms " + std::to_string(s.best + 1) + " and " +
                            std::to_string(i + 1) + " share the maximal mean reward " +
                            std::to_string(s.best_mean));
    }
  }
  s.gap.reserve(arms.size());
  for (double m : s.mean) s.gap.push_back(s.best_mean - m);
  s.min_sigma = *std::min_element(s.sigma.begin(), s.sigma.end());
  return s;
}

BanditInstance::BanditInstance(std::vector<ArmParams> arms)
    : arms_(std::move(arms)), summary_(instance_summary(std::span<const ArmParams>(arms_))) {}

}  // namespace rested
