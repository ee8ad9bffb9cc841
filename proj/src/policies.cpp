#include "rested/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rested/error.hpp"
#include "rested/kl_math.hpp"

namespace rested {
namespace {

void require_played(const ArmStatistics& stats) {
  if (stats.plays() <= 0) throw ValidationError("index requested for an arm that was never played");
}

double budget_nats(const ArmStatistics& stats, std::int64_t t, const PolicyConfig& config) {
  const double numerator = exploration_numerator(config.effective_exploration(), t);
  return numerator / static_cast<double>(stats.plays());
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

double sm_index(const Estimates& e, const RewardMap& rewards, double budget) {
  const double unit = clamp_unit(rewards.normalize(e.mu_hat));
  return rewards.denormalize(kl_ucb_upper(unit, ConfidenceBudget(budget)));
}

// Stationary mean of the chain with one transition probability replaced by
// its confidence bound. r0 < r1, so the optimistic end is the larger p01 (in
// state 0) or the smaller p10 (in state 1).
double stp_index(const Estimates& e, ArmState state, const RewardMap& rewards, double budget) {
  double up;    // 0 -> 1
  double down;  // 1 -> 0
  if (state == ArmState::Zero) {
    up = kl_ucb_upper(e.p01_hat, ConfidenceBudget(budget));
    down = e.p10_hat;
  } else {
    up = e.p01_hat;
    down = kl_lcb_lower(e.p10_hat, ConfidenceBudget(budget));
  }
  const double denom = up + down;
  if (denom == 0.0) return rewards.r1;
  return (rewards.r0 * down + rewards.r1 * up) / denom;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::TvKlUcb: return "tv-kl-ucb";
    case PolicyKind::KlUcbMc: return "kl-ucb-mc";
    case PolicyKind::UcbSm: return "ucb-sm";
    case PolicyKind::KlUcbSm: return "kl-ucb-sm";
    case PolicyKind::KlUcbSm2: return "kl-ucb-sm2";
  }
  return "?";
}

std::string_view to_string(Exploration exploration) {
  return exploration == Exploration::LogF ? "logf" : "log";
}

std::string_view to_string(TieBreak tie_break) {
  return tie_break == TieBreak::SeededUniform ? "seeded-uniform" : "lowest-index";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (PolicyKind k : {PolicyKind::TvKlUcb, PolicyKind::KlUcbMc, PolicyKind::UcbSm, PolicyKind::KlUcbSm,
                       PolicyKind::KlUcbSm2}) {
    if (name == to_string(k)) return k;
  }
  throw ValidationError("unknown policy '" + std::string(name) +
                        "' (expected tv-kl-ucb, kl-ucb-mc, ucb-sm, kl-ucb-sm or kl-ucb-sm2)");
}

Exploration parse_exploration(std::string_view name) {
  if (name == "logf") return Exploration::LogF;
  if (name == "log") return Exploration::PlainLog;
  throw ValidationError("unknown exploration '" + std::string(name) + "' (expected logf or log)");
}

TieBreak parse_tie_break(std::string_view name) {
  if (name == "seeded-uniform") return TieBreak::SeededUniform;
  if (name == "lowest-index") return TieBreak::LowestIndex;
  throw ValidationError("unknown tie_break '" + std::string(name) +
                        "' (expected seeded-uniform or lowest-index)");
}

void PolicyConfig::validate() const {
  if (ucb_sm_constant && !(*ucb_sm_constant > 0.0 && std::isfinite(*ucb_sm_constant))) {
    throw ValidationError("ucb_sm_constant must be a positive finite number");
  }
  if (!(estimator_init >= 0.0 && estimator_init <= 1.0)) {
    throw ValidationError("estimator_init must lie in [0, 1]");
  }
}

Exploration PolicyConfig::effective_exploration() const noexcept {
  if (exploration) return *exploration;
  return (kind == PolicyKind::KlUcbSm2 || kind == PolicyKind::UcbSm) ? Exploration::PlainLog
                                                                     : Exploration::LogF;
}

double default_ucb_sm_constant(const InstanceSummary& summary) { return 360.0 / summary.min_sigma; }

PolicyConfig resolve_for(const PolicyConfig& config, const InstanceSummary& summary) {
  PolicyConfig out = config;
  out.validate();
  if (!out.ucb_sm_constant) out.ucb_sm_constant = default_ucb_sm_constant(summary);
  return out;
}

double exploration_numerator(Exploration exploration, std::int64_t t) {
  if (t < 1) throw ValidationError("time index must be >= 1");
  const double x = static_cast<double>(t);
  return exploration == Exploration::LogF ? log_f(x) : std::log(x);
}

IndexValue tvklucb_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                         const PolicyConfig& config) {
  require_played(stats);
  const Estimates e = estimates(stats, config.estimator_init);
  const double budget = budget_nats(stats, t, config);
  if (tv_phase(e.p01_hat, e.p10_hat, t) == Phase::Stp) {
    return {stp_index(e, stats.last_state, rewards, budget), Phase::Stp};
  }
  return {sm_index(e, rewards, budget), Phase::Sm};
}

IndexValue klucbmc_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                         const PolicyConfig& config) {
  require_played(stats);
  const Estimates e = estimates(stats, config.estimator_init);
  return {stp_index(e, stats.last_state, rewards, budget_nats(stats, t, config)), Phase::Stp};
}

double klucbsm_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                     const PolicyConfig& config) {
  require_played(stats);
  const Estimates e = estimates(stats, config.estimator_init);
  return sm_index(e, rewards, budget_nats(stats, t, config));
}

double klucbsm2_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                      const PolicyConfig& config) {
  PolicyConfig plain = config;
  if (!plain.exploration) plain.exploration = Exploration::PlainLog;
  return klucbsm_index(stats, rewards, t, plain);
}

double ucbsm_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                   const PolicyConfig& config) {
  require_played(stats);
  if (!config.ucb_sm_constant) {
    throw ValidationError("UCB-SM constant L is unresolved; call resolve_for with the instance first");
  }
  (void)rewards;
  const double mu_hat = stats.reward_sum / static_cast<double>(stats.plays());
  const double numerator = exploration_numerator(config.effective_exploration(), t);
  return mu_hat + std::sqrt(*config.ucb_sm_constant * numerator / static_cast<double>(stats.plays()));
}

IndexValue policy_index(const ArmStatistics& stats, const RewardMap& rewards, std::int64_t t,
                        const PolicyConfig& config) {
  switch (config.kind) {
    case PolicyKind::TvKlUcb: return tvklucb_index(stats, rewards, t, config);
    case PolicyKind::KlUcbMc: return klucbmc_index(stats, rewards, t, config);
    case PolicyKind::UcbSm: return {ucbsm_index(stats, rewards, t, config), Phase::NotApplicable};
    case PolicyKind::KlUcbSm: return {klucbsm_index(stats, rewards, t, config), Phase::NotApplicable};
    case PolicyKind::KlUcbSm2: return {klucbsm2_index(stats, rewards, t, config), Phase::NotApplicable};
  }
  throw ValidationError("unhandled policy kind");
}

std::size_t select_arm(std::span<const double> indices, TieBreak tie_break, RandomStream& rng) {
  double best = -std::numeric_limits<double>::infinity();
  bool any_finite = false;
  for (double v : indices) {
    if (std::isfinite(v)) any_finite = true;
    if (!std::isnan(v) && v > best) best = v;
  }
  if (!any_finite) throw ValidationError("select_arm: no finite index");

  std::size_t first = indices.size();
  std::size_t ties = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] == best) {
      if (ties == 0) first = i;
      ++ties;
    }
  }
  if (ties == 1 || tie_break == TieBreak::LowestIndex) return first;

  std::uint64_t pick = rng.below(ties);
  for (std::size_t i = first; i < indices.size(); ++i) {
    if (indices[i] == best && pick-- == 0) return i;
  }
  return first;
}

IndexReport compute_indices(std::span<const ArmStatistics> stats, std::span<const RewardMap> rewards,
                            std::int64_t t, const PolicyConfig& config, RandomStream& tie_rng) {
  IndexReport report;
  report.values.reserve(stats.size());
  report.phases.reserve(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const IndexValue iv = policy_index(stats[i], rewards[i], t, config);
    report.values.push_back(iv.value);
    report.phases.push_back(iv.phase);
  }
  report.chosen = select_arm(report.values, config.tie_break, tie_rng);
  return report;
}

}  // namespace rested
