#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rested/bandit_core.hpp"
#include "rested/policies.hpp"

namespace rested {

struct ExperimentSpec {
  BanditInstance instance;
  PolicyConfig policy;
  std::int64_t horizon = 0;
  std::int64_t replications = 1;
  std::uint64_t base_seed = 0;
  /// Sorted, strictly increasing, last element == horizon. Empty means
  /// default_checkpoints(horizon).
  std::vector<std::int64_t> checkpoints;
  /// Paired: the arm streams depend only on (seed, replication, arm), so two
  /// policies see the same chain realizations. Unpaired mixes the policy kind in.
  bool paired = true;
  /// Worker threads for replications; 0 picks the hardware concurrency.
  unsigned threads = 0;

  /// Throws ValidationError on a bad horizon, replication count or grid.
  void validate() const;
  /// checkpoints, or the default grid when empty.
  std::vector<std::int64_t> effective_checkpoints() const;
};

/// Up to `count` logarithmically spaced times from min(10, n) to n, rounded
/// and deduplicated, always ending at n.
std::vector<std::int64_t> default_checkpoints(std::int64_t horizon, std::size_t count = 20);

struct EpisodeStep {
  std::int64_t t;
  std::uint32_t arm;  // zero-based
  ArmState state;     // state the arm moved to
  double reward;
  Phase phase;        // chosen arm's phase; NotApplicable during round-robin
};

struct EpisodeTrace {
  std::vector<EpisodeStep> steps;
  /// Per index round, the K index values in arm order (only when requested).
  std::vector<double> indices;
  std::vector<ArmStatistics> final_stats;
};

/// One episode: K round-robin plays, then n - K index-driven plays. Fully
/// determined by (spec, replication). Throws ValidationError if n < K.
EpisodeTrace run_episode(const ExperimentSpec& spec, std::int64_t replication, bool record_indices = false);

struct ExperimentResult {
  std::vector<std::int64_t> checkpoints;
  std::int64_t horizon = 0;
  std::int64_t replications = 0;
  std::uint64_t base_seed = 0;
  std::size_t arms = 0;
  PolicyConfig policy;  // resolved against the instance

  // Indexed by checkpoint.
  std::vector<double> mean_regret;
  std::vector<double> std_regret;  // sample std across replications, 0 when R = 1
  std::vector<double> mean_pseudo_regret;
  std::vector<double> std_pseudo_regret;
  /// [checkpoint][arm] mean pulls T_i(t).
  std::vector<std::vector<double>> mean_pulls;
  /// [checkpoint][arm] rounds in (previous checkpoint, checkpoint] during
  /// which the arm was in each phase, summed over replications.
  std::vector<std::vector<std::int64_t>> stp_rounds;
  std::vector<std::vector<std::int64_t>> sm_rounds;
  /// [replication][checkpoint] realized regret, for paired comparisons.
  std::vector<std::vector<double>> replication_regret;

  /// SM share of the phase-tested rounds of one arm in one checkpoint
  /// interval; 0 when the policy has no phases.
  double sm_fraction(std::size_t checkpoint, std::size_t arm) const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

struct PhaseReport {
  std::int64_t from = 0;
  std::int64_t to = 0;
  std::vector<std::int64_t> rounds;  // phase-tested rounds per arm
  std::vector<double> stp_fraction;
  std::vector<double> sm_fraction;
};

/// Phase fractions per arm over rounds (from, to]. Both ends must be 0 or a
/// checkpoint of the result. A zero-length window gives an empty report.
PhaseReport phase_report(const ExperimentResult& result, std::int64_t from, std::int64_t to);

struct ConcentrationRow {
  std::int64_t t = 0;
  // |N0(t)/(t-1) - pi0| > eps
  double occupancy_freq = 0.0;
  double occupancy_cumulative = 0.0;  // sum over s <= t of the frequency
  double occupancy_bound = 0.0;
  // |P01_hat(t) - p01| > eps and |P10_hat(t) - p10| > eps
  double estimate01_freq = 0.0;
  double estimate01_cumulative = 0.0;
  double estimate10_freq = 0.0;
  double estimate10_cumulative = 0.0;
  double estimate_bound = 0.0;
  // Mean number of s <= t with p_tilde*_s < p01 - eps (upper) and
  // q_tilde*_s > p10 + eps (lower).
  double upper_cumulative = 0.0;
  double lower_cumulative = 0.0;
  double confidence_bound = 0.0;

  /// Smallest bound - cumulative over the five comparisons.
  double worst_slack() const;
};

struct ConcentrationReport {
  ArmParams arm;
  double epsilon = 0.0;
  std::int64_t chains = 0;
  std::vector<ConcentrationRow> rows;

  bool violated() const;
  double worst_slack() const;
};

/// Monte Carlo check of the occupancy, estimate and confidence-bound
/// deviation inequalities for one arm. Chains start from the stationary law.
/// Requires chains >= 100 and a sorted grid of times >= 1.
ConcentrationReport concentration_suite(const ArmParams& arm, const std::vector<std::int64_t>& t_grid,
                                        double epsilon, std::int64_t chains, std::uint64_t seed,
                                        unsigned threads = 0);

}  // namespace rested
