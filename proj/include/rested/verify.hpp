#pragma once

// Property suites behind the `verify` subcommand. Each suite counts checks and
// violations and tracks the worst slack (how far the tightest check was from
// failing; negative means a violation).

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rested/bandit_core.hpp"
#include "rested/random.hpp"

namespace rested {

struct SuiteReport {
  std::string name;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  double worst_slack = 0.0;
  std::vector<std::string> notes;

  bool passed() const noexcept { return checks > 0 && violations == 0; }
  /// Records one check; slack < tolerance_floor counts as a violation.
  void record(double slack, double tolerance_floor = 0.0);
};

std::span<const std::string_view> suite_names();

/// Runs a suite by name. `samples` is the suite's size knob: random triples,
/// random solver inputs, chains, replications or instances. Throws
/// ValidationError for an unknown name.
SuiteReport run_suite(std::string_view name, std::int64_t samples, std::uint64_t seed);

/// Pinsker and the two shifted-divergence inequalities on random triples.
SuiteReport verify_pinsker(std::int64_t samples, std::uint64_t seed);

/// Closed forms of both solvers and the KL residual on random inputs.
SuiteReport verify_solver(std::int64_t samples, std::uint64_t seed);

/// concentration_suite on Scenario 1 arm 1 and an i.i.d. arm at eps = 0.05
/// over t in {100, 1000, 10000}.
SuiteReport verify_concentration(std::int64_t chains, std::uint64_t seed);

/// Phase occupancy on [n/2, n], n = 1e5: STP share <= 5% on every arm of an
/// all-i.i.d. instance, SM share <= 5% on every arm of Scenario 1.
SuiteReport verify_phase(std::int64_t replications, std::uint64_t seed);

/// Asymptotic bound <= UCB-SM bound on random Markovian instances with
/// min sigma >= 1/1440 and on random i.i.d. instances.
SuiteReport verify_dominance(std::int64_t instances, std::uint64_t seed);

/// 2 to 5 Markovian arms with |sigma - 1| >= 1e-6, sigma >= min_sigma, r = (0, 1)
/// and a best arm ahead of the runner-up by at least 1e-9.
std::vector<ArmParams> random_markov_instance(RandomStream& rng, double min_sigma);

/// 2 to 5 i.i.d. arms with means in (0, 1), unique best as above.
std::vector<ArmParams> random_iid_instance(RandomStream& rng);

/// Means of the all-i.i.d. instance used by the phase checks.
std::vector<double> phase_iid_means();

}  // namespace rested
