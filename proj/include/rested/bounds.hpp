#pragma once

// Closed-form regret bounds for TV-KL-UCB and UCB-SM, and the lower bound for
// uniformly good policies.
//
// All arms must share one reward map (r0, r1). KL arguments are the
// state-1 stationary probabilities p01 / (p01 + p10); gaps are in reward
// units. For r = (0, 1) these coincide with the textbook quantities.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rested/bandit_core.hpp"
#include "rested/tail_sums.hpp"

namespace rested {

/// The four arm configurations of the upper bound: (a) both the best arm and
/// arm i Markovian, (b) i.i.d. best and Markovian arm i, (c) Markovian best
/// and i.i.d. arm i, (d) both i.i.d. Auto picks per arm.
enum class BoundCase { A, B, C, D, Auto };

std::string_view to_string(BoundCase c);
BoundCase parse_bound_case(std::string_view name);

/// I(M_i || M_j) = pi_i(0) D(p01_i || p01_j) + pi_i(1) D(p10_i || p10_j).
double kl_rate(const ArmParams& arm_i, const ArmParams& arm_j);

struct LowerBound {
  std::vector<double> per_arm;  // 0 for the best arm
  double total = 0.0;
};

/// sum_{i != best} Delta_i / I(M_i || M_best).
LowerBound regret_lower_bound(std::span<const ArmParams> arms);

/// Case of the (best, arm) pair under the i.i.d. threshold |sigma - 1| < 1e-12.
BoundCase classify_pair(const ArmParams& best, const ArmParams& arm);

struct BoundConfig {
  std::int64_t horizon = 0;
  /// Unset epsilons default to log(n)^(-1/4).
  std::optional<double> epsilon1;
  std::optional<double> epsilon_p;
  std::optional<double> epsilon_q;
  std::optional<double> epsilon_mu;
  double tail_truncation_tol = kDefaultTailTolerance;

  double default_epsilon() const;
  double eps1() const { return epsilon1.value_or(default_epsilon()); }
  double eps_p() const { return epsilon_p.value_or(default_epsilon()); }
  double eps_q() const { return epsilon_q.value_or(default_epsilon()); }
  double eps_mu() const { return epsilon_mu.value_or(default_epsilon()); }

  /// Throws ValidationError unless n >= 3 and every epsilon lies in (0, 1).
  void validate() const;
};

struct FiniteTimeTerms {
  double tv_warmup = 0.0;      // t_{k,i}: phase-test burn-in
  double kl_terms = 0.0;       // log f(n) / D(shifted) terms of tau_{k,i}
  double tau = 0.0;            // tv_warmup + kl_terms
  double epsilon_terms = 0.0;  // closed 1/eps^2 terms
  double tail_terms = 0.0;     // weighted convergent series
  double pulls = 0.0;          // bound on E[T_i(n)]
  double regret = 0.0;         // Delta_i * pulls
};

struct ArmBound {
  std::size_t arm = 0;  // zero-based
  BoundCase bound_case = BoundCase::A;
  double gap = 0.0;
  double asymptotic = 0.0;  // coefficient of log n
  /// Terms removed because their indicator is 0 (the KL point leaves (0, 1)).
  std::vector<std::string> dropped;
  std::optional<FiniteTimeTerms> finite;
};

struct BoundReport {
  std::string case_label;  // "a".."d", or "mixed" when arms fall in different cases
  std::vector<ArmBound> arms;  // suboptimal arms only, in arm order
  double asymptotic_total = 0.0;
  std::optional<double> finite_total;
  std::int64_t horizon = 0;
  double epsilon1 = 0.0;
  double epsilon_p = 0.0;
  double epsilon_q = 0.0;
  double epsilon_mu = 0.0;
};

/// Asymptotic coefficient of log n. A forced case is applied to every arm;
/// Auto classifies each (best, arm) pair. Throws DomainError when a KL
/// argument falls outside [0, 1).
BoundReport asymptotic_upper_bound(std::span<const ArmParams> arms, BoundCase requested);

/// The full finite-time bound at n = config.horizon. Throws DomainError when
/// an epsilon is outside the range the bound is proved for: eps1 must be
/// below |sigma - 1| / 2 for every Markovian arm involved, and every shifted
/// KL argument must stay inside (0, 1) on the correct side.
BoundReport finite_time_upper_bound(std::span<const ArmParams> arms, BoundCase requested,
                                    const BoundConfig& config);

/// sum_{i != best} 4 L / Delta_i with L = 360 / min_i sigma_i.
double ucb_sm_upper_bound(std::span<const ArmParams> arms);

struct Dominance {
  bool dominates = false;  // asymptotic (Auto) <= UCB-SM bound
  double margin = 0.0;     // UCB-SM bound / asymptotic bound
  double tvklucb = 0.0;
  double ucb_sm = 0.0;
};

Dominance dominance_check(std::span<const ArmParams> arms);

/// Constants shared by every finite-time bound.
double stretched_constant(double tol = kDefaultTailTolerance);  // sum e^{-(2/9) sqrt t}
double poly_stretched_constant(double tol = kDefaultTailTolerance);  // sum (t+1)^3 e^{-2 sqrt(t-1)}

}  // namespace rested
