#pragma once

// Bernoulli divergences and the scalar KL confidence-bound solvers.
//
// Everything here is in nats. The solvers return the feasible end of the
// final bisection bracket, so bern_kl(p_hat, result) <= budget always holds.

namespace rested {

/// Right-hand side of a KL confidence constraint, log f(t) / T_i in nats.
class ConfidenceBudget {
 public:
  /// Throws ValidationError for negative or non-finite values.
  explicit ConfidenceBudget(double nats);

  double value() const noexcept { return nats_; }

 private:
  double nats_;
};

/// D(p || q) = p log(p/q) + (1-p) log((1-p)/(1-q)), with 0 log 0 = 0.
/// Returns +infinity when q sits on a boundary that p does not.
double bern_kl(double p, double q);

/// Total-variation distance between Bernoulli(a) and Bernoulli(b).
double bern_tv(double a, double b);

/// log f(t) with f(t) = 1 + t log^2 t. Requires t >= 1.
double log_f(double t);

/// max { q in [p_hat, 1] : D(p_hat || q) <= budget }.
double kl_ucb_upper(double p_hat, ConfidenceBudget budget);

/// min { q in [0, p_hat] : D(p_hat || q) <= budget }.
double kl_lcb_lower(double p_hat, ConfidenceBudget budget);

namespace solver {
inline constexpr double kTolerance = 1e-12;
inline constexpr int kMaxIterations = 200;
}  // namespace solver

}  // namespace rested
