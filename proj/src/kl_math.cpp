#include "rested/kl_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rested/error.hpp"

namespace rested {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

// Bisection on a monotone predicate over [feasible, infeasible]. The bracket
// end that satisfies the constraint is returned. Stops when the bracket is
// narrower than the tolerance and the KL residual is within tolerance too, or
// when the bracket can no longer be split in double precision.
// Ends that differ by orders of magnitude are split geometrically first, so a
// root near 0 is reached well within the iteration cap.
double midpoint(double a, double b) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (lo > 0.0 && hi > 4.0 * lo) return std::sqrt(lo) * std::sqrt(hi);
  return 0.5 * (a + b);
}

template <typename Kl>
double bisect(double feasible, double infeasible, double budget, Kl kl) {
  for (int iter = 0; iter < solver::kMaxIterations; ++iter) {
    const double mid = midpoint(feasible, infeasible);
    if (mid == feasible || mid == infeasible) break;
    if (kl(mid) <= budget) {
      feasible = mid;
    } else {
      infeasible = mid;
    }
    if (std::abs(infeasible - feasible) <= solver::kTolerance &&
        budget - kl(feasible) <= solver::kTolerance) {
      break;
    }
  }
  return feasible;
}

}  // namespace

ConfidenceBudget::ConfidenceBudget(double nats) : nats_(nats) {
  if (!(nats >= 0.0) || !std::isfinite(nats)) {
    throw ValidationError("confidence budget must be finite and >= 0, got " + std::to_string(nats));
  }
}

double bern_kl(double p, double q) {
  require_probability(p, "p");
  require_probability(q, "q");
  if (p == q) return 0.0;

  double value = 0.0;
  if (p > 0.0) {
    if (q == 0.0) return kInf;
    // p / q overflows when q is subnormal; the log difference does not.
    const double ratio = p / q;
    value += p * (std::isfinite(ratio) ? std::log(ratio) : std::log(p) - std::log(q));
  }
  if (p < 1.0) {
    if (q == 1.0) return kInf;
    value += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  // Rounding can leave a tiny negative value when p and q are adjacent.
  return std::max(value, 0.0);
}

double bern_tv(double a, double b) {
  require_probability(a, "a");
  require_probability(b, "b");
  return std::abs(a - b);
}

double log_f(double t) {
  if (!(t >= 1.0)) {
    throw ValidationError("log_f requires t >= 1, got " + std::to_string(t));
  }
  const double lt = std::log(t);
  return std::log1p(t * lt * lt);
}

double kl_ucb_upper(double p_hat, ConfidenceBudget budget) {
  require_probability(p_hat, "p_hat");
  const double c = budget.value();
  if (c == 0.0 || p_hat == 1.0) return p_hat;

  // Pinsker: D(p||q) >= 2 (q-p)^2, so nothing beyond p + sqrt(c/2) is feasible.
  const double cap = std::min(1.0, p_hat + std::sqrt(0.5 * c));
  if (bern_kl(p_hat, cap) <= c) return cap;
  return bisect(p_hat, cap, c, [p_hat](double q) { return bern_kl(p_hat, q); });
}

double kl_lcb_lower(double p_hat, ConfidenceBudget budget) {
  require_probability(p_hat, "p_hat");
  const double c = budget.value();
  if (c == 0.0 || p_hat == 0.0) return p_hat;

  double floor = std::max(0.0, p_hat - std::sqrt(0.5 * c));
  if (bern_kl(p_hat, floor) <= c) return floor;
  if (floor == 0.0) {
    // D(p||q) >= p log(p/q) + (1-p) log(1-p), so this q is still infeasible.
    const double tail = p_hat < 1.0 ? (1.0 - p_hat) * std::log1p(-p_hat) : 0.0;
    const double q0 = p_hat * std::exp(-(c - tail) / p_hat - std::log(2.0));
    if (q0 > 0.0) {
      floor = q0;
    } else {
      // The root lies below every positive double when the smallest one is
      // still feasible; that double is then the tightest feasible answer.
      const double tiny = std::numeric_limits<double>::denorm_min();
      if (bern_kl(p_hat, tiny) <= c) return tiny;
      floor = tiny;
    }
  }
  return bisect(p_hat, floor, c, [p_hat](double q) { return bern_kl(p_hat, q); });
}

}  // namespace rested
