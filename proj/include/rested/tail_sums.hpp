#pragma once

// Convergent series that appear as additive constants in the finite-time
// regret bounds. Each is summed term by term until a term falls below
// tol * (partial sum), past the peak of the summand; the rest of the series
// is bounded analytically and reported separately.

#include <cstdint>

namespace rested {

struct TailSum {
  double partial = 0.0;    // sum of the terms actually added
  double remainder = 0.0;  // upper bound on the neglected tail
  std::int64_t terms = 0;  // 0 when a closed form was used instead

  /// partial + remainder: an upper bound on the full series.
  double value() const noexcept { return partial + remainder; }
};

inline constexpr double kDefaultTailTolerance = 1e-16;

/// sum_{t>=1} (t+1)^3 exp(-2 (t-1) a), a > 0. With a = eps^2 sigma^2 this is
/// the occupancy-deviation family. Falls back to the closed form when the
/// peak of the summand is too far out to sum directly.
TailSum poly_exp_sum(double a, double tol = kDefaultTailTolerance);

/// Closed form of poly_exp_sum. With x = exp(-2a),
/// sum_{m>=2} m^3 x^(m-2) = (x (1 + 4x + x^2) / (1-x)^4 - x) / x^2.
double poly_exp_sum_closed(double a);

/// sum_{t>=1} exp(-b sqrt(t)), b > 0.
TailSum stretched_exp_sum(double b, double tol = kDefaultTailTolerance);

/// sum_{t>=1} (t+1)^3 exp(-2 sqrt(t-1)).
TailSum poly_stretched_sum(double tol = kDefaultTailTolerance);

}  // namespace rested
