#include "rested/tail_sums.hpp"

#include <array>
#include <cmath>
#include <string>

#include "rested/error.hpp"

namespace rested {
namespace {

// Neumaier-compensated running sum; some series add millions of terms.
class Accumulator {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_tolerance(double tol) {
  if (!(tol > 0.0 && tol < 1.0)) {
    throw ValidationError("tail truncation tolerance must lie in (0, 1), got " + std::to_string(tol));
  }
}

// Beyond this many terms before the peak we switch to the closed form.
constexpr double kMaxDirectPeak = 5e6;

// int_U^inf P(u) e^{-c u} du = e^{-cU} sum_k P^(k)(U) / c^(k+1), P given by
// coefficients in increasing degree.
template <std::size_t N>
double poly_exp_integral(std::array<double, N> coeff, double c, double U) {
  double total = 0.0;
  double cpow = c;
  for (std::size_t k = 0; k < N; ++k) {
    double p = 0.0;
    for (std::size_t j = N; j-- > 0;) p = p * U + coeff[j];
    total += p / cpow;
    for (std::size_t j = 1; j < N; ++j) coeff[j - 1] = coeff[j] * static_cast<double>(j);
    coeff[N - 1] = 0.0;
    cpow *= c;
  }
  return std::exp(-c * U) * total;
}

}  // namespace

double poly_exp_sum_closed(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ValidationError("series rate must be positive and finite, got " + std::to_string(a));
  }
  const double x = std::exp(-2.0 * a);
  const double one_minus_x = -std::expm1(-2.0 * a);
  const double d2 = one_minus_x * one_minus_x;
  return (x * (1.0 + 4.0 * x + x * x) / (d2 * d2) - x) / (x * x);
}

TailSum poly_exp_sum(double a, double tol) {
  require_tolerance(tol);
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ValidationError("series rate must be positive and finite, got " + std::to_string(a));
  }
  const double peak = 1.5 / a;  // (t+1)^3 e^{-2ta} is largest at t+1 = 3/(2a)
  if (peak > kMaxDirectPeak) return {poly_exp_sum_closed(a), 0.0, 0};

  const double decay = std::exp(-2.0 * a);
  Accumulator acc;
  for (std::int64_t t = 1;; ++t) {
    const double m = static_cast<double>(t + 1);
    const double term = m * m * m * std::exp(-2.0 * static_cast<double>(t - 1) * a);
    acc.add(term);
    if (m > peak && term < tol * acc.value()) {
      // Successive term ratios ((m+1)/m)^3 e^{-2a} decrease from here on, so
      // the tail is dominated by a geometric series with the next ratio.
      const double ratio = std::pow((m + 1.0) / m, 3) * decay;
      if (ratio < 1.0) return {acc.value(), term * ratio / (1.0 - ratio), t};
    }
  }
}

TailSum stretched_exp_sum(double b, double tol) {
  require_tolerance(tol);
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw ValidationError("series rate must be positive and finite, got " + std::to_string(b));
  }
  Accumulator acc;
  for (std::int64_t t = 1;; ++t) {
    const double root = std::sqrt(static_cast<double>(t));
    const double term = std::exp(-b * root);
    acc.add(term);
    if (term < tol * acc.value()) {
      // Decreasing summand: tail <= int_t^inf e^{-b sqrt x} dx.
      const double remainder = 2.0 * term * (root / b + 1.0 / (b * b));
      return {acc.value(), remainder, t};
    }
  }
}

TailSum poly_stretched_sum(double tol) {
  require_tolerance(tol);
  Accumulator acc;
  for (std::int64_t t = 1;; ++t) {
    const double m = static_cast<double>(t + 1);
    const double term = m * m * m * std::exp(-2.0 * std::sqrt(static_cast<double>(t - 1)));
    acc.add(term);
    // The summand decreases for t >= 6.
    if (t >= 10 && term < tol * acc.value()) {
      // Tail <= int_t^inf (x+1)^3 e^{-2 sqrt(x-1)} dx; with x = u^2 + 1 the
      // integrand is (2u^7 + 12u^5 + 24u^3 + 16u) e^{-2u}.
      const std::array<double, 8> p{0.0, 16.0, 0.0, 24.0, 0.0, 12.0, 0.0, 2.0};
      const double remainder = poly_exp_integral(p, 2.0, std::sqrt(static_cast<double>(t - 1)));
      return {acc.value(), remainder, t};
    }
  }
}

}  // namespace rested
