#include "rested/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rested/error.hpp"
#include "rested/kl_math.hpp"

namespace rested {
namespace {

constexpr double kIidTolerance = 1e-12;

void require_common_rewards(std::span<const ArmParams> arms) {
  for (const ArmParams& a : arms) {
    if (a.r0 != arms.front().r0 || a.r1 != arms.front().r1) {
      throw ValidationError("bounds need every arm to share the same state rewards (r0, r1)");
    }
  }
}

// Probability of the rewarding state under stationarity.
double theta(const ArmParams& a) { return a.stationary1(); }

std::string fmt(double x) { return std::to_string(x); }

void require_kl_point(double x, const char* what) {
  if (!(x >= 0.0 && x < 1.0)) {
    throw DomainError(std::string("KL argument ") + what + " = " + fmt(x) + " lies outside [0, 1)");
  }
}

// Both arguments of a shifted divergence must be proper probabilities and the
// deviation must point the way the proof assumes (x below y or above y).
enum class Side { Below, Above };

double shifted_kl(double x, double y, Side side, const char* what) {
  const bool inside = x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0;
  const bool ordered = side == Side::Below ? x < y : x > y;
  if (!inside || !ordered) {
    throw DomainError(std::string("epsilon too large: shifted KL term ") + what + " has arguments (" +
                      fmt(x) + ", " + fmt(y) + ")");
  }
  return bern_kl(x, y);
}

// 1 / TV^4 burn-in of the phase test for one arm.
double tv_warmup(const ArmParams& a, double eps1) {
  const double s = a.sigma();
  if (a.is_iid(kIidTolerance)) return 0.0;
  const double gap = s < 1.0 ? s - 1.0 + 2.0 * eps1 : s - 1.0 - 2.0 * eps1;
  const double g2 = gap * gap;
  return 1.0 / (g2 * g2);
}

void require_eps_markov(const ArmParams& a, std::size_t index, double eps1) {
  const double half = std::abs(a.sigma() - 1.0) / 2.0;
  if (!(eps1 < half)) {
    throw DomainError("epsilon1 = " + fmt(eps1) + " must be below |p01 + p10 - 1| / 2 = " + fmt(half) +
                      " for arm " + std::to_string(index + 1));
  }
}

ArmBound asymptotic_arm(const ArmParams& best, const ArmParams& arm, std::size_t index, double gap,
                        BoundCase c) {
  ArmBound out;
  out.arm = index;
  out.bound_case = c;
  out.gap = gap;
  double coeff = 0.0;
  switch (c) {
    case BoundCase::A: {
      const double x1 = best.p01 * arm.p10 / best.p10;
      if (x1 < 1.0) {
        coeff += 2.0 / bern_kl(arm.p01, x1);
      } else {
        out.dropped.push_back("p01 term (p01_best * p10_i >= p10_best)");
      }
      const double x2 = best.p10 * arm.p01 / best.p01;
      require_kl_point(x2, "p10_best * p01_i / p01_best");
      coeff += 2.0 / bern_kl(arm.p10, x2);
      break;
    }
    case BoundCase::B: {
      const double mu1 = theta(best);
      const double x1 = mu1 * arm.p10 / (1.0 - mu1);
      if (x1 < 1.0) {
        coeff += 1.0 / bern_kl(arm.p01, x1);
      } else {
        out.dropped.push_back("p01 term (mu_best * p10_i >= 1 - mu_best)");
      }
      const double x2 = arm.p01 * (1.0 - mu1) / mu1;
      require_kl_point(x2, "p01_i (1 - mu_best) / mu_best");
      coeff += 1.0 / bern_kl(arm.p10, x2);
      break;
    }
    case BoundCase::C: {
      const double target = best.p01 / best.sigma();
      require_kl_point(target, "p01_best / sigma_best");
      coeff = 2.0 / bern_kl(theta(arm), target);
      break;
    }
    case BoundCase::D: {
      const double target = theta(best);
      require_kl_point(target, "mu_best");
      coeff = 1.0 / bern_kl(theta(arm), target);
      break;
    }
    case BoundCase::Auto: throw ValidationError("Auto must be resolved before evaluating an arm");
  }
  out.asymptotic = gap * coeff;
  return out;
}

struct SeriesConstants {
  double g;  // sum e^{-(2/9) sqrt t}
  double h;  // sum (t+1)^3 e^{-2 sqrt(t-1)}
};

FiniteTimeTerms finite_arm(const ArmParams& best, std::size_t best_index, const ArmParams& arm,
                           std::size_t index, const ArmBound& ab, const BoundConfig& cfg,
                           const SeriesConstants& k) {
  const double e1 = cfg.eps1();
  const double ep = cfg.eps_p();
  const double eq = cfg.eps_q();
  const double em = cfg.eps_mu();
  const double lf = log_f(static_cast<double>(cfg.horizon));
  const bool keep_p01 = ab.dropped.empty();
  auto S = [&](const ArmParams& a) {
    return poly_exp_sum(e1 * e1 * a.sigma() * a.sigma(), cfg.tail_truncation_tol).value();
  };

  FiniteTimeTerms f;
  switch (ab.bound_case) {
    case BoundCase::A: {
      require_eps_markov(arm, index, e1);
      require_eps_markov(best, best_index, e1);
      f.tv_warmup = tv_warmup(arm, e1) + tv_warmup(best, e1);
      if (keep_p01) {
        f.kl_terms += lf / shifted_kl(arm.p01 + e1, (best.p01 - ep) * (arm.p10 - e1) / (best.p10 + e1),
                                      Side::Below, "1");
        f.kl_terms += lf / shifted_kl(arm.p01 + e1, (best.p01 - e1) * (arm.p10 - e1) / (best.p10 + eq),
                                      Side::Below, "3");
      }
      f.kl_terms += lf / shifted_kl(arm.p10 - e1, (best.p10 + e1) * (arm.p01 + e1) / (best.p01 - ep),
                                    Side::Above, "2");
      f.kl_terms += lf / shifted_kl(arm.p10 - e1, (best.p10 + eq) * (arm.p01 + e1) / (best.p01 - e1),
                                    Side::Above, "4");
      f.epsilon_terms = 20.0 / (e1 * e1) + 2.0 / (ep * ep) + 2.0 / (eq * eq);
      f.tail_terms = 10.0 * S(arm) + 10.0 * S(best);
      break;
    }
    case BoundCase::B: {
      require_eps_markov(arm, index, e1);
      const double mu1 = theta(best);
      f.tv_warmup = tv_warmup(arm, e1);
      if (keep_p01) {
        f.kl_terms += lf / shifted_kl(arm.p01 + e1, (mu1 - em) * (arm.p10 - e1) / (1.0 - mu1 + em),
                                      Side::Below, "1");
      }
      f.kl_terms += lf / shifted_kl(arm.p10 - e1, (arm.p01 + e1) * (1.0 - mu1 + em) / (mu1 - em),
                                    Side::Above, "2");
      f.epsilon_terms = 6.0 / (e1 * e1) + 2.0 / (em * em);
      f.tail_terms = 6.0 * S(arm) + 4.0 * k.g + k.h;
      break;
    }
    case BoundCase::C: {
      require_eps_markov(best, best_index, e1);
      const double mu_i = theta(arm);
      f.tv_warmup = tv_warmup(best, e1);
      f.kl_terms += lf / shifted_kl(mu_i + e1, (best.p01 - ep) / (best.p01 - ep + best.p10 + e1),
                                    Side::Below, "1");
      f.kl_terms += lf / shifted_kl(mu_i + e1, (best.p01 - e1) / (best.p01 - e1 + best.p10 + eq),
                                    Side::Below, "2");
      f.epsilon_terms = 7.0 / (e1 * e1) + 2.0 / (ep * ep) + 2.0 / (eq * eq);
      f.tail_terms = 6.0 * S(best) + 4.0 * k.g + k.h;
      break;
    }
    case BoundCase::D: {
      f.kl_terms = lf / shifted_kl(theta(arm) + e1, theta(best) - e1, Side::Below, "1");
      f.epsilon_terms = 1.0 / (2.0 * e1 * e1) + 2.0 / (em * em);
      f.tail_terms = 8.0 * k.g + 2.0 * k.h;
      break;
    }
    case BoundCase::Auto: throw ValidationError("Auto must be resolved before evaluating an arm");
  }
  f.tau = f.tv_warmup + f.kl_terms;
  f.pulls = f.tau + f.epsilon_terms + f.tail_terms;
  f.regret = ab.gap * f.pulls;
  return f;
}

}  // namespace

std::string_view to_string(BoundCase c) {
  switch (c) {
    case BoundCase::A: return "a";
    case BoundCase::B: return "b";
    case BoundCase::C: return "c";
    case BoundCase::D: return "d";
    case BoundCase::Auto: return "auto";
  }
  return "?";
}

BoundCase parse_bound_case(std::string_view name) {
  for (BoundCase c : {BoundCase::A, BoundCase::B, BoundCase::C, BoundCase::D, BoundCase::Auto}) {
    if (name == to_string(c)) return c;
  }
  throw ValidationError("unknown bound case '" + std::string(name) + "' (expected a, b, c, d or auto)");
}

double kl_rate(const ArmParams& arm_i, const ArmParams& arm_j) {
  return arm_i.stationary0() * bern_kl(arm_i.p01, arm_j.p01) +
         arm_i.stationary1() * bern_kl(arm_i.p10, arm_j.p10);
}

LowerBound regret_lower_bound(std::span<const ArmParams> arms) {
  const InstanceSummary s = instance_summary(arms);
  require_common_rewards(arms);
  LowerBound out;
  out.per_arm.assign(arms.size(), 0.0);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i == s.best) continue;
    const double rate = kl_rate(arms[i], arms[s.best]);
    if (!(rate > 0.0)) {
      throw DomainError("KL rate of arm " + std::to_string(i + 1) + " against the best arm is 0");
    }
    out.per_arm[i] = s.gap[i] / rate;
    out.total += out.per_arm[i];
  }
  return out;
}

BoundCase classify_pair(const ArmParams& best, const ArmParams& arm) {
  const bool best_iid = best.is_iid(kIidTolerance);
  const bool arm_iid = arm.is_iid(kIidTolerance);
  if (!best_iid && !arm_iid) return BoundCase::A;
  if (best_iid && !arm_iid) return BoundCase::B;
  if (!best_iid && arm_iid) return BoundCase::C;
  return BoundCase::D;
}

double BoundConfig::default_epsilon() const {
  if (horizon < 3) throw ValidationError("bound horizon must be >= 3, got " + std::to_string(horizon));
  return std::pow(std::log(static_cast<double>(horizon)), -0.25);
}

void BoundConfig::validate() const {
  if (horizon < 3) throw ValidationError("bound horizon must be >= 3, got " + std::to_string(horizon));
  for (double e : {eps1(), eps_p(), eps_q(), eps_mu()}) {
    if (!(e > 0.0 && e < 1.0)) throw ValidationError("epsilons must lie in (0, 1), got " + fmt(e));
  }
  if (!(tail_truncation_tol > 0.0 && tail_truncation_tol < 1.0)) {
    throw ValidationError("tail_truncation_tol must lie in (0, 1)");
  }
}

BoundReport asymptotic_upper_bound(std::span<const ArmParams> arms, BoundCase requested) {
  const InstanceSummary s = instance_summary(arms);
  require_common_rewards(arms);
  const ArmParams& best = arms[s.best];
  BoundReport report;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i == s.best) continue;
    const BoundCase c = requested == BoundCase::Auto ? classify_pair(best, arms[i]) : requested;
    report.arms.push_back(asymptotic_arm(best, arms[i], i, s.gap[i], c));
    report.asymptotic_total += report.arms.back().asymptotic;
  }
  const BoundCase first = report.arms.front().bound_case;
  const bool uniform = std::all_of(report.arms.begin(), report.arms.end(),
                                   [&](const ArmBound& a) { return a.bound_case == first; });
  report.case_label = uniform ? std::string(to_string(first)) : "mixed";
  return report;
}

BoundReport finite_time_upper_bound(std::span<const ArmParams> arms, BoundCase requested,
                                    const BoundConfig& config) {
  config.validate();
  BoundReport report = asymptotic_upper_bound(arms, requested);
  const InstanceSummary s = instance_summary(arms);
  const SeriesConstants k{stretched_constant(config.tail_truncation_tol),
                          poly_stretched_constant(config.tail_truncation_tol)};
  double total = 0.0;
  for (ArmBound& ab : report.arms) {
    ab.finite = finite_arm(arms[s.best], s.best, arms[ab.arm], ab.arm, ab, config, k);
    total += ab.finite->regret;
  }
  report.finite_total = total;
  report.horizon = config.horizon;
  report.epsilon1 = config.eps1();
  report.epsilon_p = config.eps_p();
  report.epsilon_q = config.eps_q();
  report.epsilon_mu = config.eps_mu();
  return report;
}

double ucb_sm_upper_bound(std::span<const ArmParams> arms) {
  const InstanceSummary s = instance_summary(arms);
  const double L = 360.0 / s.min_sigma;
  double total = 0.0;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i != s.best) total += 4.0 * L / s.gap[i];
  }
  return total;
}

Dominance dominance_check(std::span<const ArmParams> arms) {
  Dominance d;
  d.tvklucb = asymptotic_upper_bound(arms, BoundCase::Auto).asymptotic_total;
  d.ucb_sm = ucb_sm_upper_bound(arms);
  d.dominates = d.tvklucb <= d.ucb_sm;
  d.margin = d.tvklucb > 0.0 ? d.ucb_sm / d.tvklucb : std::numeric_limits<double>::infinity();
  return d;
}

double stretched_constant(double tol) { return stretched_exp_sum(2.0 / 9.0, tol).value(); }

double poly_stretched_constant(double tol) { return poly_stretched_sum(tol).value(); }

}  // namespace rested
