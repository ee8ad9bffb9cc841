#include "rested/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rested/bounds.hpp"
#include "rested/error.hpp"
#include "rested/harness.hpp"
#include "rested/kl_math.hpp"
#include "rested/presets.hpp"

namespace rested {
namespace {

constexpr std::array<std::string_view, 5> kSuites{"pinsker", "solver", "concentration", "phase", "dominance"};

SuiteReport start(std::string name) {
  SuiteReport r;
  r.name = std::move(name);
  r.worst_slack = std::numeric_limits<double>::infinity();
  return r;
}

void require_samples(std::int64_t samples) {
  if (samples < 1) throw ValidationError("--samples must be >= 1");
}

std::array<double, 3> sorted_triple(RandomStream& rng) {
  std::array<double, 3> x{rng.uniform(), rng.uniform(), rng.uniform()};
  std::sort(x.begin(), x.end());
  return x;
}

// Slack of a solver root against the band [c - 1e-9, c]. A root whose
// neighbouring double toward the true root is already infeasible cannot be
// improved in double precision, so only feasibility is required of it.
double root_slack(double p, double q, double c, double toward, std::int64_t& limited) {
  const double kl = bern_kl(p, q);
  const double slack = std::min(kl - (c - 1e-9), c - kl);
  if (slack >= 0.0 || kl > c) return slack;
  if (bern_kl(p, std::nextafter(q, toward)) > c) {
    ++limited;
    return 0.0;
  }
  return slack;
}

bool unique_best(const std::vector<ArmParams>& arms) {
  std::vector<double> m;
  for (const auto& a : arms) m.push_back(a.mean_reward());
  std::sort(m.begin(), m.end(), std::greater<>());
  return m[0] - m[1] >= 1e-9;
}

}  // namespace

void SuiteReport::record(double slack, double tolerance_floor) {
  ++checks;
  if (std::isnan(slack) || slack < tolerance_floor) ++violations;
  if (std::isnan(slack)) {
    worst_slack = slack;
  } else if (!std::isnan(worst_slack)) {
    worst_slack = std::min(worst_slack, slack);
  }
}

std::span<const std::string_view> suite_names() { return kSuites; }

SuiteReport run_suite(std::string_view name, std::int64_t samples, std::uint64_t seed) {
  if (name == "pinsker") return verify_pinsker(samples, seed);
  if (name == "solver") return verify_solver(samples, seed);
  if (name == "concentration") return verify_concentration(samples, seed);
  if (name == "phase") return verify_phase(samples, seed);
  if (name == "dominance") return verify_dominance(samples, seed);
  throw ValidationError("unknown suite '" + std::string(name) +
                        "' (expected pinsker, solver, concentration, phase or dominance)");
}

SuiteReport verify_pinsker(std::int64_t samples, std::uint64_t seed) {
  require_samples(samples);
  SuiteReport r = start("pinsker");
  RandomStream rng(seed);
  constexpr double floor = -1e-12;
  for (std::int64_t k = 0; k < samples; ++k) {
    const double p = rng.uniform();
    const double q = rng.uniform();
    r.record(bern_kl(p, q) - 2.0 * (p - q) * (p - q), floor);

    // p <= q - eps <= q
    const auto [a, b, c] = sorted_triple(rng);
    const double eps_b = c - b;
    r.record(bern_kl(a, c) - 2.0 * eps_b * eps_b - bern_kl(a, b), floor);

    // p <= p + eps <= q
    const auto [x, y, z] = sorted_triple(rng);
    const double eps_c = y - x;
    r.record(bern_kl(z, x) - 2.0 * eps_c * eps_c - bern_kl(z, y), floor);
  }
  r.notes.push_back("3 inequalities x " + std::to_string(samples) + " random triples, slack floor -1e-12");
  return r;
}

SuiteReport verify_solver(std::int64_t samples, std::uint64_t seed) {
  require_samples(samples);
  SuiteReport r = start("solver");
  for (double c : {0.01, 0.1, 1.0, 5.0}) {
    r.record(1e-10 - std::abs(kl_ucb_upper(0.0, ConfidenceBudget(c)) + std::expm1(-c)));
    r.record(1e-10 - std::abs(kl_lcb_lower(1.0, ConfidenceBudget(c)) - std::exp(-c)));
  }
  RandomStream rng(seed);
  std::int64_t limited = 0;
  for (std::int64_t k = 0; k < samples; ++k) {
    const double p = rng.uniform();
    const double c = 5.0 * (1.0 - rng.uniform());  // (0, 5]
    const double up = kl_ucb_upper(p, ConfidenceBudget(c));
    if (up < 1.0) r.record(root_slack(p, up, c, 1.0, limited));
    const double low = kl_lcb_lower(p, ConfidenceBudget(c));
    if (low > 0.0) r.record(root_slack(p, low, c, 0.0, limited));
    if (k % 16 == 0) {
      double prev = p;
      for (int step = 1; step <= 20; ++step) {
        const double next = kl_ucb_upper(p, ConfidenceBudget(0.25 * step));
        r.record(next - prev);
        prev = next;
      }
    }
  }
  r.notes.push_back("closed forms to 1e-10; KL residual in [c - 1e-9, c]; monotone in the budget");
  r.notes.push_back(std::to_string(limited) +
                    " roots at the double precision limit (next double toward the root infeasible)");
  return r;
}

SuiteReport verify_concentration(std::int64_t chains, std::uint64_t seed) {
  SuiteReport r = start("concentration");
  const std::vector<std::int64_t> grid{100, 1000, 10000};
  const std::vector<ArmParams> arms{preset_arms("scenario1").front(), ArmParams{0.5, 0.5}};
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const ConcentrationReport rep = concentration_suite(arms[a], grid, 0.05, chains, derive_seed(seed, a));
    for (const ConcentrationRow& row : rep.rows) {
      r.record(row.occupancy_bound - row.occupancy_cumulative);
      r.record(row.estimate_bound - row.estimate01_cumulative);
      r.record(row.estimate_bound - row.estimate10_cumulative);
      r.record(row.confidence_bound - row.upper_cumulative);
      r.record(row.confidence_bound - row.lower_cumulative);
    }
    const ConcentrationRow& last = rep.rows.back();
    r.notes.push_back("arm (p01=" + std::to_string(arms[a].p01) + ", p10=" + std::to_string(arms[a].p10) +
                      ") t=10000: occupancy " + std::to_string(last.occupancy_cumulative) + ", p01 estimate " +
                      std::to_string(last.estimate01_cumulative) + ", ucb below " +
                      std::to_string(last.upper_cumulative) + " (bound " + std::to_string(last.confidence_bound) +
                      ")");
  }
  return r;
}

std::vector<double> phase_iid_means() { return {0.5, 0.45}; }

SuiteReport verify_phase(std::int64_t replications, std::uint64_t seed) {
  require_samples(replications);
  SuiteReport r = start("phase");
  constexpr std::int64_t n = 100000;
  const std::vector<double> means = phase_iid_means();
  struct Case {
    BanditInstance instance;
    bool check_stp;  // otherwise SM
  };
  const std::vector<Case> cases{{preset("iid_bernoulli", means), true}, {preset("scenario1"), false}};
  for (const Case& c : cases) {
    ExperimentSpec spec{c.instance, PolicyConfig{}, n, replications, seed, {n / 2, n}};
    const ExperimentResult res = run_experiment(spec);
    const PhaseReport ph = phase_report(res, n / 2, n);
    std::string line = c.check_stp ? "i.i.d. instance STP share:" : "scenario1 SM share:";
    for (std::size_t i = 0; i < ph.rounds.size(); ++i) {
      const double share = c.check_stp ? ph.stp_fraction[i] : ph.sm_fraction[i];
      r.record(0.05 - share);
      line += " " + std::to_string(share);
    }
    r.notes.push_back(line);
  }
  return r;
}

std::vector<ArmParams> random_markov_instance(RandomStream& rng, double min_sigma) {
  for (;;) {
    const auto K = static_cast<std::size_t>(2 + rng.below(4));
    std::vector<ArmParams> arms;
    while (arms.size() < K) {
      ArmParams a{1.0 - rng.uniform(), 1.0 - rng.uniform()};
      if (a.sigma() >= min_sigma && std::abs(a.sigma() - 1.0) >= 1e-6) arms.push_back(a);
    }
    if (unique_best(arms)) return arms;
  }
}

std::vector<ArmParams> random_iid_instance(RandomStream& rng) {
  for (;;) {
    const auto K = static_cast<std::size_t>(2 + rng.below(4));
    std::vector<double> means;
    while (means.size() < K) {
      const double mu = rng.uniform();
      if (mu > 0.0) means.push_back(mu);
    }
    std::vector<ArmParams> arms = preset_arms("iid_bernoulli", means);
    if (unique_best(arms)) return arms;
  }
}

SuiteReport verify_dominance(std::int64_t instances, std::uint64_t seed) {
  require_samples(instances);
  SuiteReport r = start("dominance");
  RandomStream rng(seed);
  double worst_markov = std::numeric_limits<double>::infinity();
  double worst_iid = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < instances; ++k) {
    const auto markov = random_markov_instance(rng, 1.0 / 1440.0);
    const Dominance dm = dominance_check(markov);
    r.record(dm.dominates ? 1.0 : -1.0);
    worst_markov = std::min(worst_markov, dm.margin);

    const auto iid = random_iid_instance(rng);
    const Dominance di = dominance_check(iid);
    r.record(di.dominates ? 1.0 : -1.0);
    worst_iid = std::min(worst_iid, di.margin);
  }
  // Slack here is the smallest ratio UCB-SM bound / TV-KL-UCB bound minus 1.
  r.worst_slack = std::min(worst_markov, worst_iid) - 1.0;
  r.notes.push_back("smallest margin (UCB-SM / TV-KL-UCB): Markovian " + std::to_string(worst_markov) +
                    ", i.i.d. " + std::to_string(worst_iid));
  return r;
}

}  // namespace rested
