#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "rested/error.hpp"
#include "rested/harness.hpp"
#include "rested/kl_math.hpp"
#include "rested/random.hpp"
#include "rested/tail_sums.hpp"

namespace rested {
namespace {

// Event counts indexed by time, summed over chains.
struct EventCounts {
  std::vector<std::int64_t> occupancy, est01, est10, upper, lower;

  explicit EventCounts(std::size_t n)
      : occupancy(n + 1), est01(n + 1), est10(n + 1), upper(n + 1), lower(n + 1) {}

  void merge(const EventCounts& o) {
    auto add = [](std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    add(occupancy, o.occupancy);
    add(est01, o.est01);
    add(est10, o.est10);
    add(upper, o.upper);
    add(lower, o.lower);
  }
};

// One chain observed up to time T. At time t the first t-1 states are known;
// transition estimates use the pairs among them and fall back to 1 for a row
// never left, like the policies do.
void run_chain(const ArmParams& arm, std::int64_t T, double eps, std::uint64_t seed, std::int64_t chain,
               EventCounts& counts) {
  RandomStream chain_rng(derive_seed(seed, static_cast<std::uint64_t>(chain), 1));
  const double pi0 = arm.stationary0();
  ArmState x = draw_initial_state(ArmParams{arm.p01, arm.p10, arm.r0, arm.r1, InitStateRule::Stationary},
                                  chain_rng);
  std::int64_t zeros = 0;  // among observed states
  ArmStatistics rows;      // transition counts among observed pairs
  rows.last_state = x;
  for (std::int64_t t = 1; t <= T; ++t) {
    if (t >= 2) {
      const double freq = static_cast<double>(zeros) / static_cast<double>(t - 1);
      if (std::abs(freq - pi0) > eps) ++counts.occupancy[static_cast<std::size_t>(t)];
    }
    const double p01_hat =
        rows.plays0 > 0 ? static_cast<double>(rows.trans01) / static_cast<double>(rows.plays0) : 1.0;
    const double p10_hat =
        rows.plays1 > 0 ? static_cast<double>(rows.trans10) / static_cast<double>(rows.plays1) : 1.0;
    if (std::abs(p01_hat - arm.p01) > eps) ++counts.est01[static_cast<std::size_t>(t)];
    if (std::abs(p10_hat - arm.p10) > eps) ++counts.est10[static_cast<std::size_t>(t)];

    // Observe state t.
    if (t == 1) {
      zeros += x == ArmState::Zero;
    } else {
      const StepOutcome s = env_step(arm, x, chain_rng);
      rows.record(s.next_state, s.reward);
      x = s.next_state;
      zeros += x == ArmState::Zero;
    }
  }

  // The successive exits from one state of a chain are i.i.d. Bernoulli, so
  // the confidence-bound deviations are driven by direct Bernoulli samples.
  // The budget is log f(s) / s: t = s is the tightest time the statement allows.
  RandomStream up_rng(derive_seed(seed, static_cast<std::uint64_t>(chain), 2));
  RandomStream down_rng(derive_seed(seed, static_cast<std::uint64_t>(chain), 3));
  const double p_low = arm.p01 - eps;
  const double q_high = arm.p10 + eps;
  std::int64_t ups = 0;
  std::int64_t downs = 0;
  for (std::int64_t s = 1; s <= T; ++s) {
    ups += up_rng.bernoulli(arm.p01);
    downs += down_rng.bernoulli(arm.p10);
    const double sd = static_cast<double>(s);
    const ConfidenceBudget budget(log_f(sd) / sd);
    const double p_hat = static_cast<double>(ups) / sd;
    const double q_hat = static_cast<double>(downs) / sd;
    // The bound never falls below the estimate, so only a low estimate can fail.
    if (p_hat < p_low && kl_ucb_upper(p_hat, budget) < p_low) ++counts.upper[static_cast<std::size_t>(s)];
    if (q_hat > q_high && kl_lcb_lower(q_hat, budget) > q_high) ++counts.lower[static_cast<std::size_t>(s)];
  }
}

}  // namespace

double ConcentrationRow::worst_slack() const {
  return std::min({occupancy_bound - occupancy_cumulative, estimate_bound - estimate01_cumulative,
                   estimate_bound - estimate10_cumulative, confidence_bound - upper_cumulative,
                   confidence_bound - lower_cumulative});
}

bool ConcentrationReport::violated() const { return worst_slack() < 0.0; }

double ConcentrationReport::worst_slack() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) w = std::min(w, r.worst_slack());
  return w;
}

ConcentrationReport concentration_suite(const ArmParams& arm, const std::vector<std::int64_t>& t_grid,
                                        double epsilon, std::int64_t chains, std::uint64_t seed,
                                        unsigned threads) {
  arm.validate();
  if (chains < 100) throw ValidationError("concentration suite needs at least 100 chains");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  if (t_grid.empty()) throw ValidationError("time grid must not be empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 1 || (i > 0 && t_grid[i] <= t_grid[i - 1])) {
      throw ValidationError("time grid must be strictly increasing and >= 1");
    }
  }
  const std::int64_t T = t_grid.back();

  const unsigned workers = static_cast<unsigned>(std::min<std::int64_t>(
      threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency()), chains));
  EventCounts total(static_cast<std::size_t>(T));
  std::mutex merge_mutex;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  auto worker = [&] {
    EventCounts local(static_cast<std::size_t>(T));
    try {
      for (std::int64_t c = next.fetch_add(1); c < chains; c = next.fetch_add(1)) {
        run_chain(arm, T, epsilon, seed, c, local);
      }
    } catch (...) {
      std::lock_guard lock(merge_mutex);
      if (!error) error = std::current_exception();
      return;
    }
    std::lock_guard lock(merge_mutex);
    total.merge(local);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  const double sigma = arm.sigma();
  const double series = poly_exp_sum(epsilon * epsilon * sigma * sigma).value();
  ConcentrationReport report;
  report.arm = arm;
  report.epsilon = epsilon;
  report.chains = chains;
  const double R = static_cast<double>(chains);
  std::int64_t occ = 0, e01 = 0, e10 = 0, up = 0, low = 0;
  std::size_t g = 0;
  for (std::int64_t t = 1; t <= T && g < t_grid.size(); ++t) {
    const auto k = static_cast<std::size_t>(t);
    occ += total.occupancy[k];
    e01 += total.est01[k];
    e10 += total.est10[k];
    up += total.upper[k];
    low += total.lower[k];
    if (t != t_grid[g]) continue;
    ConcentrationRow row;
    row.t = t;
    row.occupancy_freq = static_cast<double>(total.occupancy[k]) / R;
    row.occupancy_cumulative = static_cast<double>(occ) / R;
    row.occupancy_bound = series;
    row.estimate01_freq = static_cast<double>(total.est01[k]) / R;
    row.estimate01_cumulative = static_cast<double>(e01) / R;
    row.estimate10_freq = static_cast<double>(total.est10[k]) / R;
    row.estimate10_cumulative = static_cast<double>(e10) / R;
    row.estimate_bound = 1.0 / (epsilon * epsilon) + series;
    row.upper_cumulative = static_cast<double>(up) / R;
    row.lower_cumulative = static_cast<double>(low) / R;
    row.confidence_bound = 2.0 / (epsilon * epsilon);
    report.rows.push_back(row);
    ++g;
  }
  return report;
}

}  // namespace rested
