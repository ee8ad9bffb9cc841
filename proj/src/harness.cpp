#include "rested/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "rested/error.hpp"
#include "rested/random.hpp"

namespace rested {
namespace {

constexpr std::uint64_t kTieStream = 0;

std::uint64_t stream_seed(const ExperimentSpec& spec, std::int64_t rep, std::uint64_t stream) {
  std::uint64_t base = spec.base_seed;
  if (!spec.paired) base = mix64(base ^ (0xA5A5A5A5ULL * (static_cast<std::uint64_t>(spec.policy.kind) + 1)));
  return derive_seed(base, static_cast<std::uint64_t>(rep), stream);
}

unsigned worker_count(unsigned requested, std::int64_t jobs) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::int64_t>(n, std::max<std::int64_t>(jobs, 1)));
}

// Runs job(i) for i in [0, jobs) on a few threads. The first exception wins.
template <typename Job>
void parallel_for(std::int64_t jobs, unsigned threads, Job job) {
  const unsigned workers = worker_count(threads, jobs);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// The episode loop shared by traces and experiments. The observer sees every
// round after the environment has moved.
template <typename Observer>
void simulate(const ExperimentSpec& spec, const PolicyConfig& policy, std::int64_t rep, Observer& obs) {
  const auto arms = spec.instance.arms();
  const std::size_t K = arms.size();
  if (spec.horizon < static_cast<std::int64_t>(K)) {
    throw ValidationError("horizon " + std::to_string(spec.horizon) + " is shorter than the " +
                          std::to_string(K) + " round-robin plays");
  }

  std::vector<RandomStream> streams;
  streams.reserve(K);
  std::vector<ArmStatistics> stats(K);
  std::vector<RewardMap> rewards(K);
  for (std::size_t i = 0; i < K; ++i) {
    streams.emplace_back(stream_seed(spec, rep, i + 1));
    stats[i].last_state = draw_initial_state(arms[i], streams[i]);
    rewards[i] = reward_map(arms[i]);
  }
  RandomStream tie_rng(stream_seed(spec, rep, kTieStream));

  std::vector<double> values(K);
  std::vector<Phase> phases(K, Phase::NotApplicable);
  for (std::int64_t t = 1; t <= spec.horizon; ++t) {
    std::size_t a;
    const bool index_round = t > static_cast<std::int64_t>(K);
    if (!index_round) {
      a = static_cast<std::size_t>(t - 1);
    } else {
      for (std::size_t i = 0; i < K; ++i) {
        const IndexValue iv = policy_index(stats[i], rewards[i], t, policy);
        values[i] = iv.value;
        phases[i] = iv.phase;
      }
      a = select_arm(values, policy.tie_break, tie_rng);
    }
    const StepOutcome step = env_step(arms[a], stats[a].last_state, streams[a]);
    stats[a].record(step.next_state, step.reward);
    obs.round(t, a, step, index_round, values, phases);
  }
  obs.finish(stats);
}

struct TraceObserver {
  EpisodeTrace trace;
  bool record_indices = false;

  void round(std::int64_t t, std::size_t a, const StepOutcome& step, bool index_round,
             const std::vector<double>& values, const std::vector<Phase>& phases) {
    trace.steps.push_back({t, static_cast<std::uint32_t>(a), step.next_state, step.reward,
                           index_round ? phases[a] : Phase::NotApplicable});
    if (record_indices && index_round) trace.indices.insert(trace.indices.end(), values.begin(), values.end());
  }
  void finish(const std::vector<ArmStatistics>& stats) { trace.final_stats = stats; }
};

struct EpisodeSummary {
  std::vector<double> regret;
  std::vector<double> pseudo;
  std::vector<std::vector<std::int64_t>> pulls;
  std::vector<std::vector<std::int64_t>> stp;
  std::vector<std::vector<std::int64_t>> sm;
};

struct SummaryObserver {
  const std::vector<std::int64_t>& checkpoints;
  const InstanceSummary& summary;
  EpisodeSummary out;
  std::size_t next = 0;
  double reward_sum = 0.0;
  std::vector<std::int64_t> pulls;
  std::vector<std::int64_t> stp;
  std::vector<std::int64_t> sm;

  SummaryObserver(const std::vector<std::int64_t>& cps, const InstanceSummary& s)
      : checkpoints(cps), summary(s), pulls(s.mean.size()), stp(s.mean.size()), sm(s.mean.size()) {}

  void round(std::int64_t t, std::size_t a, const StepOutcome& step, bool index_round,
             const std::vector<double>&, const std::vector<Phase>& phases) {
    reward_sum += step.reward;
    ++pulls[a];
    if (index_round) {
      for (std::size_t i = 0; i < phases.size(); ++i) {
        if (phases[i] == Phase::Stp) ++stp[i];
        if (phases[i] == Phase::Sm) ++sm[i];
      }
    }
    if (next < checkpoints.size() && t == checkpoints[next]) {
      out.regret.push_back(static_cast<double>(t) * summary.best_mean - reward_sum);
      double pseudo = 0.0;
      for (std::size_t i = 0; i < pulls.size(); ++i) pseudo += summary.gap[i] * static_cast<double>(pulls[i]);
      out.pseudo.push_back(pseudo);
      out.pulls.push_back(pulls);
      out.stp.push_back(stp);
      out.sm.push_back(sm);
      std::fill(stp.begin(), stp.end(), 0);
      std::fill(sm.begin(), sm.end(), 0);
      ++next;
    }
  }
  void finish(const std::vector<ArmStatistics>&) {}
};

// Welford running mean and variance.
struct Moments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double sample_std() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

}  // namespace

std::vector<std::int64_t> default_checkpoints(std::int64_t horizon, std::size_t count) {
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
  if (count == 0) throw ValidationError("checkpoint count must be >= 1");
  std::vector<std::int64_t> out;
  const double lo = std::log(static_cast<double>(std::min<std::int64_t>(10, horizon)));
  const double hi = std::log(static_cast<double>(horizon));
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    const auto t = static_cast<std::int64_t>(std::llround(std::exp(x)));
    if (t < horizon && (out.empty() || t > out.back())) out.push_back(t);
  }
  out.push_back(horizon);
  return out;
}

void ExperimentSpec::validate() const {
  if (horizon < static_cast<std::int64_t>(instance.size())) {
    throw ValidationError("horizon must be at least the number of arms (" + std::to_string(instance.size()) +
                          "), got " + std::to_string(horizon));
  }
  if (replications < 1) throw ValidationError("replications must be >= 1");
  policy.validate();
  const auto cps = effective_checkpoints();
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] < 1) throw ValidationError("checkpoints must be >= 1");
    if (i > 0 && cps[i] <= cps[i - 1]) throw ValidationError("checkpoints must be strictly increasing");
  }
  if (cps.back() != horizon) {
    throw ValidationError("the last checkpoint must equal the horizon " + std::to_string(horizon));
  }
}

std::vector<std::int64_t> ExperimentSpec::effective_checkpoints() const {
  return checkpoints.empty() ? default_checkpoints(horizon) : checkpoints;
}

EpisodeTrace run_episode(const ExperimentSpec& spec, std::int64_t replication, bool record_indices) {
  spec.validate();
  const PolicyConfig policy = resolve_for(spec.policy, spec.instance.summary());
  TraceObserver obs;
  obs.record_indices = record_indices;
  obs.trace.steps.reserve(static_cast<std::size_t>(spec.horizon));
  simulate(spec, policy, replication, obs);
  return std::move(obs.trace);
}

double ExperimentResult::sm_fraction(std::size_t checkpoint, std::size_t arm) const {
  const auto stp = stp_rounds.at(checkpoint).at(arm);
  const auto sm = sm_rounds.at(checkpoint).at(arm);
  return stp + sm > 0 ? static_cast<double>(sm) / static_cast<double>(stp + sm) : 0.0;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const InstanceSummary& summary = spec.instance.summary();
  const PolicyConfig policy = resolve_for(spec.policy, summary);
  const std::vector<std::int64_t> cps = spec.effective_checkpoints();
  const std::size_t K = spec.instance.size();

  std::vector<EpisodeSummary> episodes(static_cast<std::size_t>(spec.replications));
  parallel_for(spec.replications, spec.threads, [&](std::int64_t rep) {
    SummaryObserver obs(cps, summary);
    simulate(spec, policy, rep, obs);
    episodes[static_cast<std::size_t>(rep)] = std::move(obs.out);
  });

  ExperimentResult r;
  r.checkpoints = cps;
  r.horizon = spec.horizon;
  r.replications = spec.replications;
  r.base_seed = spec.base_seed;
  r.arms = K;
  r.policy = policy;
  const std::size_t C = cps.size();
  r.mean_pulls.assign(C, std::vector<double>(K, 0.0));
  r.stp_rounds.assign(C, std::vector<std::int64_t>(K, 0));
  r.sm_rounds.assign(C, std::vector<std::int64_t>(K, 0));
  for (std::size_t c = 0; c < C; ++c) {
    Moments regret;
    Moments pseudo;
    std::vector<Moments> pulls(K);
    for (const EpisodeSummary& e : episodes) {
      regret.add(e.regret[c]);
      pseudo.add(e.pseudo[c]);
      for (std::size_t i = 0; i < K; ++i) {
        pulls[i].add(static_cast<double>(e.pulls[c][i]));
        r.stp_rounds[c][i] += e.stp[c][i];
        r.sm_rounds[c][i] += e.sm[c][i];
      }
    }
    r.mean_regret.push_back(regret.mean);
    r.std_regret.push_back(regret.sample_std());
    r.mean_pseudo_regret.push_back(pseudo.mean);
    r.std_pseudo_regret.push_back(pseudo.sample_std());
    for (std::size_t i = 0; i < K; ++i) r.mean_pulls[c][i] = pulls[i].mean;
  }
  r.replication_regret.reserve(episodes.size());
  for (EpisodeSummary& e : episodes) r.replication_regret.push_back(std::move(e.regret));
  return r;
}

PhaseReport phase_report(const ExperimentResult& result, std::int64_t from, std::int64_t to) {
  if (from > to) throw ValidationError("phase window start exceeds its end");
  const auto& cps = result.checkpoints;
  auto locate = [&](std::int64_t t) -> std::size_t {
    if (t == 0) return 0;
    const auto it = std::find(cps.begin(), cps.end(), t);
    if (it == cps.end()) throw ValidationError("phase window end " + std::to_string(t) + " is not a checkpoint");
    return static_cast<std::size_t>(it - cps.begin()) + 1;
  };
  const std::size_t lo = locate(from);
  const std::size_t hi = locate(to);

  PhaseReport rep;
  rep.from = from;
  rep.to = to;
  if (lo == hi) return rep;
  rep.rounds.assign(result.arms, 0);
  std::vector<std::int64_t> stp(result.arms, 0);
  std::vector<std::int64_t> sm(result.arms, 0);
  // Interval c covers (checkpoint c-1, checkpoint c].
  for (std::size_t c = lo; c < hi; ++c) {
    for (std::size_t i = 0; i < result.arms; ++i) {
      stp[i] += result.stp_rounds[c][i];
      sm[i] += result.sm_rounds[c][i];
    }
  }
  for (std::size_t i = 0; i < result.arms; ++i) {
    const std::int64_t total = stp[i] + sm[i];
    rep.rounds[i] = total;
    rep.stp_fraction.push_back(total > 0 ? static_cast<double>(stp[i]) / static_cast<double>(total) : 0.0);
    rep.sm_fraction.push_back(total > 0 ? static_cast<double>(sm[i]) / static_cast<double>(total) : 0.0);
  }
  return rep;
}

}  // namespace rested
