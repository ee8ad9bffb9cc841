// rested: run experiments, evaluate regret bounds and property suites for
// rested two-state Markov bandits.
//
// Exit codes: 0 success, 1 invalid input or failed verification, 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rested/bounds.hpp"
#include "rested/config.hpp"
#include "rested/error.hpp"
#include "rested/harness.hpp"
#include "rested/output.hpp"
#include "rested/presets.hpp"
#include "rested/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rested;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

struct InstanceArgs {
  std::string scenario;
  std::string config;
  std::vector<double> means;
  std::string init_state;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& a) {
  auto* scen = cmd->add_option("--scenario", a.scenario, "Preset: scenario1, scenario2 or iid_bernoulli");
  auto* conf = cmd->add_option("--config", a.config, "JSON run configuration file");
  scen->excludes(conf);
  cmd->add_option("--means", a.means, "Arm means for iid_bernoulli")->delimiter(',');
  cmd->add_option("--init-state", a.init_state, "Initial state rule for preset arms: fixed0, fixed1, stationary, uniform");
}

std::vector<ArmParams> preset_from_args(const InstanceArgs& a) {
  std::vector<ArmParams> arms = preset_arms(a.scenario, a.means);
  if (!a.init_state.empty()) {
    const InitStateRule rule = parse_init_state_rule(a.init_state);
    for (ArmParams& arm : arms) arm.init_state = rule;
  }
  return arms;
}

std::vector<ArmParams> instance_from_args(const InstanceArgs& a) {
  if (!a.config.empty()) return load_run_config(a.config).arms;
  if (a.scenario.empty()) throw ValidationError("one of --scenario or --config is required");
  return preset_from_args(a);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

fs::path output_dir() {
  const char* env = std::getenv("RESTED_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path("results");
}

// ---- run ----

struct RunArgs {
  InstanceArgs inst;
  std::string policy;
  std::int64_t horizon = 100000;
  std::int64_t runs = 100;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;
  std::string out;
  std::string format;
  bool paired = false;
  bool unpaired = false;
  std::optional<double> init_estimate;
  std::string exploration;
  std::optional<double> ucb_constant;
  std::string tie_break;
  unsigned threads = 0;
};

int run_command(const RunArgs& a, const CLI::App& cmd) {
  RunConfig cfg;
  std::string label;
  if (!a.inst.config.empty()) {
    cfg = load_run_config(a.inst.config);
    label = fs::path(a.inst.config).stem().string();
  } else {
    if (a.inst.scenario.empty()) throw ValidationError("one of --scenario or --config is required");
    if (a.policy.empty()) throw ValidationError("--policy is required with --scenario");
    cfg.arms = preset_from_args(a.inst);
    cfg.horizon = a.horizon;
    cfg.replications = a.runs;
    cfg.seed = a.seed;
    label = a.inst.scenario;
  }
  auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
  if (!a.policy.empty()) cfg.policy.kind = parse_policy_kind(a.policy);
  if (given("--horizon")) cfg.horizon = a.horizon;
  if (given("--runs")) cfg.replications = a.runs;
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--checkpoints")) cfg.checkpoints = a.checkpoints;
  if (a.paired) cfg.paired = true;
  if (a.unpaired) cfg.paired = false;
  if (a.init_estimate) cfg.policy.estimator_init = *a.init_estimate;
  if (!a.exploration.empty()) cfg.policy.exploration = parse_exploration(a.exploration);
  if (a.ucb_constant) cfg.policy.ucb_sm_constant = *a.ucb_constant;
  if (!a.tie_break.empty()) cfg.policy.tie_break = parse_tie_break(a.tie_break);
  if (!a.format.empty()) cfg.output.format = parse_output_format(a.format);
  if (!a.out.empty()) cfg.output.path = a.out;
  cfg.policy.validate();

  ExperimentSpec spec{BanditInstance(cfg.arms), cfg.policy, cfg.horizon, cfg.replications, cfg.seed,
                      cfg.checkpoints, cfg.paired, a.threads};
  spec.validate();
  const ExperimentResult result = run_experiment(spec);

  std::string text;
  if (cfg.output.format == OutputFormat::Csv) {
    std::ostringstream os;
    write_csv(os, result);
    text = os.str();
  } else {
    text = result_json(result, cfg).dump(2) + "\n";
  }
  std::string path = cfg.output.path;
  if (path.empty()) {
    const std::string name = label + "_" + std::string(to_string(cfg.policy.kind)) + "_" +
                             config_hash(cfg).substr(0, 8) + "." + std::string(to_string(cfg.output.format));
    path = (output_dir() / name).string();
  }
  emit(text, path);
  if (path != "-") std::cerr << "wrote " << path << " (config " << config_hash(cfg) << ")\n";
  return kExitOk;
}

// ---- bounds ----

struct BoundsArgs {
  InstanceArgs inst;
  std::int64_t n = 100000;
  std::string bound_case = "auto";
  std::string out;
  std::optional<double> eps, eps1, eps_p, eps_q, eps_mu;
};

int bounds_command(const BoundsArgs& a) {
  const std::vector<ArmParams> arms = instance_from_args(a.inst);
  const BoundCase requested = parse_bound_case(a.bound_case);
  const InstanceSummary summary = instance_summary(arms);

  BoundConfig cfg;
  cfg.horizon = a.n;
  cfg.epsilon1 = a.eps1 ? a.eps1 : a.eps;
  cfg.epsilon_p = a.eps_p ? a.eps_p : a.eps;
  cfg.epsilon_q = a.eps_q ? a.eps_q : a.eps;
  cfg.epsilon_mu = a.eps_mu ? a.eps_mu : a.eps;
  cfg.validate();

  const LowerBound lower = regret_lower_bound(arms);
  const BoundReport asym = asymptotic_upper_bound(arms, requested);
  json finite;
  try {
    finite = bound_report_json(finite_time_upper_bound(arms, requested, cfg));
  } catch (const DomainError& e) {
    finite = json{{"error", e.what()}, {"horizon", cfg.horizon}, {"epsilon1", cfg.eps1()}};
  }
  const Dominance dom = dominance_check(arms);

  json arms_json = json::array();
  for (std::size_t i = 0; i < arms.size(); ++i) {
    json j = to_json(arms[i]);
    j["mean"] = summary.mean[i];
    j["gap"] = summary.gap[i];
    j["sigma"] = summary.sigma[i];
    arms_json.push_back(std::move(j));
  }
  const json doc{{"instance", arms_json},
                 {"best_arm", summary.best + 1},
                 {"min_sigma", summary.min_sigma},
                 {"lower_bound", {{"total", lower.total}, {"per_arm", lower.per_arm}}},
                 {"tvklucb_asymptotic", bound_report_json(asym)},
                 {"tvklucb_finite_time", finite},
                 {"ucb_sm", ucb_sm_upper_bound(arms)},
                 {"dominance", {{"dominates", dom.dominates}, {"margin", dom.margin}}}};
  emit(doc.dump(2) + "\n", a.out);
  return kExitOk;
}

// ---- verify ----

std::int64_t default_samples(const std::string& suite) {
  if (suite == "pinsker") return 1000000;
  if (suite == "solver") return 100000;
  if (suite == "concentration") return 1000;
  if (suite == "phase") return 20;
  return 1000;
}

int verify_command(const std::string& suite, std::optional<std::int64_t> samples, std::uint64_t seed) {
  const SuiteReport r = run_suite(suite, samples.value_or(default_samples(suite)), seed);
  std::cout << "suite " << r.name << ": " << r.checks << " checks, " << r.violations << " violations, worst slack "
            << format_double(r.worst_slack) << "\n";
  for (const std::string& note : r.notes) std::cout << "  " << note << "\n";
  std::cout << (r.passed() ? "PASS" : "FAIL") << "\n";
  return r.passed() ? kExitOk : kExitInvalid;
}

// ---- preset ----

int preset_command(const InstanceArgs& a) {
  if (a.scenario.empty()) throw ValidationError("--scenario is required");
  const std::vector<ArmParams> arms = preset_from_args(a);
  json inst = json::array();
  for (const ArmParams& arm : arms) inst.push_back(to_json(arm));
  std::cout << json{{"instance", inst}}.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rested Markov bandit experiments and regret bounds"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run replicated episodes and write regret curves");
  add_instance_options(run_cmd, run.inst);
  run_cmd->add_option("--policy", run.policy, "tv-kl-ucb, kl-ucb-mc, ucb-sm, kl-ucb-sm or kl-ucb-sm2");
  run_cmd->add_option("--horizon", run.horizon, "Rounds per episode")->check(CLI::PositiveNumber);
  run_cmd->add_option("--runs", run.runs, "Replications")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Base seed");
  run_cmd->add_option("--checkpoints", run.checkpoints, "Comma-separated times, last one = horizon")->delimiter(',');
  run_cmd->add_option("--out", run.out, "Output file ('-' for stdout)");
  run_cmd->add_option("--format", run.format, "csv or json");
  auto* paired = run_cmd->add_flag("--paired", run.paired, "Share arm streams across policies (default)");
  run_cmd->add_flag("--unpaired", run.unpaired, "Policy-specific arm streams")->excludes(paired);
  run_cmd->add_option("--init-estimate", run.init_estimate, "Estimate for unvisited transition rows (0 or 1)")
      ->check(CLI::IsMember({0.0, 1.0}));
  run_cmd->add_option("--exploration", run.exploration, "logf or log");
  run_cmd->add_option("--ucb-constant", run.ucb_constant, "UCB-SM constant L (default 360 / min sigma)");
  run_cmd->add_option("--tie-break", run.tie_break, "seeded-uniform or lowest-index");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all cores)");

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate regret bounds as JSON");
  add_instance_options(bounds_cmd, bounds.inst);
  bounds_cmd->add_option("--n", bounds.n, "Horizon for the finite-time bound");
  bounds_cmd->add_option("--case", bounds.bound_case, "a, b, c, d or auto");
  bounds_cmd->add_option("--out", bounds.out, "Output file (default stdout)");
  bounds_cmd->add_option("--eps", bounds.eps, "All finite-time epsilons (default log(n)^-1/4)");
  bounds_cmd->add_option("--eps1", bounds.eps1);
  bounds_cmd->add_option("--eps-p", bounds.eps_p);
  bounds_cmd->add_option("--eps-q", bounds.eps_q);
  bounds_cmd->add_option("--eps-mu", bounds.eps_mu);

  std::string suite;
  std::optional<std::int64_t> samples;
  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite");
  verify_cmd->add_option("--suite", suite, "pinsker, solver, concentration, phase or dominance")->required();
  verify_cmd->add_option("--samples", samples, "Suite size");
  verify_cmd->add_option("--seed", verify_seed, "Seed");

  InstanceArgs preset_args;
  auto* preset_cmd = app.add_subcommand("preset", "Print a preset instance as JSON");
  preset_cmd->add_option("--scenario,--name", preset_args.scenario, "Preset name")->required();
  preset_cmd->add_option("--means", preset_args.means, "Arm means for iid_bernoulli")->delimiter(',');
  preset_cmd->add_option("--init-state", preset_args.init_state, "Initial state rule");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*run_cmd) return run_command(run, *run_cmd);
    if (*bounds_cmd) return bounds_command(bounds);
    if (*verify_cmd) return verify_command(suite, samples, verify_seed);
    if (*preset_cmd) return preset_command(preset_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
