#include "rested/output.hpp"

#include <charconv>
#include <cmath>

namespace rested {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const ExperimentResult& result) {
  out << "checkpoint_t,mean_regret,std_regret,mean_pseudo_regret";
  for (std::size_t i = 1; i <= result.arms; ++i) out << ",pulls_" << i;
  for (std::size_t i = 1; i <= result.arms; ++i) out << ",sm_frac_" << i;
  out << '\n';
  for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
    out << result.checkpoints[c] << ',' << format_double(result.mean_regret[c]) << ','
        << format_double(result.std_regret[c]) << ',' << format_double(result.mean_pseudo_regret[c]);
    for (std::size_t i = 0; i < result.arms; ++i) out << ',' << format_double(result.mean_pulls[c][i]);
    for (std::size_t i = 0; i < result.arms; ++i) out << ',' << format_double(result.sm_fraction(c, i));
    out << '\n';
  }
}

namespace {

// JSON has no infinity; bounds may legitimately be infinite.
json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

json result_json(const ExperimentResult& result, const RunConfig& config) {
  json cps = json::array();
  for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
    json sm = json::array();
    for (std::size_t i = 0; i < result.arms; ++i) sm.push_back(result.sm_fraction(c, i));
    cps.push_back(json{{"t", result.checkpoints[c]},
                       {"mean_regret", result.mean_regret[c]},
                       {"std_regret", result.std_regret[c]},
                       {"mean_pseudo_regret", result.mean_pseudo_regret[c]},
                       {"std_pseudo_regret", result.std_pseudo_regret[c]},
                       {"mean_pulls", result.mean_pulls[c]},
                       {"stp_rounds", result.stp_rounds[c]},
                       {"sm_rounds", result.sm_rounds[c]},
                       {"sm_frac", sm}});
  }
  return json{{"config", to_json(config)},
              {"config_hash", config_hash(config)},
              {"seed", result.base_seed},
              {"horizon", result.horizon},
              {"replications", result.replications},
              {"resolved_policy", to_json(result.policy)},
              {"checkpoints", cps}};
}

json bound_report_json(const BoundReport& report) {
  json arms = json::array();
  for (const ArmBound& a : report.arms) {
    json j{{"arm", a.arm + 1},
           {"case", std::string(to_string(a.bound_case))},
           {"gap", a.gap},
           {"asymptotic", number(a.asymptotic)},
           {"dropped_terms", a.dropped}};
    if (a.finite) {
      const FiniteTimeTerms& f = *a.finite;
      j["finite_time"] = json{{"tv_warmup", number(f.tv_warmup)}, {"kl_terms", number(f.kl_terms)},
                              {"tau", number(f.tau)},           {"epsilon_terms", number(f.epsilon_terms)},
                              {"tail_terms", number(f.tail_terms)}, {"pulls", number(f.pulls)},
                              {"regret", number(f.regret)}};
    }
    arms.push_back(std::move(j));
  }
  json j{{"case", report.case_label}, {"asymptotic_total", number(report.asymptotic_total)}, {"arms", arms}};
  if (report.finite_total) {
    j["finite_time_total"] = number(*report.finite_total);
    j["horizon"] = report.horizon;
    j["epsilon"] = json{{"epsilon1", report.epsilon1},
                        {"epsilon_p", report.epsilon_p},
                        {"epsilon_q", report.epsilon_q},
                        {"epsilon_mu", report.epsilon_mu}};
  }
  return j;
}

json concentration_json(const ConcentrationReport& report) {
  json rows = json::array();
  for (const ConcentrationRow& r : report.rows) {
    rows.push_back(json{{"t", r.t},
                        {"occupancy", {{"freq", r.occupancy_freq},
                                       {"cumulative", r.occupancy_cumulative},
                                       {"bound", r.occupancy_bound}}},
                        {"estimate_p01", {{"freq", r.estimate01_freq},
                                          {"cumulative", r.estimate01_cumulative},
                                          {"bound", r.estimate_bound}}},
                        {"estimate_p10", {{"freq", r.estimate10_freq},
                                          {"cumulative", r.estimate10_cumulative},
                                          {"bound", r.estimate_bound}}},
                        {"ucb_below", {{"cumulative", r.upper_cumulative}, {"bound", r.confidence_bound}}},
                        {"lcb_above", {{"cumulative", r.lower_cumulative}, {"bound", r.confidence_bound}}},
                        {"worst_slack", r.worst_slack()}});
  }
  return json{{"arm", to_json(report.arm)},
              {"epsilon", report.epsilon},
              {"chains", report.chains},
              {"rows", rows},
              {"worst_slack", report.worst_slack()},
              {"violated", report.violated()}};
}

}  // namespace rested
