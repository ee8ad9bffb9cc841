#include "rested/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>

#include "rested/error.hpp"

namespace rested {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(where + ": unknown field '" + key + "'");
    }
  }
}

std::string field(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

double get_number(const json& j, std::string_view key, const std::string& where) {
  const json& v = j.at(std::string(key));
  if (!v.is_number()) throw ValidationError(field(where, key) + ": expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& j, std::string_view key, const std::string& where, std::int64_t min) {
  const json& v = j.at(std::string(key));
  if (!v.is_number_integer()) throw ValidationError(field(where, key) + ": expected an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw ValidationError(field(where, key) + ": value too large");
  }
  const auto x = v.get<std::int64_t>();
  if (x < min) throw ValidationError(field(where, key) + ": must be >= " + std::to_string(min));
  return x;
}

std::string get_string(const json& j, std::string_view key, const std::string& where) {
  const json& v = j.at(std::string(key));
  if (!v.is_string()) throw ValidationError(field(where, key) + ": expected a string");
  return v.get<std::string>();
}

// Re-throws a ValidationError with the field path in front.
template <typename F>
auto with_context(const std::string& where, F f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

ArmParams parse_arm(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, {"p01", "p10", "r0", "r1", "init_state"}, where);
  for (const char* key : {"p01", "p10"}) {
    if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  }
  ArmParams arm;
  arm.p01 = get_number(j, "p01", where);
  arm.p10 = get_number(j, "p10", where);
  if (j.contains("r0")) arm.r0 = get_number(j, "r0", where);
  if (j.contains("r1")) arm.r1 = get_number(j, "r1", where);
  if (j.contains("init_state")) {
    const std::string rule = get_string(j, "init_state", where);
    arm.init_state = with_context(field(where, "init_state"), [&] { return parse_init_state_rule(rule); });
  }
  with_context(where, [&] {
    arm.validate();
    return 0;
  });
  return arm;
}

PolicyConfig parse_policy(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, {"kind", "exploration", "ucb_sm_constant", "tie_break", "estimator_init"}, where);
  if (!j.contains("kind")) throw ValidationError(where + ": missing field 'kind'");
  PolicyConfig p;
  const std::string kind = get_string(j, "kind", where);
  p.kind = with_context(field(where, "kind"), [&] { return parse_policy_kind(kind); });
  if (j.contains("exploration")) {
    const std::string e = get_string(j, "exploration", where);
    p.exploration = with_context(field(where, "exploration"), [&] { return parse_exploration(e); });
  }
  if (j.contains("ucb_sm_constant")) p.ucb_sm_constant = get_number(j, "ucb_sm_constant", where);
  if (j.contains("tie_break")) {
    const std::string tb = get_string(j, "tie_break", where);
    p.tie_break = with_context(field(where, "tie_break"), [&] { return parse_tie_break(tb); });
  }
  if (j.contains("estimator_init")) p.estimator_init = get_number(j, "estimator_init", where);
  with_context(where, [&] {
    p.validate();
    return 0;
  });
  return p;
}

OutputSpec parse_output(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, {"path", "format"}, where);
  OutputSpec out;
  if (j.contains("path")) out.path = get_string(j, "path", where);
  if (j.contains("format")) {
    const std::string f = get_string(j, "format", where);
    out.format = with_context(field(where, "format"), [&] { return parse_output_format(f); });
  }
  return out;
}

}  // namespace

std::string_view to_string(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "json"; }

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ValidationError("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

RunConfig parse_run_config(const json& doc) {
  require_object(doc, "config");
  reject_unknown(doc, {"instance", "policy", "horizon", "replications", "seed", "checkpoints", "paired", "output"},
                 "config");
  for (const char* key : {"instance", "policy", "horizon"}) {
    if (!doc.contains(key)) throw ValidationError(std::string("config: missing field '") + key + "'");
  }
  RunConfig cfg;
  const json& inst = doc.at("instance");
  if (!inst.is_array() || inst.empty()) throw ValidationError("instance: expected a non-empty array of arms");
  for (std::size_t i = 0; i < inst.size(); ++i) {
    cfg.arms.push_back(parse_arm(inst[i], "instance[" + std::to_string(i) + "]"));
  }
  cfg.policy = parse_policy(doc.at("policy"), "policy");
  cfg.horizon = get_integer(doc, "horizon", "", 1);
  if (doc.contains("replications")) cfg.replications = get_integer(doc, "replications", "", 1);
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      throw ValidationError("seed: expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("checkpoints")) {
    const json& c = doc.at("checkpoints");
    if (!c.is_array()) throw ValidationError("checkpoints: expected an array of integers");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].is_number_integer() || c[i].get<std::int64_t>() < 1) {
        throw ValidationError("checkpoints[" + std::to_string(i) + "]: expected a positive integer");
      }
      cfg.checkpoints.push_back(c[i].get<std::int64_t>());
    }
  }
  if (doc.contains("paired")) {
    if (!doc.at("paired").is_boolean()) throw ValidationError("paired: expected true or false");
    cfg.paired = doc.at("paired").get<bool>();
  }
  if (doc.contains("output")) cfg.output = parse_output(doc.at("output"), "output");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

nlohmann::json to_json(const ArmParams& arm) {
  return json{{"p01", arm.p01},
              {"p10", arm.p10},
              {"r0", arm.r0},
              {"r1", arm.r1},
              {"init_state", std::string(to_string(arm.init_state))}};
}

nlohmann::json to_json(const PolicyConfig& policy) {
  json j{{"kind", std::string(to_string(policy.kind))},
         {"tie_break", std::string(to_string(policy.tie_break))},
         {"estimator_init", policy.estimator_init}};
  if (policy.exploration) j["exploration"] = std::string(to_string(*policy.exploration));
  if (policy.ucb_sm_constant) j["ucb_sm_constant"] = *policy.ucb_sm_constant;
  return j;
}

nlohmann::json to_json(const RunConfig& config) {
  json arms = json::array();
  for (const ArmParams& a : config.arms) arms.push_back(to_json(a));
  json j{{"instance", arms},
         {"policy", to_json(config.policy)},
         {"horizon", config.horizon},
         {"replications", config.replications},
         {"seed", config.seed},
         {"paired", config.paired},
         {"output", json{{"format", std::string(to_string(config.output.format))}}}};
  if (!config.checkpoints.empty()) j["checkpoints"] = config.checkpoints;
  if (!config.output.path.empty()) j["output"]["path"] = config.output.path;
  return j;
}

std::string canonical_dump(const RunConfig& config) {
  json j = to_json(config);
  j.erase("output");  // where results go is not part of the experiment
  return j.dump();
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_dump(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rested
