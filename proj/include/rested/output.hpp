#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "rested/bounds.hpp"
#include "rested/config.hpp"
#include "rested/harness.hpp"

namespace rested {

/// Shortest decimal that reads back to the same double ("inf", "-inf",
/// "nan" for non-finite values).
std::string format_double(double x);

/// Columns: checkpoint_t, mean_regret, std_regret, mean_pseudo_regret,
/// pulls_1..pulls_K, sm_frac_1..sm_frac_K. sm_frac covers the rounds since
/// the previous checkpoint.
void write_csv(std::ostream& out, const ExperimentResult& result);

nlohmann::json result_json(const ExperimentResult& result, const RunConfig& config);

nlohmann::json bound_report_json(const BoundReport& report);

nlohmann::json concentration_json(const ConcentrationReport& report);

}  // namespace rested
