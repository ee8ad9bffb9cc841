#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "rested/bandit_core.hpp"

namespace rested {

/// Known names: scenario1, scenario2, iid_bernoulli. iid_bernoulli embeds each
/// mean mu in (0, 1) as p01 = mu, p10 = 1 - mu and needs at least one mean;
/// the scenarios take none.
std::vector<ArmParams> preset_arms(std::string_view name, std::span<const double> means = {});

/// preset_arms wrapped in an instance (so at least two arms, unique best).
BanditInstance preset(std::string_view name, std::span<const double> means = {});

std::span<const std::string_view> preset_names();

}  // namespace rested
