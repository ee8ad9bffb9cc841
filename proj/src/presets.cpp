#include "rested/presets.hpp"

#include <array>
#include <string>

#include "rested/error.hpp"

namespace rested {
namespace {

constexpr std::array<std::string_view, 3> kNames{"scenario1", "scenario2", "iid_bernoulli"};

std::vector<ArmParams> from_table(std::span<const double> p01, std::span<const double> p10) {
  std::vector<ArmParams> arms;
  for (std::size_t i = 0; i < p01.size(); ++i) arms.push_back(ArmParams{p01[i], p10[i]});
  return arms;
}

}  // namespace

std::vector<ArmParams> preset_arms(std::string_view name, std::span<const double> means) {
  if (name == "scenario1" || name == "scenario2") {
    if (!means.empty()) throw ValidationError("preset " + std::string(name) + " takes no means");
  }
  if (name == "scenario1") {
    constexpr std::array p01{0.5, 0.4, 0.3, 0.2, 0.1};
    constexpr std::array p10{0.4, 0.55, 0.65, 0.65, 0.7};
    return from_table(p01, p10);
  }
  if (name == "scenario2") {
    constexpr std::array p01{0.5, 0.0004, 0.0003, 0.0002, 0.0001};
    constexpr std::array p10{0.4, 0.00055, 0.00065, 0.00065, 0.0007};
    return from_table(p01, p10);
  }
  if (name == "iid_bernoulli") {
    if (means.empty()) throw ValidationError("preset iid_bernoulli needs at least one mean");
    std::vector<ArmParams> arms;
    for (double mu : means) {
      if (!(mu > 0.0 && mu < 1.0)) {
        throw ValidationError("iid_bernoulli means must lie in (0, 1), got " + std::to_string(mu));
      }
      arms.push_back(ArmParams{mu, 1.0 - mu});
    }
    return arms;
  }
  throw ValidationError("unknown preset '" + std::string(name) +
                        "' (expected scenario1, scenario2 or iid_bernoulli)");
}

BanditInstance preset(std::string_view name, std::span<const double> means) {
  return BanditInstance(preset_arms(name, means));
}

std::span<const std::string_view> preset_names() { return kNames; }

}  // namespace rested
