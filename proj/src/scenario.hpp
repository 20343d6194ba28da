#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "catalog.hpp"
#include "chain.hpp"
#include "spectral.hpp"

// A chain definition as read from JSON configs and command-line flags.
namespace bds::scenario {

struct ScenarioConfig {
  std::string family;
  std::map<std::string, double> params;
  std::optional<int> N;
  catalog::SetTag set = catalog::SetTag::Basic;
  chain::TimeStep step = chain::TimeStep::automatic();
  std::optional<long> lattice_cutoff;
  double epsilon_tail = 1e-12;
  std::uint64_t seed = 0;
};

// "auto", "auto:0.3" or a number.
chain::TimeStep parse_time_step(const std::string& text);
nlohmann::json time_step_json(const chain::TimeStep& step);

ScenarioConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& config);

catalog::ValidatedFamily family(const ScenarioConfig& config);
spectral::ChainOptions chain_options(const ScenarioConfig& config);
// The basis of the chain selected by `set`.
spectral::SpectralBasis solve(const ScenarioConfig& config);

}  // namespace bds::scenario
