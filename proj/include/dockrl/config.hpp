#ifndef DOCKRL_CONFIG_HPP_
#define DOCKRL_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dockrl/agent.hpp"
#include "dockrl/dynamics.hpp"
#include "dockrl/env.hpp"
#include "dockrl/reward.hpp"
#include "json.hpp"

namespace dockrl {

struct HarnessConfig {
  std::uint64_t seed = 0;
  long total_timesteps = 100000;
  long checkpoint_interval = 25000;
  int eval_runs = 2;
  int eval_episodes = 5;
  // Master seed for evaluation spawns; shared by every algorithm so they
  // face the same start states.
  std::uint64_t eval_seed = 12345;
  int curve_window = 20;
};

struct RunConfig {
  HydroParams dynamics;
  EnvConfig env;
  RewardSpec reward;
  std::string reward_kind = "continuous";
  AgentConfig agent;
  HarnessConfig harness;
};

nlohmann::json to_json(const RunConfig& cfg);

// Builds a config from a (possibly partial) JSON document layered over the
// defaults.  Unknown keys, wrong types and constraint violations throw
// ConfigError naming the dotted key.
RunConfig config_from_json(const nlohmann::json& doc);

// Applies "a.b.c=value" overrides left to right.  Values are parsed as JSON
// when possible and fall back to plain strings.
RunConfig apply_overrides(const RunConfig& base,
                          const std::vector<std::string>& assignments);

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& assignments = {});

// Throws ConfigError on the first violated constraint.
void validate(const RunConfig& cfg);

void write_resolved_config(const std::filesystem::path& path,
                           const RunConfig& cfg);

}  // namespace dockrl

#endif  // DOCKRL_CONFIG_HPP_
