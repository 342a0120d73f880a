#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fairnav/runner.hpp"

namespace fairnav {

// Run settings that may come from the config file or the command line.
struct FileConfig {
  RunConfig run;
  std::optional<int> episodes;
  // Formation n_positions was given explicitly (otherwise it tracks
  // num_agents, including command-line overrides).
  bool formation_positions_explicit = false;
};

// JSON configuration layout (every key optional, unknown keys rejected):
//
//   {
//     "num_agents": 3, "num_obstacles": 0, "seed": 0, "episode_length": 100,
//     "assignment_mode": "optimal" | "random" | "minmax",
//     "fairness_reward_enabled": false,
//     "walls": [{"from": [x, y], "to": [x, y], "thickness": 0.02}],
//     "formation": {"shape": "circle", "landmarks": [[0, 0]], "scale": 0.5,
//                   "n_positions": 3, "threshold": 0.1},
//     "episodes": 100,
//     "policy": "scripted-assigned" | "scripted-ego" | "external",
//     "external_cmd": "...", "external_timeout_ms": 10000,
//     "world": {WorldConfig fields}, "fairness": {"epsilon", "lambda", "tau0"},
//     "controller": {"avoid_gain", "avoid_range", "arrive_time"}
//   }
//
// Throws ConfigError with the offending key.
FileConfig config_from_json(const nlohmann::json& j);
FileConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const WorldConfig& c);
nlohmann::json to_json(const FairnessConfig& c);
nlohmann::json to_json(const ScenarioConfig& s);
nlohmann::json to_json(const FormationSpec& f);

WorldConfig world_config_from_json(const nlohmann::json& j);
FairnessConfig fairness_config_from_json(const nlohmann::json& j);

}  // namespace fairnav
