#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairnav/observation.hpp"
#include "fairnav/world.hpp"

namespace fairnav {

// Everything a decentralized policy sees for one agent at one step.
struct PolicyInput {
  EgoObservation ego;
  EntityGraph graph;
  int agent = 0;
  int step = 0;
  bool done = false;
  // Relative position of the goal handed down by the assignment, only set
  // when the controller runs in fixed-assignment mode.
  std::optional<Vec2> assigned_goal_rel;

  friend bool operator==(const PolicyInput&, const PolicyInput&) = default;
};

PolicyInput make_policy_input(const WorldState& state, int agent, const WorldConfig& config);

enum class TargetMode { EgoGoal1, FixedAssignment };

struct ControllerConfig {
  TargetMode target_mode = TargetMode::EgoGoal1;
  double avoid_gain = 0.01;
  double avoid_range = 0.3;
  // Approach speed is capped at distance / arrive_time.
  double arrive_time = 0.5;
};

// Throws ConfigError when avoid_range exceeds the sensing radius.
void validate(const ControllerConfig& cfg, const WorldConfig& world_cfg);

// Desired velocity of the scripted controller: up to max_speed toward the
// target plus avoid_gain / d^2 repulsion from agent and obstacle nodes within
// avoid_range that are no farther away than the target.
Vec2 desired_velocity(const PolicyInput& input, const ControllerConfig& cfg,
                      const WorldConfig& world_cfg);

// Scripted stand-in for a trained policy. Picks the action whose
// acceleration direction has the largest projection on the velocity error
// desired - current; Noop inside the accel*dt/2 dead zone and for done
// agents. Reads nothing but its arguments.
Action scripted_action(const PolicyInput& input, const ControllerConfig& cfg,
                       const WorldConfig& world_cfg);

// Wire format, one JSON object per line.
//   request:  {"step": s, "agents": [{"id", "done", "ego": [10 numbers],
//              "graph": {"ego": k, "nodes": [{"entity", "type", "x": [8]}],
//              "edges": [[src, dst], ...]}, "assigned"?: [x, y]}, ...]}
//   response: {"actions": [code, ...]}  with codes 0..4
nlohmann::json to_json(const PolicyInput& input);
// Throws ProtocolError on malformed input.
PolicyInput policy_input_from_json(const nlohmann::json& j);
std::string encode_request(int step, std::span<const PolicyInput> inputs);
// Throws ProtocolError unless the line holds exactly `expected` valid codes.
std::vector<Action> decode_response(const std::string& line, std::size_t expected);

// Child process driven over stdin/stdout, one request and one response line
// per step. Owned by a single episode.
class ExternalPolicy {
 public:
  // Runs `command` through /bin/sh -c.
  explicit ExternalPolicy(const std::string& command,
                          std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~ExternalPolicy();

  ExternalPolicy(const ExternalPolicy&) = delete;
  ExternalPolicy& operator=(const ExternalPolicy&) = delete;

  // Blocking request/response; throws ProtocolError on timeout, closed pipe,
  // or a malformed reply.
  std::vector<Action> exchange(int step, std::span<const PolicyInput> inputs);

 private:
  std::string read_line();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
};

}  // namespace fairnav
