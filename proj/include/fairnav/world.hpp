#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairnav/formation.hpp"
#include "fairnav/geometry.hpp"

namespace fairnav {

// Physical and reward constants shared by every episode of a scenario.
struct WorldConfig {
  double world_half_extent = 1.0;  // arena is [-E, E]^2
  double dt = 0.1;
  double damping = 0.25;
  double accel_magnitude = 2.0;
  double max_speed = 1.0;
  double sensing_radius = 1.0;
  double agent_radius = 0.05;
  double goal_radius = 0.05;
  double obstacle_radius = 0.10;
  double wall_thickness = 0.02;
  int episode_length = 100;
  double collision_penalty = 5.0;
  double goal_reward = 5.0;
  // Defaults to agent_radius + goal_radius.
  std::optional<double> done_threshold_override;

  double done_threshold() const {
    return done_threshold_override.value_or(agent_radius + goal_radius);
  }
};

// Throws ConfigError on the first violated invariant.
void validate(const WorldConfig& config);

enum class Action : int {
  Noop = 0,
  AccelPlusX = 1,
  AccelMinusX = 2,
  AccelPlusY = 3,
  AccelMinusY = 4,
};

inline constexpr int kNumActions = 5;

// Unit direction of the acceleration an action applies (zero for Noop).
Vec2 action_direction(Action a);

// Throws ProtocolError for codes outside 0..4.
Action action_from_code(int code);

struct AgentState {
  Vec2 position;
  Vec2 velocity;
  double distance_traveled = 0.0;
  bool done = false;
  std::optional<int> done_step;
  std::optional<int> claimed_goal;
};

struct GoalState {
  Vec2 position;
  double occupancy_flag = 0.0;
  std::optional<int> claimed_by;
};

struct Obstacle {
  Vec2 center;
  double radius = 0.1;
};

// Axis-aligned wall: the segment from `from` to `to` thickened by
// `thickness` perpendicular to its direction.
struct Wall {
  Vec2 from;
  Vec2 to;
  double thickness = 0.02;
};

struct Box {
  Vec2 lo;
  Vec2 hi;
};

// Throws ConfigError for walls that are not axis-aligned.
Box wall_box(const Wall& wall);
double distance_to_box(const Vec2& p, const Box& box);

struct WorldState {
  int step_index = 0;
  std::vector<AgentState> agents;
  std::vector<GoalState> goals;
  std::vector<Obstacle> obstacles;
  std::vector<Wall> walls;
  // Formation landmarks. Empty for navigation scenarios; when non-empty the
  // goals are formation expected positions and only the landmarks appear as
  // goal-type entities in the agent graphs.
  std::vector<Vec2> landmarks;

  int num_agents() const { return static_cast<int>(agents.size()); }
  bool all_done() const;

  friend bool operator==(const WorldState&, const WorldState&);
};

bool operator==(const AgentState& a, const AgentState& b);
bool operator==(const GoalState& a, const GoalState& b);
bool operator==(const Obstacle& a, const Obstacle& b);
bool operator==(const Wall& a, const Wall& b);

enum class AssignMode { Random, Optimal, MinMax };

std::string_view to_string(AssignMode mode);
// Accepts "random", "optimal", "minmax"; throws ConfigError otherwise.
AssignMode parse_assign_mode(std::string_view name);

struct ScenarioConfig {
  int num_agents = 3;
  int num_obstacles = 0;
  std::vector<Wall> walls;
  AssignMode assignment_mode = AssignMode::Optimal;
  bool fairness_reward_enabled = false;
  std::optional<FormationSpec> formation;
  std::uint64_t seed = 0;
  int episode_length = 100;
};

// Throws ConfigError.
void validate(const ScenarioConfig& scenario, const WorldConfig& config);

// Attempts per entity before placement gives up.
inline constexpr int kPlacementAttempts = 10000;
// Extra gap between entities at placement, on top of the sum of radii.
inline constexpr double kPlacementClearance = 0.01;

// Random initial state: obstacles, goals (or formation expected positions)
// and agents placed by rejection sampling without overlap. Deterministic in
// the seed. Throws PlacementError when the arena is too crowded.
WorldState init_world(const WorldConfig& config, const ScenarioConfig& scenario,
                      std::uint64_t seed);

// Returns a description of the first violated state invariant, if any.
std::optional<std::string> check_state(const WorldState& state, const WorldConfig& config);

}  // namespace fairnav
