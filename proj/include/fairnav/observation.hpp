#pragma once

#include <array>
#include <utility>
#include <vector>

#include "fairnav/world.hpp"

namespace fairnav {

// A goal counts as occupied for the nearest-unoccupied fallback at or above
// this flag value (some agent within 0.05 of it).
inline constexpr double kOccupiedThreshold = 0.95;

// eta_j = clamp(1 - min_i |p_i - g_j|, 0, 1), from scratch over all agents.
std::vector<double> update_occupancy_flags(const WorldState& state);

// Writes update_occupancy_flags() into state.goals.
void refresh_occupancy_flags(WorldState& state);

struct EgoObservation {
  Vec2 position;
  Vec2 velocity;
  Vec2 goal1_rel;
  double goal1_flag = 0.0;
  Vec2 goal2_rel;
  double goal2_flag = 0.0;

  // [px, py, vx, vy, g1x, g1y, eta1, g2x, g2y, eta2]
  std::array<double, 10> to_array() const;
  static EgoObservation from_array(const std::array<double, 10>& a);

  friend bool operator==(const EgoObservation&, const EgoObservation&) = default;
};

// Goal indices behind an ego observation.
struct GoalChoice {
  int goal1 = 0;
  int goal2 = 0;
  bool fallback = false;
};

// Two nearest goals (ties by lower index). When the agent is not done and
// no goal within sensing range is free, goal1 becomes the nearest free goal
// anywhere in the world. Requires at least two goals.
GoalChoice choose_goals(const WorldState& state, int agent, const WorldConfig& config);

EgoObservation observe(const WorldState& state, int agent, const WorldConfig& config);

enum class EntityType : int { Agent = 0, Obstacle = 1, Goal = 2 };

inline constexpr int kNodeFeatures = 8;

struct GraphNode {
  int entity_id = 0;
  EntityType type = EntityType::Agent;
  // [rel_px, rel_py, rel_vx, rel_vy, goal_rel_x, goal_rel_y, goal_eta, type]
  std::array<double, kNodeFeatures> features{};

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct EntityGraph {
  int ego_node = 0;
  std::vector<GraphNode> nodes;
  // (source node, destination node), indices into nodes.
  std::vector<std::pair<int, int>> edges;

  friend bool operator==(const EntityGraph&, const EntityGraph&) = default;
};

// Everything an agent graph can contain, with stable ids: agents first, then
// obstacles, then wall samples, then goal-type entities (goals, or landmarks
// in formation scenarios).
struct GraphEntity {
  int id = 0;
  EntityType type = EntityType::Agent;
  Vec2 position;
  Vec2 velocity;
};
std::vector<GraphEntity> graph_entities(const WorldState& state, const WorldConfig& config);

// Sample points along each wall centerline, 2 * agent_radius apart.
std::vector<Vec2> wall_samples(const Wall& wall, const WorldConfig& config);

// Ego node plus every entity within sensing_radius (closed ball), ordered
// by entity id. Features are relative to the ego agent.
EntityGraph build_graph(const WorldState& state, int agent, const WorldConfig& config);

}  // namespace fairnav
