#pragma once

#include <span>
#include <vector>

#include "fairnav/world.hpp"

namespace fairnav {

enum class EntityKind { Agent, Obstacle, Wall };

struct EntityRef {
  EntityKind kind = EntityKind::Agent;
  int index = 0;

  friend bool operator==(const EntityRef&, const EntityRef&) = default;
};

// Agent `agent` overlaps `other`. Agent-agent pairs are stored once with
// agent < other.index.
struct Collision {
  int agent = 0;
  EntityRef other;

  friend bool operator==(const Collision&, const Collision&) = default;
};

struct StepOutcome {
  WorldState new_state;
  std::vector<Collision> collisions;
  std::vector<int> newly_done;
};

// Overlaps (center distance strictly below the sum of radii) between active
// agents and other agents, obstacles and walls. Done agents take part in
// none.
std::vector<Collision> detect_collisions(const WorldState& state, const WorldConfig& config);

// True when agent i appears on either side of some collision.
std::vector<bool> collided_agents(std::span<const Collision> collisions, int num_agents);

// Advances one step: damped double integrator with speed cap and arena
// clamping for active agents, collision detection, then goal claims (nearest
// free goal within done_threshold; lower agent index claims first). Done
// agents ignore their action. Throws DimensionError on an action count
// mismatch and std::logic_error when the episode is already over.
StepOutcome step(const WorldState& state, std::span<const Action> actions,
                 const WorldConfig& config);

}  // namespace fairnav
