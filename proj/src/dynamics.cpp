#include "fairnav/dynamics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fairnav/errors.hpp"
#include "fairnav/observation.hpp"

namespace fairnav {

std::vector<Collision> detect_collisions(const WorldState& state, const WorldConfig& config) {
  std::vector<Collision> out;
  const int n = state.num_agents();
  std::vector<Box> boxes;
  boxes.reserve(state.walls.size());
  for (const Wall& w : state.walls) boxes.push_back(wall_box(w));

  for (int i = 0; i < n; ++i) {
    const AgentState& a = state.agents[i];
    if (a.done) continue;
    for (int j = i + 1; j < n; ++j) {
      const AgentState& b = state.agents[j];
      if (b.done) continue;
      if (distance(a.position, b.position) < 2.0 * config.agent_radius) {
        out.push_back({i, {EntityKind::Agent, j}});
      }
    }
    for (int k = 0; k < static_cast<int>(state.obstacles.size()); ++k) {
      const Obstacle& o = state.obstacles[k];
      if (distance(a.position, o.center) < config.agent_radius + o.radius) {
        out.push_back({i, {EntityKind::Obstacle, k}});
      }
    }
    for (int k = 0; k < static_cast<int>(boxes.size()); ++k) {
      if (distance_to_box(a.position, boxes[k]) < config.agent_radius) {
        out.push_back({i, {EntityKind::Wall, k}});
      }
    }
  }
  return out;
}

std::vector<bool> collided_agents(std::span<const Collision> collisions, int num_agents) {
  std::vector<bool> hit(num_agents, false);
  for (const Collision& c : collisions) {
    hit.at(c.agent) = true;
    if (c.other.kind == EntityKind::Agent) hit.at(c.other.index) = true;
  }
  return hit;
}

StepOutcome step(const WorldState& state, std::span<const Action> actions,
                 const WorldConfig& config) {
  const int n = state.num_agents();
  if (static_cast<int>(actions.size()) != n) {
    throw DimensionError("got " + std::to_string(actions.size()) + " actions for " +
                         std::to_string(n) + " agents");
  }
  if (state.step_index >= config.episode_length) {
    throw std::logic_error("step() called after the last step of the episode");
  }

  StepOutcome out{state, {}, {}};
  WorldState& next = out.new_state;
  next.step_index = state.step_index + 1;
  const double lim = config.world_half_extent;

  for (int i = 0; i < n; ++i) {
    AgentState& a = next.agents[i];
    if (a.done) continue;
    const Vec2 accel = action_direction(actions[i]) * config.accel_magnitude;
    Vec2 v = a.velocity * (1.0 - config.damping) + accel * config.dt;
    const double speed = norm(v);
    if (speed > config.max_speed) v *= config.max_speed / speed;
    Vec2 p = a.position + v * config.dt;
    if (p.x < -lim || p.x > lim) {
      p.x = std::clamp(p.x, -lim, lim);
      v.x = 0.0;
    }
    if (p.y < -lim || p.y > lim) {
      p.y = std::clamp(p.y, -lim, lim);
      v.y = 0.0;
    }
    a.distance_traveled += distance(p, a.position);
    a.position = p;
    a.velocity = v;
  }

  // Agents that arrive this step are still active for collision purposes.
  out.collisions = detect_collisions(next, config);

  const double reach = config.done_threshold();
  for (int i = 0; i < n; ++i) {
    AgentState& a = next.agents[i];
    if (a.done) continue;
    int best = -1;
    double best_d = 0.0;
    for (int j = 0; j < static_cast<int>(next.goals.size()); ++j) {
      if (next.goals[j].claimed_by) continue;
      const double d = distance(a.position, next.goals[j].position);
      if (d <= reach && (best < 0 || d < best_d)) {
        best = j;
        best_d = d;
      }
    }
    if (best < 0) continue;
    a.done = true;
    a.done_step = next.step_index;
    a.claimed_goal = best;
    a.velocity = {};
    next.goals[best].claimed_by = i;
    out.newly_done.push_back(i);
  }

  refresh_occupancy_flags(next);
  return out;
}

}  // namespace fairnav
