#include "fairnav/observation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairnav {

std::vector<double> update_occupancy_flags(const WorldState& state) {
  std::vector<double> flags(state.goals.size(), 0.0);
  for (std::size_t j = 0; j < state.goals.size(); ++j) {
    double d_min = std::numeric_limits<double>::infinity();
    for (const AgentState& a : state.agents) {
      d_min = std::min(d_min, distance(a.position, state.goals[j].position));
    }
    flags[j] = std::clamp(1.0 - d_min, 0.0, 1.0);
  }
  return flags;
}

void refresh_occupancy_flags(WorldState& state) {
  const std::vector<double> flags = update_occupancy_flags(state);
  for (std::size_t j = 0; j < flags.size(); ++j) state.goals[j].occupancy_flag = flags[j];
}

std::array<double, 10> EgoObservation::to_array() const {
  return {position.x,  position.y,  velocity.x, velocity.y, goal1_rel.x,
          goal1_rel.y, goal1_flag,  goal2_rel.x, goal2_rel.y, goal2_flag};
}

EgoObservation EgoObservation::from_array(const std::array<double, 10>& a) {
  return {{a[0], a[1]}, {a[2], a[3]}, {a[4], a[5]}, a[6], {a[7], a[8]}, a[9]};
}

namespace {

// Goal indices sorted by distance from p, ties by index.
std::vector<int> goals_by_distance(const WorldState& state, const Vec2& p) {
  std::vector<int> order(state.goals.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> d(state.goals.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = distance(p, state.goals[j].position);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
  return order;
}

}  // namespace

GoalChoice choose_goals(const WorldState& state, int agent, const WorldConfig& config) {
  const AgentState& self = state.agents.at(agent);
  const std::vector<int> order = goals_by_distance(state, self.position);
  GoalChoice choice{order.at(0), order.at(1), false};
  if (self.done) return choice;

  bool free_nearby = false;
  for (int j : order) {
    const GoalState& g = state.goals[j];
    if (distance(self.position, g.position) > config.sensing_radius) break;
    if (g.occupancy_flag < kOccupiedThreshold) {
      free_nearby = true;
      break;
    }
  }
  if (free_nearby) return choice;

  for (int j : order) {
    if (state.goals[j].occupancy_flag < kOccupiedThreshold) {
      if (j != choice.goal1) {
        choice.goal2 = j == choice.goal2 ? choice.goal1 : choice.goal2;
        choice.goal1 = j;
        choice.fallback = true;
      }
      break;
    }
  }
  return choice;
}

EgoObservation observe(const WorldState& state, int agent, const WorldConfig& config) {
  const GoalChoice c = choose_goals(state, agent, config);
  const AgentState& self = state.agents.at(agent);
  const GoalState& g1 = state.goals[c.goal1];
  const GoalState& g2 = state.goals[c.goal2];
  return {self.position,          self.velocity,    g1.position - self.position,
          g1.occupancy_flag,      g2.position - self.position, g2.occupancy_flag};
}

std::vector<Vec2> wall_samples(const Wall& wall, const WorldConfig& config) {
  const double spacing = 2.0 * config.agent_radius;
  const double len = distance(wall.from, wall.to);
  const int segments = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  std::vector<Vec2> pts;
  pts.reserve(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    pts.push_back(wall.from + (wall.to - wall.from) * (static_cast<double>(k) / segments));
  }
  return pts;
}

std::vector<GraphEntity> graph_entities(const WorldState& state, const WorldConfig& config) {
  std::vector<GraphEntity> out;
  int id = 0;
  for (const AgentState& a : state.agents) {
    out.push_back({id++, EntityType::Agent, a.position, a.velocity});
  }
  for (const Obstacle& o : state.obstacles) {
    out.push_back({id++, EntityType::Obstacle, o.center, {}});
  }
  for (const Wall& w : state.walls) {
    for (const Vec2& p : wall_samples(w, config)) out.push_back({id++, EntityType::Obstacle, p, {}});
  }
  if (state.landmarks.empty()) {
    for (const GoalState& g : state.goals) out.push_back({id++, EntityType::Goal, g.position, {}});
  } else {
    for (const Vec2& l : state.landmarks) out.push_back({id++, EntityType::Goal, l, {}});
  }
  return out;
}

EntityGraph build_graph(const WorldState& state, int agent, const WorldConfig& config) {
  const AgentState& self = state.agents.at(agent);
  const std::vector<GraphEntity> all = graph_entities(state, config);

  std::vector<const GraphEntity*> members;
  EntityGraph graph;
  for (const GraphEntity& e : all) {
    if (e.id == agent || distance(e.position, self.position) <= config.sensing_radius) {
      if (e.id == agent) graph.ego_node = static_cast<int>(members.size());
      members.push_back(&e);
    }
  }

  for (const GraphEntity* e : members) {
    GraphNode node;
    node.entity_id = e->id;
    node.type = e->type;
    const Vec2 rel_p = e->position - self.position;
    const Vec2 rel_v = e->type == EntityType::Agent ? e->velocity - self.velocity : Vec2{};
    const int g = goals_by_distance(state, e->position).front();
    const Vec2 rel_g = state.goals[g].position - self.position;
    node.features = {rel_p.x, rel_p.y, rel_v.x, rel_v.y, rel_g.x, rel_g.y,
                     state.goals[g].occupancy_flag, static_cast<double>(e->type)};
    graph.nodes.push_back(node);
  }

  for (std::size_t s = 0; s < members.size(); ++s) {
    for (std::size_t d = 0; d < members.size(); ++d) {
      if (s == d || members[d]->type != EntityType::Agent) continue;
      if (distance(members[s]->position, members[d]->position) <= config.sensing_radius) {
        graph.edges.emplace_back(static_cast<int>(s), static_cast<int>(d));
      }
    }
  }
  return graph;
}

}  // namespace fairnav
