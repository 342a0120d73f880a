#include "fairnav/policy.hpp"

#include <algorithm>

#include "fairnav/errors.hpp"

namespace fairnav {

using nlohmann::json;

PolicyInput make_policy_input(const WorldState& state, int agent, const WorldConfig& config) {
  PolicyInput in;
  in.ego = observe(state, agent, config);
  in.graph = build_graph(state, agent, config);
  in.agent = agent;
  in.step = state.step_index;
  in.done = state.agents.at(agent).done;
  return in;
}

void validate(const ControllerConfig& cfg, const WorldConfig& world_cfg) {
  if (!(cfg.avoid_gain >= 0)) throw ConfigError("avoid_gain must be >= 0");
  if (!(cfg.avoid_range >= 0) || cfg.avoid_range > world_cfg.sensing_radius) {
    throw ConfigError("avoid_range must lie in [0, sensing_radius]");
  }
  if (!(cfg.arrive_time > 0)) throw ConfigError("arrive_time must be > 0");
}

Vec2 desired_velocity(const PolicyInput& input, const ControllerConfig& cfg,
                      const WorldConfig& world_cfg) {
  const Vec2 target = cfg.target_mode == TargetMode::FixedAssignment && input.assigned_goal_rel
                          ? *input.assigned_goal_rel
                          : input.ego.goal1_rel;
  const double target_dist = norm(target);
  Vec2 desired = normalized(target) * std::min(world_cfg.max_speed, target_dist / cfg.arrive_time);
  for (std::size_t k = 0; k < input.graph.nodes.size(); ++k) {
    if (static_cast<int>(k) == input.graph.ego_node) continue;
    const GraphNode& node = input.graph.nodes[k];
    if (node.type == EntityType::Goal) continue;
    const Vec2 rel{node.features[0], node.features[1]};
    const double d = norm(rel);
    // Entities beyond the target cannot block the way to it.
    if (d <= 0.0 || d > cfg.avoid_range || d > target_dist) continue;
    desired -= rel * (cfg.avoid_gain / (d * d * d));
  }
  return desired;
}

Action scripted_action(const PolicyInput& input, const ControllerConfig& cfg,
                       const WorldConfig& world_cfg) {
  if (input.done) return Action::Noop;
  const Vec2 error = desired_velocity(input, cfg, world_cfg) - input.ego.velocity;
  if (norm(error) <= world_cfg.accel_magnitude * world_cfg.dt / 2.0) return Action::Noop;
  Action best = Action::Noop;
  double best_score = 0.0;
  for (int code = 1; code < kNumActions; ++code) {
    const Action a = static_cast<Action>(code);
    const double score = dot(action_direction(a), error);
    if (score > best_score) {
      best = a;
      best_score = score;
    }
  }
  return best;
}

json to_json(const PolicyInput& in) {
  json nodes = json::array();
  for (const GraphNode& n : in.graph.nodes) {
    nodes.push_back({{"entity", n.entity_id}, {"type", static_cast<int>(n.type)}, {"x", n.features}});
  }
  json edges = json::array();
  for (const auto& [s, d] : in.graph.edges) edges.push_back({s, d});
  json j = {{"id", in.agent},
            {"step", in.step},
            {"done", in.done},
            {"ego", in.ego.to_array()},
            {"graph", {{"ego", in.graph.ego_node}, {"nodes", nodes}, {"edges", edges}}}};
  if (in.assigned_goal_rel) j["assigned"] = {in.assigned_goal_rel->x, in.assigned_goal_rel->y};
  return j;
}

PolicyInput policy_input_from_json(const json& j) {
  try {
    PolicyInput in;
    in.agent = j.at("id").get<int>();
    in.step = j.value("step", 0);
    in.done = j.value("done", false);
    in.ego = EgoObservation::from_array(j.at("ego").get<std::array<double, 10>>());
    const json& g = j.at("graph");
    in.graph.ego_node = g.at("ego").get<int>();
    for (const json& n : g.at("nodes")) {
      GraphNode node;
      node.entity_id = n.at("entity").get<int>();
      const int type = n.at("type").get<int>();
      if (type < 0 || type > 2) throw ProtocolError("bad entity type");
      node.type = static_cast<EntityType>(type);
      node.features = n.at("x").get<std::array<double, kNodeFeatures>>();
      in.graph.nodes.push_back(node);
    }
    for (const json& e : g.at("edges")) {
      in.graph.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    if (j.contains("assigned")) {
      const auto a = j.at("assigned").get<std::array<double, 2>>();
      in.assigned_goal_rel = Vec2{a[0], a[1]};
    }
    return in;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed policy input: ") + e.what());
  }
}

std::string encode_request(int step, std::span<const PolicyInput> inputs) {
  json agents = json::array();
  for (const PolicyInput& in : inputs) agents.push_back(to_json(in));
  return json{{"step", step}, {"agents", agents}}.dump();
}

std::vector<Action> decode_response(const std::string& line, std::size_t expected) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("actions") || !j["actions"].is_array()) {
    throw ProtocolError("response lacks an \"actions\" array");
  }
  const json& arr = j["actions"];
  if (arr.size() != expected) {
    throw ProtocolError("response has " + std::to_string(arr.size()) + " actions, expected " +
                        std::to_string(expected));
  }
  std::vector<Action> out;
  out.reserve(expected);
  for (const json& a : arr) {
    if (!a.is_number_integer()) throw ProtocolError("action codes must be integers");
    out.push_back(action_from_code(a.get<int>()));
  }
  return out;
}

}  // namespace fairnav
