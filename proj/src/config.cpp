#include "fairnav/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "fairnav/errors.hpp"

namespace fairnav {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

Vec2 read_point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(std::string(what) + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json point(const Vec2& p) { return json::array({p.x, p.y}); }

Wall wall_from_json(const json& j) {
  reject_unknown(j, {"from", "to", "thickness"}, "wall");
  if (!j.contains("from") || !j.contains("to")) throw ConfigError("wall needs 'from' and 'to'");
  Wall w;
  w.from = read_point(j.at("from"), "wall.from");
  w.to = read_point(j.at("to"), "wall.to");
  read(j, "thickness", w.thickness);
  wall_box(w);  // axis-alignment check
  return w;
}

FormationSpec formation_from_json(const json& j, int num_agents) {
  reject_unknown(j, {"shape", "landmarks", "scale", "n_positions", "threshold"}, "formation");
  FormationSpec f;
  std::string shape = "circle";
  read(j, "shape", shape);
  f.shape = parse_formation_shape(shape);
  f.landmarks.clear();
  if (j.contains("landmarks")) {
    if (!j["landmarks"].is_array()) throw ConfigError("formation.landmarks must be a list");
    for (const json& p : j["landmarks"]) f.landmarks.push_back(read_point(p, "landmark"));
  } else if (f.shape == FormationShape::Line) {
    f.landmarks = {{-0.6, 0.0}, {0.6, 0.0}};
  } else {
    f.landmarks = {{0.0, 0.0}};
  }
  if (f.shape == FormationShape::Arrow) f.scale = 0.6;
  if (f.shape == FormationShape::Infinity) f.scale = 0.8;
  read(j, "scale", f.scale);
  f.n_positions = num_agents;
  read(j, "n_positions", f.n_positions);
  read(j, "threshold", f.threshold);
  return f;
}

}  // namespace

WorldConfig world_config_from_json(const json& j) {
  reject_unknown(j,
                 {"world_half_extent", "dt", "damping", "accel_magnitude", "max_speed",
                  "sensing_radius", "agent_radius", "goal_radius", "obstacle_radius",
                  "wall_thickness", "episode_length", "collision_penalty", "goal_reward",
                  "done_threshold"},
                 "world");
  WorldConfig c;
  read(j, "world_half_extent", c.world_half_extent);
  read(j, "dt", c.dt);
  read(j, "damping", c.damping);
  read(j, "accel_magnitude", c.accel_magnitude);
  read(j, "max_speed", c.max_speed);
  read(j, "sensing_radius", c.sensing_radius);
  read(j, "agent_radius", c.agent_radius);
  read(j, "goal_radius", c.goal_radius);
  read(j, "obstacle_radius", c.obstacle_radius);
  read(j, "wall_thickness", c.wall_thickness);
  read(j, "episode_length", c.episode_length);
  read(j, "collision_penalty", c.collision_penalty);
  read(j, "goal_reward", c.goal_reward);
  if (j.contains("done_threshold")) {
    double d = 0;
    read(j, "done_threshold", d);
    c.done_threshold_override = d;
  }
  return c;
}

FairnessConfig fairness_config_from_json(const json& j) {
  reject_unknown(j, {"epsilon", "lambda", "tau0", "fairness_reward_enabled"}, "fairness");
  FairnessConfig c;
  read(j, "epsilon", c.epsilon);
  read(j, "lambda", c.lambda);
  read(j, "tau0", c.tau0);
  read(j, "fairness_reward_enabled", c.fairness_reward_enabled);
  return c;
}

FileConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"num_agents", "num_obstacles", "walls", "assignment_mode",
                  "fairness_reward_enabled", "formation", "seed", "episode_length", "episodes",
                  "policy", "external_cmd", "external_timeout_ms", "world", "fairness",
                  "controller"},
                 "config");
  FileConfig fc;
  RunConfig& rc = fc.run;
  if (j.contains("world")) rc.world = world_config_from_json(j["world"]);
  if (j.contains("fairness")) rc.fairness = fairness_config_from_json(j["fairness"]);

  ScenarioConfig& s = rc.scenario;
  s.episode_length = rc.world.episode_length;
  read(j, "num_agents", s.num_agents);
  read(j, "num_obstacles", s.num_obstacles);
  read(j, "seed", s.seed);
  read(j, "episode_length", s.episode_length);
  read(j, "fairness_reward_enabled", s.fairness_reward_enabled);
  if (j.contains("assignment_mode")) {
    std::string mode;
    read(j, "assignment_mode", mode);
    s.assignment_mode = parse_assign_mode(mode);
  }
  if (j.contains("walls")) {
    if (!j["walls"].is_array()) throw ConfigError("walls must be a list");
    for (const json& w : j["walls"]) s.walls.push_back(wall_from_json(w));
  }
  if (j.contains("formation")) {
    s.formation = formation_from_json(j["formation"], s.num_agents);
    fc.formation_positions_explicit = j["formation"].contains("n_positions");
  }

  if (j.contains("episodes")) {
    int e = 0;
    read(j, "episodes", e);
    fc.episodes = e;
  }
  if (j.contains("policy")) {
    std::string p;
    read(j, "policy", p);
    rc.policy.mode = parse_policy_mode(p);
  }
  read(j, "external_cmd", rc.policy.external_command);
  if (j.contains("external_timeout_ms")) {
    int ms = 0;
    read(j, "external_timeout_ms", ms);
    rc.policy.external_timeout = std::chrono::milliseconds(ms);
  }
  if (j.contains("controller")) {
    const json& c = j["controller"];
    reject_unknown(c, {"avoid_gain", "avoid_range", "arrive_time"}, "controller");
    read(c, "avoid_gain", rc.policy.controller.avoid_gain);
    read(c, "avoid_range", rc.policy.controller.avoid_range);
    read(c, "arrive_time", rc.policy.controller.arrive_time);
  }
  return fc;
}

FileConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json to_json(const WorldConfig& c) {
  json j = {{"world_half_extent", c.world_half_extent},
            {"dt", c.dt},
            {"damping", c.damping},
            {"accel_magnitude", c.accel_magnitude},
            {"max_speed", c.max_speed},
            {"sensing_radius", c.sensing_radius},
            {"agent_radius", c.agent_radius},
            {"goal_radius", c.goal_radius},
            {"obstacle_radius", c.obstacle_radius},
            {"wall_thickness", c.wall_thickness},
            {"episode_length", c.episode_length},
            {"collision_penalty", c.collision_penalty},
            {"goal_reward", c.goal_reward}};
  if (c.done_threshold_override) j["done_threshold"] = *c.done_threshold_override;
  return j;
}

json to_json(const FairnessConfig& c) {
  return {{"epsilon", c.epsilon},
          {"lambda", c.lambda},
          {"tau0", c.tau0},
          {"fairness_reward_enabled", c.fairness_reward_enabled}};
}

json to_json(const FormationSpec& f) {
  json lm = json::array();
  for (const Vec2& p : f.landmarks) lm.push_back(point(p));
  return {{"shape", std::string(to_string(f.shape))},
          {"landmarks", lm},
          {"scale", f.scale},
          {"n_positions", f.n_positions},
          {"threshold", f.threshold}};
}

json to_json(const ScenarioConfig& s) {
  json walls = json::array();
  for (const Wall& w : s.walls) {
    walls.push_back({{"from", point(w.from)}, {"to", point(w.to)}, {"thickness", w.thickness}});
  }
  json j = {{"num_agents", s.num_agents},
            {"num_obstacles", s.num_obstacles},
            {"walls", walls},
            {"assignment_mode", std::string(to_string(s.assignment_mode))},
            {"fairness_reward_enabled", s.fairness_reward_enabled},
            {"seed", s.seed},
            {"episode_length", s.episode_length}};
  if (s.formation) j["formation"] = to_json(*s.formation);
  return j;
}

}  // namespace fairnav
