#include "fairnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairnav/errors.hpp"
#include "fairnav/observation.hpp"
#include "fairnav/rng.hpp"

namespace fairnav {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

bool inside_arena(const Vec2& p, double half_extent) {
  return p.x >= -half_extent && p.x <= half_extent && p.y >= -half_extent &&
         p.y <= half_extent;
}

// Disc already placed in the arena, used for clearance checks.
struct PlacedDisc {
  Vec2 center;
  double radius;
};

class Placer {
 public:
  Placer(const WorldConfig& config, const std::vector<Wall>& walls, Rng& rng)
      : config_(config), rng_(rng) {
    for (const Wall& w : walls) boxes_.push_back(wall_box(w));
  }

  void reserve_fixed(const Vec2& center, double radius) { placed_.push_back({center, radius}); }

  Vec2 place(double radius, const char* what) {
    const double lim = config_.world_half_extent - radius;
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const Vec2 p{rng_.uniform(-lim, lim), rng_.uniform(-lim, lim)};
      if (fits(p, radius)) {
        placed_.push_back({p, radius});
        return p;
      }
    }
    std::ostringstream msg;
    msg << "could not place " << what << " after " << kPlacementAttempts
        << " attempts; scenario is too crowded";
    throw PlacementError(msg.str());
  }

 private:
  bool fits(const Vec2& p, double radius) const {
    for (const PlacedDisc& d : placed_) {
      if (distance(p, d.center) <= d.radius + radius + kPlacementClearance) return false;
    }
    for (const Box& b : boxes_) {
      if (distance_to_box(p, b) <= radius + kPlacementClearance) return false;
    }
    return true;
  }

  const WorldConfig& config_;
  Rng& rng_;
  std::vector<PlacedDisc> placed_;
  std::vector<Box> boxes_;
};

}  // namespace

void validate(const WorldConfig& c) {
  require(c.world_half_extent > 0, "world_half_extent must be > 0");
  require(c.dt > 0, "dt must be > 0");
  require(c.episode_length >= 1, "episode_length must be >= 1");
  require(c.sensing_radius > 0, "sensing_radius must be > 0");
  require(c.damping >= 0 && c.damping < 1, "damping must lie in [0, 1)");
  require(c.accel_magnitude > 0, "accel_magnitude must be > 0");
  require(c.max_speed > 0, "max_speed must be > 0");
  require(c.agent_radius > 0 && c.goal_radius >= 0 && c.obstacle_radius > 0,
          "entity radii must be positive");
  require(c.wall_thickness > 0, "wall_thickness must be > 0");
  require(c.collision_penalty >= 0 && c.goal_reward >= 0,
          "collision_penalty and goal_reward must be >= 0");
  require(c.done_threshold() > 0, "done_threshold must be > 0");
}

Vec2 action_direction(Action a) {
  switch (a) {
    case Action::Noop: return {0.0, 0.0};
    case Action::AccelPlusX: return {1.0, 0.0};
    case Action::AccelMinusX: return {-1.0, 0.0};
    case Action::AccelPlusY: return {0.0, 1.0};
    case Action::AccelMinusY: return {0.0, -1.0};
  }
  return {};
}

Action action_from_code(int code) {
  if (code < 0 || code >= kNumActions) {
    throw ProtocolError("action code " + std::to_string(code) + " outside 0..4");
  }
  return static_cast<Action>(code);
}

Box wall_box(const Wall& w) {
  const double h = w.thickness / 2.0;
  if (w.from.y == w.to.y) {
    return {{std::min(w.from.x, w.to.x), w.from.y - h}, {std::max(w.from.x, w.to.x), w.from.y + h}};
  }
  if (w.from.x == w.to.x) {
    return {{w.from.x - h, std::min(w.from.y, w.to.y)}, {w.from.x + h, std::max(w.from.y, w.to.y)}};
  }
  throw ConfigError("walls must be axis-aligned");
}

double distance_to_box(const Vec2& p, const Box& b) {
  const double dx = std::max({b.lo.x - p.x, 0.0, p.x - b.hi.x});
  const double dy = std::max({b.lo.y - p.y, 0.0, p.y - b.hi.y});
  return std::hypot(dx, dy);
}

bool WorldState::all_done() const {
  return std::all_of(agents.begin(), agents.end(), [](const AgentState& a) { return a.done; });
}

bool operator==(const AgentState& a, const AgentState& b) {
  return a.position == b.position && a.velocity == b.velocity &&
         a.distance_traveled == b.distance_traveled && a.done == b.done &&
         a.done_step == b.done_step && a.claimed_goal == b.claimed_goal;
}
bool operator==(const GoalState& a, const GoalState& b) {
  return a.position == b.position && a.occupancy_flag == b.occupancy_flag &&
         a.claimed_by == b.claimed_by;
}
bool operator==(const Obstacle& a, const Obstacle& b) {
  return a.center == b.center && a.radius == b.radius;
}
bool operator==(const Wall& a, const Wall& b) {
  return a.from == b.from && a.to == b.to && a.thickness == b.thickness;
}
bool operator==(const WorldState& a, const WorldState& b) {
  return a.step_index == b.step_index && a.agents == b.agents && a.goals == b.goals &&
         a.obstacles == b.obstacles && a.walls == b.walls && a.landmarks == b.landmarks;
}

std::string_view to_string(AssignMode mode) {
  switch (mode) {
    case AssignMode::Random: return "random";
    case AssignMode::Optimal: return "optimal";
    case AssignMode::MinMax: return "minmax";
  }
  return "?";
}

AssignMode parse_assign_mode(std::string_view name) {
  if (name == "random") return AssignMode::Random;
  if (name == "optimal") return AssignMode::Optimal;
  if (name == "minmax") return AssignMode::MinMax;
  throw ConfigError("unknown assignment mode '" + std::string(name) + "'");
}

void validate(const ScenarioConfig& s, const WorldConfig& c) {
  validate(c);
  require(s.num_agents >= 1, "num_agents must be >= 1");
  require(s.num_obstacles >= 0, "num_obstacles must be >= 0");
  require(s.episode_length >= 1, "episode_length must be >= 1");
  for (const Wall& w : s.walls) {
    const Box b = wall_box(w);
    require(inside_arena(b.lo, c.world_half_extent) && inside_arena(b.hi, c.world_half_extent),
            "walls must lie inside the arena");
  }
  if (s.formation) {
    validate(*s.formation);
    require(s.formation->n_positions == s.num_agents,
            "formation n_positions must equal num_agents");
  }
}

WorldState init_world(const WorldConfig& config, const ScenarioConfig& scenario,
                      std::uint64_t seed) {
  validate(scenario, config);
  Rng rng(mix_seed(seed, 0));
  Placer placer(config, scenario.walls, rng);

  WorldState state;
  state.walls = scenario.walls;
  for (Wall& w : state.walls) w.thickness = w.thickness > 0 ? w.thickness : config.wall_thickness;

  // Formation expected positions are fixed; reserve them first so random
  // entities keep clear of them.
  if (scenario.formation) {
    state.landmarks = scenario.formation->landmarks;
    for (const Vec2& p : expected_positions(*scenario.formation)) {
      if (!inside_arena(p, config.world_half_extent)) {
        throw ConfigError("formation expected position outside the arena");
      }
      placer.reserve_fixed(p, config.goal_radius);
      state.goals.push_back(GoalState{p, 0.0, std::nullopt});
    }
  }

  for (int k = 0; k < scenario.num_obstacles; ++k) {
    state.obstacles.push_back({placer.place(config.obstacle_radius, "obstacle"),
                               config.obstacle_radius});
  }
  if (!scenario.formation) {
    for (int k = 0; k < scenario.num_agents; ++k) {
      state.goals.push_back(GoalState{placer.place(config.goal_radius, "goal"), 0.0, std::nullopt});
    }
  }
  for (int k = 0; k < scenario.num_agents; ++k) {
    AgentState a;
    a.position = placer.place(config.agent_radius, "agent");
    state.agents.push_back(a);
  }
  refresh_occupancy_flags(state);
  return state;
}

std::optional<std::string> check_state(const WorldState& s, const WorldConfig& c) {
  auto fail = [](auto&&... parts) {
    std::ostringstream msg;
    (msg << ... << parts);
    return std::optional<std::string>(msg.str());
  };
  if (s.agents.size() != s.goals.size()) return fail("agent count != goal count");
  if (s.step_index < 0 || s.step_index > c.episode_length) {
    return fail("step_index ", s.step_index, " outside [0, episode_length]");
  }
  const double tol = 1e-12;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const AgentState& a = s.agents[i];
    if (!inside_arena(a.position, c.world_half_extent)) return fail("agent ", i, " outside arena");
    if (norm(a.velocity) > c.max_speed * (1 + tol)) return fail("agent ", i, " exceeds max_speed");
    if (a.distance_traveled < 0) return fail("agent ", i, " has negative distance");
    if (a.done) {
      if (!a.claimed_goal || *a.claimed_goal < 0 ||
          *a.claimed_goal >= static_cast<int>(s.goals.size())) {
        return fail("done agent ", i, " has no claimed goal");
      }
      const GoalState& g = s.goals[*a.claimed_goal];
      if (g.claimed_by != static_cast<int>(i)) return fail("goal/agent claim mismatch at agent ", i);
      if (distance(a.position, g.position) > c.done_threshold() * (1 + tol)) {
        return fail("done agent ", i, " is not at its goal");
      }
    }
  }
  for (std::size_t j = 0; j < s.goals.size(); ++j) {
    const GoalState& g = s.goals[j];
    if (!(g.occupancy_flag >= 0 && g.occupancy_flag <= 1)) return fail("goal ", j, " flag out of range");
    if (g.claimed_by) {
      const int i = *g.claimed_by;
      if (i < 0 || i >= s.num_agents() || s.agents[i].claimed_goal != static_cast<int>(j)) {
        return fail("goal ", j, " claimed by an agent that does not hold it");
      }
    }
  }
  return std::nullopt;
}

}  // namespace fairnav
