#include <doctest.h>

#include "fairnav/dynamics.hpp"
#include "fairnav/errors.hpp"
#include "fairnav/rng.hpp"

using namespace fairnav;

namespace {

WorldState agents_at(std::vector<Vec2> positions, std::vector<Vec2> goals) {
  WorldState s;
  for (const Vec2& p : positions) s.agents.push_back(AgentState{p});
  for (const Vec2& g : goals) s.goals.push_back(GoalState{g});
  return s;
}

}  // namespace

TEST_CASE("single step of the damped double integrator") {
  WorldConfig cfg;
  cfg.accel_magnitude = 0.5;
  const WorldState s = agents_at({{0, 0}, {0.5, 0.5}}, {{-0.8, -0.8}, {0.8, 0.8}});
  const Action actions[] = {Action::AccelPlusX, Action::Noop};
  const StepOutcome out = step(s, actions, cfg);
  const AgentState& a = out.new_state.agents[0];
  CHECK(a.velocity.x == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(a.velocity.y == 0.0);
  CHECK(a.position.x == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(a.position.y == 0.0);
  CHECK(a.distance_traveled == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(out.new_state.step_index == 1);
  CHECK(out.new_state.agents[1].position == Vec2{0.5, 0.5});
}

TEST_CASE("done agents ignore their action") {
  WorldConfig cfg;
  WorldState s = agents_at({{0, 0}, {0.5, 0.5}}, {{0, 0}, {0.8, 0.8}});
  s.agents[0].done = true;
  s.agents[0].done_step = 0;
  s.agents[0].claimed_goal = 0;
  s.agents[0].distance_traveled = 1.25;
  s.goals[0].claimed_by = 0;
  const Action actions[] = {Action::AccelPlusY, Action::Noop};
  const StepOutcome out = step(s, actions, cfg);
  CHECK(out.new_state.agents[0].position == Vec2{0, 0});
  CHECK(out.new_state.agents[0].distance_traveled == 1.25);
}

TEST_CASE("collision detection") {
  WorldConfig cfg;
  SUBCASE("overlapping agents") {
    const WorldState s = agents_at({{0, 0}, {0.08, 0}}, {{0.9, 0.9}, {-0.9, 0.9}});
    const auto c = detect_collisions(s, cfg);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == Collision{0, {EntityKind::Agent, 1}});
  }
  SUBCASE("single agent") {
    const WorldState s = agents_at({{0, 0}}, {{0.9, 0.9}});
    CHECK(detect_collisions(s, cfg).empty());
  }
  SUBCASE("touching is not a collision") {
    WorldState s = agents_at({{0, 0}}, {{0.9, 0.9}});
    s.obstacles.push_back({{0.125, 0}, 0.075});
    CHECK(detect_collisions(s, cfg).empty());
    s.obstacles[0].center.x = 0.12;
    CHECK(detect_collisions(s, cfg).size() == 1);
  }
  SUBCASE("three mutually overlapping agents") {
    const WorldState s =
        agents_at({{0, 0}, {0.05, 0}, {0.02, 0.04}}, {{0.9, 0.9}, {-0.9, 0.9}, {0.9, -0.9}});
    const auto c = detect_collisions(s, cfg);
    const std::vector<Collision> expected = {Collision{0, {EntityKind::Agent, 1}},
                                             Collision{0, {EntityKind::Agent, 2}},
                                             Collision{1, {EntityKind::Agent, 2}}};
    CHECK(c == expected);
    const auto hit = collided_agents(c, 3);
    CHECK(hit == std::vector<bool>{true, true, true});
  }
  SUBCASE("walls") {
    WorldState s = agents_at({{0, 0.055}}, {{0.9, 0.9}});
    s.walls.push_back(Wall{{-0.5, 0}, {0.5, 0}, 0.02});
    const auto c = detect_collisions(s, cfg);
    REQUIRE(c.size() == 1);
    CHECK(c[0].other.kind == EntityKind::Wall);
  }
  SUBCASE("done agents take part in no collision") {
    WorldState s = agents_at({{0, 0}, {0.08, 0}}, {{0, 0}, {-0.9, 0.9}});
    s.agents[0].done = true;
    s.agents[0].claimed_goal = 0;
    CHECK(detect_collisions(s, cfg).empty());
  }
}

TEST_CASE("goal claims go to the lower index first") {
  WorldConfig cfg;
  const WorldState s = agents_at({{0.03, 0}, {-0.03, 0}}, {{0, 0}, {0.9, 0.9}});
  const Action actions[] = {Action::Noop, Action::Noop};
  const StepOutcome out = step(s, actions, cfg);
  CHECK(out.newly_done == std::vector<int>{0});
  CHECK(out.new_state.agents[0].claimed_goal == 0);
  CHECK(out.new_state.agents[0].done_step == 1);
  CHECK(out.new_state.agents[0].velocity == Vec2{0, 0});
  CHECK_FALSE(out.new_state.agents[1].done);
  CHECK(out.new_state.goals[0].claimed_by == 0);
}

TEST_CASE("arena clamping zeroes the blocked velocity component") {
  WorldConfig cfg;
  WorldState s = agents_at({{0.99, 0}, {0, 0}}, {{-0.9, -0.9}, {-0.9, 0.9}});
  s.agents[0].velocity = {0.5, 0.2};
  const Action actions[] = {Action::AccelPlusX, Action::Noop};
  const StepOutcome out = step(s, actions, cfg);
  CHECK(out.new_state.agents[0].position.x == cfg.world_half_extent);
  CHECK(out.new_state.agents[0].velocity.x == 0.0);
  CHECK(out.new_state.agents[0].velocity.y > 0.0);
}

TEST_CASE("step preconditions") {
  WorldConfig cfg;
  WorldState s = agents_at({{0, 0}, {0.5, 0}}, {{0.9, 0.9}, {-0.9, 0.9}});
  const Action one[] = {Action::Noop};
  CHECK_THROWS_AS(step(s, one, cfg), DimensionError);
  s.step_index = cfg.episode_length;
  const Action two[] = {Action::Noop, Action::Noop};
  CHECK_THROWS_AS(step(s, two, cfg), std::logic_error);
}

TEST_CASE("random rollouts keep speed and arena bounds") {
  WorldConfig cfg;
  cfg.episode_length = 1000000;
  ScenarioConfig sc;
  sc.num_agents = 6;
  sc.num_obstacles = 2;
  WorldState s = init_world(cfg, sc, 11);
  Rng rng(99);
  std::vector<Action> actions(6);
  for (int t = 0; t < 2000; ++t) {
    for (Action& a : actions) a = static_cast<Action>(rng.below(kNumActions));
    const StepOutcome out = step(s, actions, cfg);
    for (int i = 0; i < 6; ++i) {
      CHECK(out.new_state.agents[i].distance_traveled >= s.agents[i].distance_traveled);
      if (s.agents[i].done) CHECK(out.new_state.agents[i].position == s.agents[i].position);
    }
    s = out.new_state;
    const auto bad = check_state(s, cfg);
    CHECK_MESSAGE(!bad, (bad ? *bad : ""));
  }
}
