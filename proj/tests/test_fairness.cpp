#include <doctest.h>

#include <cmath>

#include "fairnav/assignment.hpp"
#include "fairnav/dynamics.hpp"
#include "fairnav/errors.hpp"
#include "fairnav/fairness.hpp"

using namespace fairnav;

TEST_CASE("fairness metric values") {
  const double equal[] = {2, 2, 2};
  const FairnessSnapshot a = fairness_metric(equal, 1e-5);
  CHECK(a.std == 0.0);
  CHECK(a.fairness == 2.0 / 1e-5);

  const double d[] = {3, 4, 5};
  const FairnessSnapshot b = fairness_metric(d, 1e-5);
  CHECK(b.mean == 4.0);
  CHECK(b.std == doctest::Approx(0.816496580927726).epsilon(1e-12));
  CHECK(b.fairness == doctest::Approx(4.898919486301).epsilon(1e-9));
  CHECK(std::abs(b.fairness - 4.8989) < 1e-3);

  const double scaled[] = {30, 40, 50};
  CHECK(std::abs(fairness_metric(scaled, 1e-5).fairness - b.fairness) < 1e-3 * b.fairness);

  const double permuted[] = {5, 3, 4};
  CHECK(fairness_metric(permuted, 1e-5).fairness == b.fairness);
}

TEST_CASE("fairness metric edge cases") {
  const double zeros[] = {0, 0, 0};
  const FairnessSnapshot z = fairness_metric(zeros, 1e-5);
  CHECK(z.fairness == 0.0);
  CHECK(z.cv == 0.0);
  const double one[] = {1};
  CHECK_THROWS_AS(fairness_metric(one, 1e-5), std::invalid_argument);
  const double negative[] = {1, -1};
  CHECK_THROWS_AS(fairness_metric(negative, 1e-5), std::invalid_argument);
}

TEST_CASE("fairness reward") {
  FairnessConfig cfg;
  FairnessSnapshot s;
  s.fairness = cfg.tau0;
  CHECK(fairness_reward(s, cfg) == 0.0);
  s.fairness = 2.0;
  CHECK(fairness_reward(s, cfg) == doctest::Approx(0.380797077978).epsilon(1e-9));
  s.fairness = 1e12;
  CHECK(fairness_reward(s, cfg) <= cfg.lambda);
  CHECK(fairness_reward(s, cfg) == doctest::Approx(cfg.lambda));
  s.fairness = 0.0;
  CHECK(std::abs(fairness_reward(s, cfg)) <= cfg.lambda);

  cfg.epsilon = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

namespace {

WorldState two_agents() {
  WorldState s;
  s.agents = {AgentState{{0, 0}}, AgentState{{0.5, 0}}};
  s.goals = {GoalState{{0, 0}}, GoalState{{0.5, 0.5}}};
  return s;
}

}  // namespace

TEST_CASE("reward decomposition") {
  WorldConfig world;
  FairnessConfig fcfg;
  Assignment a{{0, 1}, AssignMode::Optimal};
  const double dists[] = {1, 1};
  const FairnessSnapshot snap = fairness_metric(dists, fcfg.epsilon);

  SUBCASE("arrival on the assigned goal") {
    StepOutcome out;
    out.new_state = two_agents();
    out.new_state.agents[0].done = true;
    out.new_state.agents[0].claimed_goal = 0;
    out.newly_done = {0};
    const auto r = total_reward(out.new_state, a, out, snap, fcfg, world);
    CHECK(r[0].dist_reward == 0.0);
    CHECK(r[0].goal_reward == world.goal_reward);
    CHECK(r[0].fair_reward == 0.0);
    CHECK(r[0].total == world.goal_reward);
    CHECK(r[1].dist_reward == doctest::Approx(-0.5));

    out.newly_done.clear();
    const auto later = total_reward(out.new_state, a, out, snap, fcfg, world);
    CHECK(later[0].goal_reward == 0.0);
  }
  SUBCASE("collision") {
    StepOutcome out;
    out.new_state = two_agents();
    out.collisions = {Collision{1, {EntityKind::Obstacle, 0}}};
    const auto r = total_reward(out.new_state, a, out, snap, fcfg, world);
    CHECK(r[1].total == doctest::Approx(-0.5 - 5.0));
    CHECK(r[1].collision_penalty == -5.0);
    CHECK(r[0].collision_penalty == 0.0);
  }
  SUBCASE("fairness term is shared") {
    fcfg.fairness_reward_enabled = true;
    StepOutcome out;
    out.new_state = two_agents();
    const auto r = total_reward(out.new_state, a, out, snap, fcfg, world);
    CHECK(r[0].fair_reward == r[1].fair_reward);
    CHECK(r[0].fair_reward == fairness_reward(snap, fcfg));
    for (const auto& x : r) {
      CHECK(x.total == reward_total(x.dist_reward, x.fair_reward, x.goal_reward, x.collision_penalty));
    }
  }
}
