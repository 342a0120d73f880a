#include "fairnav/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairnav/errors.hpp"

namespace fairnav {

void validate(const FairnessConfig& cfg) {
  if (!(cfg.epsilon > 0)) throw ConfigError("fairness epsilon must be > 0");
  if (!(cfg.lambda >= 0)) throw ConfigError("fairness lambda must be >= 0");
  if (!std::isfinite(cfg.tau0)) throw ConfigError("fairness tau0 must be finite");
}

FairnessSnapshot fairness_metric(std::span<const double> distances, double epsilon) {
  if (distances.size() < 2) {
    throw std::invalid_argument("fairness metric needs at least two agents");
  }
  FairnessSnapshot s;
  s.distances.assign(distances.begin(), distances.end());
  for (double d : distances) {
    if (d < 0) throw std::invalid_argument("distances must be >= 0");
  }
  // Summing in sorted order makes the result independent of agent order;
  // offsets from the minimum keep equal distances exactly equal to the mean.
  std::vector<double> sorted = s.distances;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double base = sorted.front();
  double offset = 0.0;
  for (double d : sorted) offset += d - base;
  s.mean = base + offset / n;
  double sq = 0.0;
  for (double d : sorted) sq += (d - s.mean) * (d - s.mean);
  s.std = std::sqrt(sq / n);
  if (s.mean > 0) {
    s.cv = s.std / s.mean;
  } else {
    s.cv = s.std > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  s.fairness = s.mean / (s.std + epsilon);
  return s;
}

double fairness_reward(const FairnessSnapshot& snapshot, const FairnessConfig& cfg) {
  return cfg.lambda * std::tanh(snapshot.fairness - cfg.tau0);
}

std::vector<RewardBreakdown> total_reward(const WorldState& state, const Assignment& assignment,
                                          const StepOutcome& outcome,
                                          const FairnessSnapshot& snapshot,
                                          const FairnessConfig& cfg, const WorldConfig& world_cfg) {
  const int n = state.num_agents();
  if (!is_permutation(assignment.goal_of, n)) {
    throw std::invalid_argument("assignment is not a permutation of the goals");
  }
  const std::vector<bool> hit = collided_agents(outcome.collisions, n);
  std::vector<bool> arrived(n, false);
  for (int i : outcome.newly_done) arrived.at(i) = true;
  const double fair = cfg.fairness_reward_enabled ? fairness_reward(snapshot, cfg) : 0.0;

  std::vector<RewardBreakdown> out(n);
  for (int i = 0; i < n; ++i) {
    const AgentState& a = state.agents[i];
    const int g = assignment.goal_of[i];
    RewardBreakdown& r = out[i];
    r.dist_reward = -distance(a.position, state.goals[g].position);
    r.fair_reward = fair;
    r.goal_reward = arrived[i] && a.claimed_goal == g ? world_cfg.goal_reward : 0.0;
    r.collision_penalty = hit[i] ? -world_cfg.collision_penalty : 0.0;
    r.total = reward_total(r.dist_reward, r.fair_reward, r.goal_reward, r.collision_penalty);
  }
  return out;
}

}  // namespace fairnav
