#pragma once

#include <span>
#include <vector>

#include "fairnav/assignment.hpp"
#include "fairnav/dynamics.hpp"
#include "fairnav/world.hpp"

namespace fairnav {

struct FairnessConfig {
  double epsilon = 1e-5;
  double lambda = 0.5;
  double tau0 = 1.0;
  bool fairness_reward_enabled = false;
};

// Throws ConfigError.
void validate(const FairnessConfig& cfg);

// Distances traveled and their dispersion at one step.
struct FairnessSnapshot {
  std::vector<double> distances;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double cv = 0.0;   // std / mean; infinity when mean == 0 and std > 0, 0 when both are 0
  double fairness = 0.0;  // mean / (std + epsilon)
};

// Throws std::invalid_argument for fewer than two agents or negative
// distances.
FairnessSnapshot fairness_metric(std::span<const double> distances, double epsilon);

// lambda * tanh(F - tau0); the same value goes to every agent.
double fairness_reward(const FairnessSnapshot& snapshot, const FairnessConfig& cfg);

struct RewardBreakdown {
  double dist_reward = 0.0;
  double fair_reward = 0.0;
  double goal_reward = 0.0;
  double collision_penalty = 0.0;
  double total = 0.0;
};

// Sum in the fixed order dist + fair + goal + collision; validators rebuild
// the total the same way so the identity holds bit-for-bit.
inline double reward_total(double dist, double fair, double goal, double collision) {
  return dist + fair + goal + collision;
}

// Per-agent reward for the step that produced `outcome`: distance to the
// assigned goal at the new positions, team-wide fairness reward when
// enabled, one-time goal reward for agents that became done this step on
// their assigned goal, and the collision penalty.
std::vector<RewardBreakdown> total_reward(const WorldState& state, const Assignment& assignment,
                                          const StepOutcome& outcome,
                                          const FairnessSnapshot& snapshot,
                                          const FairnessConfig& cfg, const WorldConfig& world_cfg);

}  // namespace fairnav
