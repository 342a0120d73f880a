#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fairnav/world.hpp"

namespace fairnav {

// Square agent-by-goal table of nonnegative finite costs, row-major.
class CostMatrix {
 public:
  CostMatrix() = default;
  // Throws std::invalid_argument unless square with finite entries >= 0.
  explicit CostMatrix(std::vector<std::vector<double>> rows);

  int size() const { return n_; }
  double operator()(int agent, int goal) const { return costs_[agent * n_ + goal]; }

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<double> costs_;
};

struct Assignment {
  std::vector<int> goal_of;  // goal_of[i] = goal assigned to agent i
  AssignMode mode = AssignMode::Optimal;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

enum class Objective { Sum, LexMax };

// costs[i][j] = |p_i - g_j| at the current positions.
CostMatrix build_cost_matrix(const WorldState& state);

// Uniformly random permutation, deterministic in the seed.
Assignment assign_random(int n, std::uint64_t seed);

// Minimum total cost (Hungarian method). Among permutations whose total is
// within kSumTieTolerance of the optimum, returns the lexicographically
// smallest goal_of.
Assignment assign_optimal(const CostMatrix& c);

// Lexicographic bottleneck: minimizes the largest assigned cost, then the
// second largest, and so on. Exact comparisons on cost values; remaining
// ties go to the lexicographically smallest goal_of.
Assignment assign_minmax_fair(const CostMatrix& c);

// Exhaustive search, n <= 9, with the same tie rules as the solvers above.
// Throws SizeExceeded for larger n.
struct SizeExceeded : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
Assignment brute_force_assign(const CostMatrix& c, Objective objective);

// Relative tolerance under which two permutation totals count as tied.
inline constexpr double kSumTieTolerance = 1e-12;

// Minimal threshold z such that a perfect matching exists using only edges
// with cost <= z.
double bottleneck_value(const CostMatrix& c);

// Assigned costs c[i][goal_of[i]] in agent order.
std::vector<double> assigned_costs(const CostMatrix& c, std::span<const int> goal_of);
double total_cost(const CostMatrix& c, std::span<const int> goal_of);
double max_cost(const CostMatrix& c, std::span<const int> goal_of);
// Assigned costs sorted descending.
std::vector<double> sorted_costs_desc(const CostMatrix& c, std::span<const int> goal_of);

bool is_permutation(std::span<const int> goal_of, int n);

// Solves `mode` (Optimal or MinMax) on the agents and goals left after
// pinning each (agent, goal) pair in `pinned`; pinned agents keep their
// goal. Used to keep agents that already hold a goal on it.
Assignment assign_with_pins(const CostMatrix& c, AssignMode mode,
                            std::span<const std::pair<int, int>> pinned);

}  // namespace fairnav
