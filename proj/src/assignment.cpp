#include "fairnav/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairnav/rng.hpp"

namespace fairnav {

CostMatrix::CostMatrix(std::vector<std::vector<double>> rows) : n_(static_cast<int>(rows.size())) {
  costs_.reserve(static_cast<std::size_t>(n_) * n_);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n_) throw std::invalid_argument("cost matrix must be square");
    for (double v : row) {
      if (!std::isfinite(v) || v < 0) {
        throw std::invalid_argument("cost matrix entries must be finite and >= 0");
      }
      costs_.push_back(v);
    }
  }
}

CostMatrix build_cost_matrix(const WorldState& state) {
  const int n = state.num_agents();
  std::vector<std::vector<double>> rows(n, std::vector<double>(state.goals.size()));
  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < state.goals.size(); ++j) {
      rows[i][j] = distance(state.agents[i].position, state.goals[j].position);
    }
  }
  return CostMatrix(std::move(rows));
}

std::vector<double> assigned_costs(const CostMatrix& c, std::span<const int> goal_of) {
  std::vector<double> out(goal_of.size());
  for (std::size_t i = 0; i < goal_of.size(); ++i) out[i] = c(static_cast<int>(i), goal_of[i]);
  return out;
}

double total_cost(const CostMatrix& c, std::span<const int> goal_of) {
  double s = 0.0;
  for (std::size_t i = 0; i < goal_of.size(); ++i) s += c(static_cast<int>(i), goal_of[i]);
  return s;
}

double max_cost(const CostMatrix& c, std::span<const int> goal_of) {
  double m = 0.0;
  for (std::size_t i = 0; i < goal_of.size(); ++i) m = std::max(m, c(static_cast<int>(i), goal_of[i]));
  return m;
}

std::vector<double> sorted_costs_desc(const CostMatrix& c, std::span<const int> goal_of) {
  std::vector<double> v = assigned_costs(c, goal_of);
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

bool is_permutation(std::span<const int> goal_of, int n) {
  if (static_cast<int>(goal_of.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int g : goal_of) {
    if (g < 0 || g >= n || seen[g]) return false;
    seen[g] = true;
  }
  return true;
}

Assignment assign_random(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("assign_random needs n >= 1");
  Assignment a{std::vector<int>(n), AssignMode::Random};
  std::iota(a.goal_of.begin(), a.goal_of.end(), 0);
  Rng rng(mix_seed(seed, 1));
  for (int i = n - 1; i > 0; --i) {
    std::swap(a.goal_of[i], a.goal_of[static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1))]);
  }
  return a;
}

namespace {

// Kuhn-Munkres with potentials for a square problem. Needs only +, -, <
// on Cost, so it runs over any totally ordered abelian group, not just the
// reals. cost(i, j) is 0-based; returns goal_of.
template <class Cost, class CostFn>
std::vector<int> hungarian(int n, CostFn&& cost, const Cost& zero) {
  std::vector<Cost> u(n + 1, zero), v(n + 1, zero), minv(n + 1, zero);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1), seen(n + 1);
  Cost cur = zero;
  Cost delta = zero;
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(used.begin(), used.end(), 0);
    std::fill(seen.begin(), seen.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        cur = cost(i0 - 1, j - 1);
        cur -= u[i0];
        cur -= v[j];
        if (!seen[j] || cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
          seen[j] = 1;
        }
        if (j1 == 0 || minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> goal_of(n);
  for (int j = 1; j <= n; ++j) goal_of[p[j] - 1] = j - 1;
  return goal_of;
}

// Element of Z^d under lexicographic order.
struct LexVec {
  std::vector<std::int64_t> v;

  LexVec& operator+=(const LexVec& o) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
    return *this;
  }
  LexVec& operator-=(const LexVec& o) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
    return *this;
  }
  friend bool operator<(const LexVec& a, const LexVec& b) {
    for (std::size_t k = 0; k < a.v.size(); ++k) {
      if (a.v[k] != b.v[k]) return a.v[k] < b.v[k];
    }
    return false;
  }
};

bool sum_tied(double total, double best) {
  return total <= best + kSumTieTolerance * std::max(1.0, std::abs(best));
}

// Perfect matching on edges with cost <= z (Kuhn's augmenting paths).
bool has_matching_within(const CostMatrix& c, double z) {
  const int n = c.size();
  std::vector<int> match_goal(n, -1);
  std::vector<char> visited(n);
  auto augment = [&](auto&& self, int i) -> bool {
    for (int j = 0; j < n; ++j) {
      if (c(i, j) > z || visited[j]) continue;
      visited[j] = 1;
      if (match_goal[j] < 0 || self(self, match_goal[j])) {
        match_goal[j] = i;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    std::fill(visited.begin(), visited.end(), 0);
    if (!augment(augment, i)) return false;
  }
  return true;
}

std::vector<double> distinct_costs(const CostMatrix& c) {
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(c.size()) * c.size());
  for (int i = 0; i < c.size(); ++i) {
    for (int j = 0; j < c.size(); ++j) vals.push_back(c(i, j));
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

// Optimal completion of a fixed prefix: agents [0, prefix.size()) keep their
// goals, the rest are solved by the Hungarian method.
std::vector<int> complete_optimally(const CostMatrix& c, const std::vector<int>& prefix) {
  const int n = c.size();
  const int k = static_cast<int>(prefix.size());
  std::vector<bool> used(n, false);
  for (int g : prefix) used[g] = true;
  std::vector<int> free_goals;
  for (int j = 0; j < n; ++j) {
    if (!used[j]) free_goals.push_back(j);
  }
  std::vector<int> out = prefix;
  const int m = n - k;
  if (m == 0) return out;
  const std::vector<int> sub = hungarian(
      m, [&](int i, int j) { return c(k + i, free_goals[j]); }, 0.0);
  for (int i = 0; i < m; ++i) out.push_back(free_goals[sub[i]]);
  return out;
}

}  // namespace

double bottleneck_value(const CostMatrix& c) {
  if (c.size() == 0) return 0.0;
  const std::vector<double> vals = distinct_costs(c);
  std::size_t lo = 0;
  std::size_t hi = vals.size() - 1;  // the largest value always admits a matching
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (has_matching_within(c, vals[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return vals[lo];
}

Assignment assign_optimal(const CostMatrix& c) {
  const int n = c.size();
  Assignment result{{}, AssignMode::Optimal};
  if (n == 0) return result;
  std::vector<int> best = complete_optimally(c, {});
  const double target = total_cost(c, best);

  // Walk agents in order, giving each the smallest goal that still admits a
  // completion tied with the optimum.
  std::vector<int> prefix;
  for (int i = 0; i < n; ++i) {
    std::vector<bool> used(n, false);
    for (int g : prefix) used[g] = true;
    bool fixed = false;
    for (int j = 0; j < n && !fixed; ++j) {
      if (used[j]) continue;
      if (j == best[i]) {
        prefix.push_back(j);
        fixed = true;
        break;
      }
      std::vector<int> trial = prefix;
      trial.push_back(j);
      std::vector<int> full = complete_optimally(c, trial);
      if (sum_tied(total_cost(c, full), target)) {
        prefix = std::move(trial);
        best = std::move(full);
        fixed = true;
      }
    }
    if (!fixed) prefix.push_back(best[i]);
  }
  result.goal_of = std::move(prefix);
  return result;
}

Assignment assign_minmax_fair(const CostMatrix& c) {
  const int n = c.size();
  Assignment result{{}, AssignMode::MinMax};
  if (n == 0) return result;

  // Levels: 0 collects every cost above the bottleneck value; 1.. are the
  // distinct values <= the bottleneck, largest first. An edge's cost is the
  // unit vector of its level followed by a slot holding its goal index in
  // its agent's coordinate. Summed over a matching this gives (count of
  // edges per level, goal_of), and the lexicographic minimum of that is
  // exactly the lexicographically smallest sorted-descending cost vector,
  // with ties resolved toward the smallest goal_of.
  const double z = bottleneck_value(c);
  std::vector<double> levels = distinct_costs(c);
  levels.erase(std::upper_bound(levels.begin(), levels.end(), z), levels.end());
  std::reverse(levels.begin(), levels.end());
  const int dim = 1 + static_cast<int>(levels.size()) + n;

  std::vector<LexVec> edge(static_cast<std::size_t>(n) * n, LexVec{std::vector<std::int64_t>(dim, 0)});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = c(i, j);
      int level = 0;
      if (v <= z) {
        const auto it = std::lower_bound(levels.begin(), levels.end(), v, std::greater<>());
        level = 1 + static_cast<int>(it - levels.begin());
      }
      LexVec& e = edge[static_cast<std::size_t>(i) * n + j];
      e.v[level] = 1;
      e.v[1 + levels.size() + i] = j;
    }
  }
  const LexVec zero{std::vector<std::int64_t>(dim, 0)};
  result.goal_of = hungarian(
      n, [&](int i, int j) -> const LexVec& { return edge[static_cast<std::size_t>(i) * n + j]; },
      zero);
  return result;
}

Assignment brute_force_assign(const CostMatrix& c, Objective objective) {
  const int n = c.size();
  if (n > 9) throw SizeExceeded("brute_force_assign supports n <= 9, got " + std::to_string(n));
  const AssignMode mode = objective == Objective::Sum ? AssignMode::Optimal : AssignMode::MinMax;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  if (objective == Objective::Sum) {
    double best = total_cost(c, perm);
    do {
      best = std::min(best, total_cost(c, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      if (sum_tied(total_cost(c, perm), best)) return {perm, mode};
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {perm, mode};  // unreachable: the minimizer itself is tied
  }

  std::vector<int> best_perm = perm;
  std::vector<double> best = sorted_costs_desc(c, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<double> cand = sorted_costs_desc(c, perm);
    if (cand < best) {
      best = std::move(cand);
      best_perm = perm;
    }
  }
  return {best_perm, mode};
}

Assignment assign_with_pins(const CostMatrix& c, AssignMode mode,
                            std::span<const std::pair<int, int>> pinned) {
  const int n = c.size();
  if (pinned.empty()) {
    return mode == AssignMode::MinMax ? assign_minmax_fair(c) : assign_optimal(c);
  }
  std::vector<int> goal_of(n, -1);
  std::vector<bool> goal_taken(n, false);
  for (const auto& [agent, goal] : pinned) {
    goal_of.at(agent) = goal;
    goal_taken.at(goal) = true;
  }
  std::vector<int> rows, cols;
  for (int i = 0; i < n; ++i) {
    if (goal_of[i] < 0) rows.push_back(i);
    if (!goal_taken[i]) cols.push_back(i);
  }
  if (rows.size() != cols.size()) throw std::invalid_argument("pins must be one-to-one");
  if (!rows.empty()) {
    std::vector<std::vector<double>> sub(rows.size(), std::vector<double>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = 0; b < cols.size(); ++b) sub[a][b] = c(rows[a], cols[b]);
    }
    const CostMatrix reduced(std::move(sub));
    const Assignment inner =
        mode == AssignMode::MinMax ? assign_minmax_fair(reduced) : assign_optimal(reduced);
    for (std::size_t a = 0; a < rows.size(); ++a) goal_of[rows[a]] = cols[inner.goal_of[a]];
  }
  return {goal_of, mode};
}

}  // namespace fairnav
