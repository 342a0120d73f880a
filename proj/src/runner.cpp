#include "fairnav/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "fairnav/assignment.hpp"
#include "fairnav/config.hpp"
#include "fairnav/dynamics.hpp"
#include "fairnav/errors.hpp"
#include "fairnav/formation.hpp"

namespace fairnav {

using nlohmann::json;

std::string_view to_string(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::ScriptedEgo: return "scripted-ego";
    case PolicyMode::ScriptedAssigned: return "scripted-assigned";
    case PolicyMode::External: return "external";
  }
  return "?";
}

PolicyMode parse_policy_mode(std::string_view name) {
  if (name == "scripted-ego") return PolicyMode::ScriptedEgo;
  if (name == "scripted-assigned") return PolicyMode::ScriptedAssigned;
  if (name == "external") return PolicyMode::External;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

RunConfig RunConfig::normalized() const {
  RunConfig c = *this;
  c.world.episode_length = scenario.episode_length;
  c.fairness.fairness_reward_enabled = scenario.fairness_reward_enabled;
  c.policy.controller.target_mode = policy.mode == PolicyMode::ScriptedAssigned
                                        ? TargetMode::FixedAssignment
                                        : TargetMode::EgoGoal1;
  validate(c.scenario, c.world);
  validate(c.fairness);
  validate(c.policy.controller, c.world);
  if (c.scenario.num_agents < 2) {
    throw ConfigError("episodes need at least two agents (fairness and goal observations)");
  }
  if (c.policy.mode == PolicyMode::External && c.policy.external_command.empty()) {
    throw ConfigError("external policy selected without a command");
  }
  return c;
}

std::string variant_label(AssignMode mode, bool fairness_reward) {
  std::string label = mode == AssignMode::Random ? "ra" : mode == AssignMode::Optimal ? "oa" : "fa";
  if (fairness_reward) label += "_fr";
  return label;
}

namespace {

json point(const Vec2& p) { return json::array({p.x, p.y}); }

json agents_json(const WorldState& s) {
  json arr = json::array();
  for (const AgentState& a : s.agents) {
    arr.push_back({{"p", point(a.position)},
                   {"v", point(a.velocity)},
                   {"d", a.distance_traveled},
                   {"done", a.done},
                   {"goal", a.claimed_goal ? json(*a.claimed_goal) : json(nullptr)}});
  }
  return arr;
}

std::vector<std::pair<int, int>> claims(const WorldState& s) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < s.num_agents(); ++i) {
    if (s.agents[i].done) out.emplace_back(i, *s.agents[i].claimed_goal);
  }
  return out;
}

}  // namespace

EpisodeMetrics run_episode(const RunConfig& cfg, std::uint64_t seed, std::string* trace) {
  const RunConfig rc = cfg.normalized();
  return run_episode_from(rc, init_world(rc.world, rc.scenario, seed), seed, trace);
}

EpisodeMetrics run_episode_from(const RunConfig& cfg, WorldState state, std::uint64_t seed,
                                std::string* trace) {
  const RunConfig rc = cfg.normalized();
  const WorldConfig& world = rc.world;
  const ScenarioConfig& scenario = rc.scenario;
  const int n = state.num_agents();
  if (n != scenario.num_agents) throw ConfigError("initial state does not match num_agents");

  const std::optional<Assignment> fixed_random =
      scenario.assignment_mode == AssignMode::Random ? std::optional(assign_random(n, seed))
                                                     : std::nullopt;
  std::unique_ptr<ExternalPolicy> external;
  if (rc.policy.mode == PolicyMode::External) {
    external = std::make_unique<ExternalPolicy>(rc.policy.external_command,
                                                rc.policy.external_timeout);
  }

  if (trace) {
    json goals = json::array();
    for (const GoalState& g : state.goals) goals.push_back(point(g.position));
    *trace += json{{"type", "episode"}, {"seed", seed}, {"step", state.step_index},
                   {"agents", agents_json(state)}, {"goals", goals}}
                  .dump();
    *trace += '\n';
  }

  EpisodeMetrics m;
  m.seed = seed;
  std::vector<PolicyInput> inputs(n);
  std::vector<Action> actions(n);
  while (state.step_index < world.episode_length && !state.all_done()) {
    const CostMatrix costs = build_cost_matrix(state);
    const auto pins = claims(state);
    const Assignment assignment =
        fixed_random ? *fixed_random : assign_with_pins(costs, scenario.assignment_mode, pins);

    for (int i = 0; i < n; ++i) {
      inputs[i] = make_policy_input(state, i, world);
      if (rc.policy.mode == PolicyMode::ScriptedAssigned) {
        inputs[i].assigned_goal_rel =
            state.goals[assignment.goal_of[i]].position - state.agents[i].position;
      }
    }
    if (external) {
      actions = external->exchange(state.step_index, inputs);
    } else {
      for (int i = 0; i < n; ++i) actions[i] = scripted_action(inputs[i], rc.policy.controller, world);
    }

    StepOutcome outcome = step(state, actions, world);
    std::vector<double> dists(n);
    for (int i = 0; i < n; ++i) dists[i] = outcome.new_state.agents[i].distance_traveled;
    const FairnessSnapshot snap = fairness_metric(dists, rc.fairness.epsilon);
    const std::vector<RewardBreakdown> rewards =
        total_reward(outcome.new_state, assignment, outcome, snap, rc.fairness, world);
    m.collision_count += static_cast<int>(outcome.collisions.size());

    if (trace) {
      const auto oa = scenario.assignment_mode == AssignMode::Optimal
                          ? assignment
                          : assign_with_pins(costs, AssignMode::Optimal, pins);
      const auto fa = scenario.assignment_mode == AssignMode::MinMax
                          ? assignment
                          : assign_with_pins(costs, AssignMode::MinMax, pins);
      json rew = json::array();
      for (const RewardBreakdown& r : rewards) {
        rew.push_back({r.dist_reward, r.fair_reward, r.goal_reward, r.collision_penalty, r.total});
      }
      json line = {{"type", "step"},
                   {"seed", seed},
                   {"step", outcome.new_state.step_index},
                   {"actions", actions},
                   {"assignment", assignment.goal_of},
                   {"agents", agents_json(outcome.new_state)},
                   {"rewards", rew},
                   {"fairness", {{"mean", snap.mean}, {"std", snap.std}, {"F", snap.fairness}}},
                   {"oa_costs", assigned_costs(costs, oa.goal_of)},
                   {"fa_costs", assigned_costs(costs, fa.goal_of)},
                   {"collisions", outcome.collisions.size()},
                   {"newly_done", outcome.newly_done}};
      *trace += line.dump();
      *trace += '\n';
    }
    state = std::move(outcome.new_state);
  }

  m.steps = state.step_index;
  m.per_agent_distances.resize(n);
  for (int i = 0; i < n; ++i) m.per_agent_distances[i] = state.agents[i].distance_traveled;
  m.total_distance = 0.0;
  for (double d : m.per_agent_distances) m.total_distance += d;
  m.fairness = fairness_metric(m.per_agent_distances, rc.fairness.epsilon).fairness;

  if (scenario.formation) {
    m.success_pct = formation_success(state, *scenario.formation).success_pct;
  } else {
    // Goal claims are unique by construction, so every done agent holds its
    // own goal.
    const auto done = std::count_if(state.agents.begin(), state.agents.end(),
                                    [](const AgentState& a) { return a.done; });
    m.success_pct = 100.0 * static_cast<double>(done) / n;
  }
  m.episode_fraction = m.success_pct >= 100.0 ? episode_fraction(state, world.episode_length) : 1.0;

  if (trace) {
    *trace += json{{"type", "end"},
                   {"seed", seed},
                   {"F", m.fairness},
                   {"S_pct", m.success_pct},
                   {"T", m.episode_fraction},
                   {"D", m.total_distance},
                   {"collisions", m.collision_count}}
                  .dump();
    *trace += '\n';
  }
  return m;
}

double episode_fraction(const WorldState& final_state, int episode_length) {
  if (!final_state.all_done()) return 1.0;
  int last = 0;
  for (const AgentState& a : final_state.agents) last = std::max(last, a.done_step.value_or(0));
  return static_cast<double>(last) / episode_length;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

MetricStats summarize(const std::vector<double>& values) {
  MetricStats s;
  if (values.empty()) return s;
  s.median = percentile(values, 0.5);
  s.p10 = percentile(values, 0.1);
  s.p90 = percentile(values, 0.9);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

BatchSummary summarize_rows(const std::vector<EpisodeMetrics>& rows, const RunConfig& cfg) {
  BatchSummary s;
  s.variant = variant_label(cfg.scenario.assignment_mode, cfg.scenario.fairness_reward_enabled);
  s.num_agents = cfg.scenario.num_agents;
  s.episodes = static_cast<int>(rows.size());
  auto column = [&](auto field) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const EpisodeMetrics& r : rows) v.push_back(static_cast<double>(field(r)));
    return summarize(v);
  };
  s.fairness = column([](const EpisodeMetrics& r) { return r.fairness; });
  s.success_pct = column([](const EpisodeMetrics& r) { return r.success_pct; });
  s.episode_fraction = column([](const EpisodeMetrics& r) { return r.episode_fraction; });
  s.total_distance = column([](const EpisodeMetrics& r) { return r.total_distance; });
  s.collisions = column([](const EpisodeMetrics& r) { return r.collision_count; });
  return s;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("FAIRNAV_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BatchResult run_batch(const RunConfig& cfg, int episodes, std::uint64_t base_seed,
                      bool with_trace, unsigned threads) {
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  const RunConfig rc = cfg.normalized();
  if (threads == 0) threads = default_thread_count();
  threads = std::min<unsigned>(threads, static_cast<unsigned>(episodes));

  std::vector<EpisodeMetrics> rows(episodes);
  std::vector<std::string> traces(with_trace ? episodes : 0);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int k = next++; k < episodes; k = next++) {
      try {
        rows[k] = run_episode(rc, base_seed + static_cast<std::uint64_t>(k),
                              with_trace ? &traces[k] : nullptr);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = episodes;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  BatchResult result;
  result.rows = std::move(rows);
  result.summary = summarize_rows(result.rows, rc);
  for (const std::string& t : traces) result.trace += t;
  return result;
}

std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

void write_episode_csv(std::ostream& out, const std::vector<EpisodeMetrics>& rows) {
  out << "seed,F,S_pct,T,D,collisions\n";
  for (const EpisodeMetrics& r : rows) {
    out << r.seed << ',' << format_number(r.fairness) << ',' << format_number(r.success_pct) << ','
        << format_number(r.episode_fraction) << ',' << format_number(r.total_distance) << ','
        << r.collision_count << '\n';
  }
}

std::string trace_header(const RunConfig& cfg) {
  const RunConfig rc = cfg.normalized();
  return json{{"type", "header"},
              {"world", to_json(rc.world)},
              {"fairness", to_json(rc.fairness)},
              {"scenario", to_json(rc.scenario)},
              {"policy", std::string(to_string(rc.policy.mode))}}
             .dump();
}

}  // namespace fairnav
