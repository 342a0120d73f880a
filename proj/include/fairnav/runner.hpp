#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairnav/fairness.hpp"
#include "fairnav/policy.hpp"
#include "fairnav/world.hpp"

namespace fairnav {

enum class PolicyMode { ScriptedEgo, ScriptedAssigned, External };

std::string_view to_string(PolicyMode mode);
// "scripted-ego", "scripted-assigned", "external"; throws ConfigError.
PolicyMode parse_policy_mode(std::string_view name);

struct PolicySelection {
  PolicyMode mode = PolicyMode::ScriptedAssigned;
  std::string external_command;
  std::chrono::milliseconds external_timeout{10000};
  ControllerConfig controller;
};

// Everything one episode needs. episode_length and the fairness-reward flag
// live in the scenario and are copied into world/fairness by normalized().
struct RunConfig {
  WorldConfig world;
  FairnessConfig fairness;
  ScenarioConfig scenario;
  PolicySelection policy;

  // Copy with the scenario-owned fields pushed down; throws ConfigError.
  RunConfig normalized() const;
};

// Model variant label: ra, oa, fa, fa_fr (other combinations get e.g. oa_fr).
std::string variant_label(AssignMode mode, bool fairness_reward);

struct EpisodeMetrics {
  std::uint64_t seed = 0;
  double fairness = 0.0;          // F over final distances
  double success_pct = 0.0;       // S%
  double episode_fraction = 1.0;  // T
  double total_distance = 0.0;    // D
  std::vector<double> per_agent_distances;
  int collision_count = 0;
  int steps = 0;
};

// Runs one episode from a fresh init_world(seed). When `trace` is non-null
// one JSON object per line is appended to it (episode start, every step,
// episode end). Throws PlacementError, ProtocolError, ConfigError.
EpisodeMetrics run_episode(const RunConfig& cfg, std::uint64_t seed, std::string* trace = nullptr);

// Same, from a caller-provided initial state.
EpisodeMetrics run_episode_from(const RunConfig& cfg, WorldState initial, std::uint64_t seed,
                                std::string* trace = nullptr);

// Last arrival step / episode_length once every agent is done, else 1.
double episode_fraction(const WorldState& final_state, int episode_length);

struct MetricStats {
  double median = 0.0;
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

// Percentile with linear interpolation between order statistics
// (rank q * (n - 1)); q in [0, 1].
double percentile(std::vector<double> values, double q);
MetricStats summarize(const std::vector<double>& values);

struct BatchSummary {
  std::string variant;
  int num_agents = 0;
  int episodes = 0;
  MetricStats fairness;
  MetricStats success_pct;
  MetricStats episode_fraction;
  MetricStats total_distance;
  MetricStats collisions;
};

struct BatchResult {
  std::vector<EpisodeMetrics> rows;  // in seed order
  BatchSummary summary;
  std::string trace;  // concatenated per-episode traces (header excluded)
};

BatchSummary summarize_rows(const std::vector<EpisodeMetrics>& rows, const RunConfig& cfg);

// Episodes use seeds base_seed .. base_seed + episodes - 1 and run on up to
// `threads` worker threads (0: FAIRNAV_THREADS or the hardware count).
// Output is identical for every thread count.
BatchResult run_batch(const RunConfig& cfg, int episodes, std::uint64_t base_seed,
                      bool with_trace = false, unsigned threads = 0);

// Worker count from FAIRNAV_THREADS, else hardware concurrency (>= 1).
unsigned default_thread_count();

// CSV with header "seed,F,S_pct,T,D,collisions".
void write_episode_csv(std::ostream& out, const std::vector<EpisodeMetrics>& rows);
// Shortest round-trip decimal form.
std::string format_number(double v);

// First trace line: configuration needed to validate the rest.
std::string trace_header(const RunConfig& cfg);

struct TraceViolation {
  int line = 0;  // 1-based
  int step = -1;
  std::string message;
};

// Replays a trace and checks, at every step: the reward decomposition
// identity, one goal reward per agent per episode, |R_fair| <= lambda with
// one shared value, world invariants (arena, speed, monotone distance and
// done set, frozen done agents) and OA/FA dominance.
std::optional<TraceViolation> validate_trace(std::istream& in);

}  // namespace fairnav
