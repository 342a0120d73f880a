#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fairnav/assignment.hpp"
#include "fairnav/errors.hpp"
#include "fairnav/runner.hpp"

using namespace fairnav;

namespace {

RunConfig base(int n, AssignMode mode) {
  RunConfig c;
  c.scenario.num_agents = n;
  c.scenario.assignment_mode = mode;
  return c;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("episode fraction") {
  WorldState s;
  s.agents.resize(3);
  const int steps[] = {10, 30, 20};
  for (int i = 0; i < 3; ++i) {
    s.agents[i].done = true;
    s.agents[i].done_step = steps[i];
    s.agents[i].claimed_goal = i;
  }
  CHECK(episode_fraction(s, 100) == 0.30);
  s.agents[1].done = false;
  s.agents[1].done_step.reset();
  s.agents[1].claimed_goal.reset();
  CHECK(episode_fraction(s, 100) == 1.0);
}

TEST_CASE("agents that run out of time") {
  RunConfig c = base(3, AssignMode::Optimal);
  c.scenario.episode_length = 2;
  const EpisodeMetrics m = run_episode(c, 0);
  CHECK(m.steps == 2);
  CHECK(m.episode_fraction == 1.0);
  CHECK(m.success_pct < 100.0);
}

TEST_CASE("agents starting on their goals finish at step one") {
  const RunConfig c = base(3, AssignMode::MinMax);
  WorldState s = init_world(c.world, c.scenario, 4);
  const Assignment fa = assign_minmax_fair(build_cost_matrix(s));
  for (int i = 0; i < 3; ++i) s.agents[i].position = s.goals[fa.goal_of[i]].position;
  const EpisodeMetrics m = run_episode_from(c, s, 4);
  CHECK(m.steps == 1);
  CHECK(m.success_pct == 100.0);
  CHECK(m.episode_fraction == doctest::Approx(0.01));
  CHECK(m.total_distance == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("statistics") {
  CHECK(percentile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(percentile({5}, 0.9) == 5);
  CHECK(percentile({0, 10}, 0.1) == doctest::Approx(1.0));
  const MetricStats one = summarize({3.5});
  CHECK(one.median == 3.5);
  CHECK(one.mean == 3.5);

  const BatchResult r = run_batch(base(3, AssignMode::Optimal), 1, 9, false, 1);
  CHECK(r.summary.fairness.median == r.rows[0].fairness);
  CHECK(r.summary.fairness.mean == r.rows[0].fairness);
  CHECK(r.summary.variant == "oa");
}

TEST_CASE("batches are reproducible across thread counts") {
  RunConfig c = base(5, AssignMode::MinMax);
  c.scenario.fairness_reward_enabled = true;
  const BatchResult a = run_batch(c, 24, 100, true, 1);
  const BatchResult b = run_batch(c, 24, 100, true, 8);
  std::ostringstream ca, cb;
  write_episode_csv(ca, a.rows);
  write_episode_csv(cb, b.rows);
  CHECK(ca.str() == cb.str());
  CHECK(a.trace == b.trace);
  CHECK(a.summary.variant == "fa_fr");
  CHECK(a.summary.fairness.median == b.summary.fairness.median);
  for (std::size_t k = 0; k < a.rows.size(); ++k) CHECK(a.rows[k].seed == 100 + k);
}

TEST_CASE("batch medians match a recomputation from the CSV rows") {
  const BatchResult r = run_batch(base(3, AssignMode::Optimal), 100, 0);
  std::ostringstream csv;
  write_episode_csv(csv, r.rows);
  const auto rows = parse_csv(csv.str());
  REQUIRE(rows.size() == 101);
  CHECK(rows[0] == std::vector<std::string>{"seed", "F", "S_pct", "T", "D", "collisions"});
  std::vector<double> f, s, t, d;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    f.push_back(std::stod(rows[k][1]));
    s.push_back(std::stod(rows[k][2]));
    t.push_back(std::stod(rows[k][3]));
    d.push_back(std::stod(rows[k][4]));
  }
  CHECK(r.summary.fairness.median == doctest::Approx(median_of(f)).epsilon(1e-12));
  CHECK(r.summary.episode_fraction.median == doctest::Approx(median_of(t)).epsilon(1e-12));
  CHECK(r.summary.total_distance.median == doctest::Approx(median_of(d)).epsilon(1e-12));
  double mean_s = 0;
  for (double x : s) mean_s += x;
  CHECK(r.summary.success_pct.mean == doctest::Approx(mean_s / 100).epsilon(1e-12));
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3, 4.898919486301, 1e-17, 123456789.125}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(100) == "100");
}

TEST_CASE("configuration errors") {
  RunConfig c = base(1, AssignMode::Optimal);
  CHECK_THROWS_AS(run_episode(c, 0), ConfigError);
  c = base(3, AssignMode::Optimal);
  c.policy.mode = PolicyMode::External;
  CHECK_THROWS_AS(run_episode(c, 0), ConfigError);
  CHECK_THROWS_AS(run_batch(base(3, AssignMode::Optimal), 0, 0), ConfigError);
  CHECK(variant_label(AssignMode::Random, false) == "ra");
  CHECK(variant_label(AssignMode::MinMax, true) == "fa_fr");
}

TEST_CASE("episodes driven by an external process") {
  RunConfig c = base(3, AssignMode::Optimal);
  c.scenario.episode_length = 5;
  c.policy.mode = PolicyMode::External;
  c.policy.external_command = "while read line; do echo '{\"actions\":[0,0,0]}'; done";
  const EpisodeMetrics m = run_episode(c, 2);
  CHECK(m.steps == 5);
  CHECK(m.total_distance == 0.0);

  c.policy.external_command = "while read line; do echo '{\"actions\":[0,0]}'; done";
  CHECK_THROWS_AS(run_episode(c, 2), ProtocolError);
}

TEST_CASE("trace validation") {
  const RunConfig c = base(3, AssignMode::Optimal);
  const BatchResult r = run_batch(c, 5, 0, true, 2);
  const std::string text = trace_header(c) + "\n" + r.trace;
  {
    std::istringstream in(text);
    const auto bad = validate_trace(in);
    CHECK_MESSAGE(!bad, (bad ? bad->message : ""));
  }

  SUBCASE("corrupted reward total") {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    auto j = nlohmann::json::parse(lines[5]);
    REQUIRE(j["type"] == "step");
    j["rewards"][1][4] = j["rewards"][1][4].get<double>() + 1e-9;
    lines[5] = j.dump();
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    std::istringstream bad_in(out);
    const auto bad = validate_trace(bad_in);
    REQUIRE(bad);
    CHECK(bad->line == 6);
    CHECK(bad->step == j["step"].get<int>());
    CHECK(bad->message.find("reward total") != std::string::npos);
  }
  SUBCASE("hand-built dominance violation") {
    nlohmann::json agents = nlohmann::json::array();
    for (double x : {-0.5, 0.5}) {
      agents.push_back({{"p", {x, 0.0}}, {"v", {0.0, 0.0}}, {"d", 0.0}, {"done", false}, {"goal", nullptr}});
    }
    nlohmann::json episode = {{"type", "episode"}, {"seed", 0}, {"step", 0}, {"agents", agents}};
    nlohmann::json step = {{"type", "step"},
                           {"seed", 0},
                           {"step", 1},
                           {"agents", agents},
                           {"rewards", {{-1.0, 0.0, 0.0, 0.0, -1.0}, {-1.0, 0.0, 0.0, 0.0, -1.0}}},
                           {"oa_costs", {1.0, 1.5}},
                           {"fa_costs", {1.0, 1.25}}};
    std::istringstream in(trace_header(c) + "\n" + episode.dump() + "\n" + step.dump() + "\n");
    const auto bad = validate_trace(in);
    REQUIRE(bad);
    CHECK(bad->line == 3);
    CHECK(bad->step == 1);
    CHECK(bad->message.find("sum(OA) > sum(FA)") != std::string::npos);
  }
  SUBCASE("garbage") {
    std::istringstream in("{\"type\":\"step\"}\n");
    CHECK(validate_trace(in));
    std::istringstream empty("");
    CHECK(validate_trace(empty));
  }
}
