#include "fairnav/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fairnav/assignment.hpp"
#include "fairnav/config.hpp"
#include "fairnav/errors.hpp"
#include "fairnav/runner.hpp"

namespace fairnav {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::string config;
  int episodes = 0;
  std::uint64_t seed = 0;
  std::string agents;
  std::string assign;
  std::string fair_reward;
  std::string policy;
  std::string external_cmd;
  std::string out;
  std::string trace;
  std::string rows_dir;

  CLI::App* app = nullptr;
  bool given(const char* name) const { return app->count(name) > 0; }
};

void add_run_flags(CLI::App* sub, RunFlags& f, bool with_trace) {
  f.app = sub;
  sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--episodes", f.episodes, "episodes per configuration");
  sub->add_option("--seed", f.seed, "base seed (episode k uses seed + k)");
  sub->add_option("--agents", f.agents, "agent count, or a comma list for bench");
  sub->add_option("--assign", f.assign, "random | optimal | minmax");
  sub->add_option("--fair-reward", f.fair_reward, "on | off")
      ->check(CLI::IsMember({"on", "off"}));
  sub->add_option("--policy", f.policy, "scripted-ego | scripted-assigned | external");
  sub->add_option("--external-cmd", f.external_cmd, "shell command for the external policy");
  sub->add_option("--out", f.out, "CSV output path");
  if (with_trace) sub->add_option("--trace", f.trace, "trace output path (JSON lines)");
}

std::vector<int> parse_agent_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    try {
      std::size_t used = 0;
      v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--agents: '" + item + "' is not an integer");
    }
    if (v < 2) throw UsageError("--agents: counts must be >= 2");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--agents: empty list");
  return out;
}

struct Resolved {
  FileConfig file;
  int episodes = 100;
};

// Config file first, then flag overrides.
Resolved resolve(const RunFlags& f) {
  Resolved r;
  if (!f.config.empty()) r.file = load_config(f.config);
  RunConfig& rc = r.file.run;
  if (r.file.episodes) r.episodes = *r.file.episodes;
  if (f.given("--episodes")) r.episodes = f.episodes;
  if (r.episodes < 1) throw UsageError("--episodes must be >= 1");
  if (f.given("--seed")) rc.scenario.seed = f.seed;
  if (f.given("--assign")) rc.scenario.assignment_mode = parse_assign_mode(f.assign);
  if (f.given("--fair-reward")) rc.scenario.fairness_reward_enabled = f.fair_reward == "on";
  if (f.given("--policy")) rc.policy.mode = parse_policy_mode(f.policy);
  if (f.given("--external-cmd")) rc.policy.external_command = f.external_cmd;
  return r;
}

void set_agents(FileConfig& fc, int n) {
  fc.run.scenario.num_agents = n;
  if (fc.run.scenario.formation && !fc.formation_positions_explicit) {
    fc.run.scenario.formation->n_positions = n;
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  return f;
}

void print_table_header(std::ostream& out) {
  out << "variant  agents  episodes        F     S%      T        D\n";
}

void print_table_row(std::ostream& out, const BatchSummary& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-7s  %6d  %8d  %7.2f  %5.1f  %5.2f  %7.2f\n", s.variant.c_str(),
                s.num_agents, s.episodes, s.fairness.median, s.success_pct.mean,
                s.episode_fraction.median, s.total_distance.median);
  out << buf;
}

void write_summary_csv(std::ostream& out, const std::vector<BatchSummary>& rows) {
  out << "variant,agents,episodes,F_median,S_pct_mean,T_median,D_median,collisions_mean\n";
  for (const BatchSummary& s : rows) {
    out << s.variant << ',' << s.num_agents << ',' << s.episodes << ','
        << format_number(s.fairness.median) << ',' << format_number(s.success_pct.mean) << ','
        << format_number(s.episode_fraction.median) << ','
        << format_number(s.total_distance.median) << ',' << format_number(s.collisions.mean)
        << '\n';
  }
}

int cmd_run(const RunFlags& f, bool formation, std::ostream& out) {
  Resolved r = resolve(f);
  if (f.given("--agents")) {
    const std::vector<int> counts = parse_agent_list(f.agents);
    if (counts.size() != 1) throw UsageError("--agents takes a single count here");
    set_agents(r.file, counts[0]);
  }
  const RunConfig& rc = r.file.run;
  if (formation && !rc.scenario.formation) throw ConfigError("config has no formation block");

  const bool with_trace = !f.trace.empty();
  const BatchResult result = run_batch(rc, r.episodes, rc.scenario.seed, with_trace);
  if (!f.out.empty()) {
    std::ofstream csv = open_out(f.out);
    write_episode_csv(csv, result.rows);
  }
  if (with_trace) {
    std::ofstream tr = open_out(f.trace);
    tr << trace_header(rc) << '\n' << result.trace;
  }
  print_table_header(out);
  print_table_row(out, result.summary);
  return 0;
}

int cmd_bench(const RunFlags& f, std::ostream& out) {
  Resolved r = resolve(f);
  const std::vector<int> counts =
      f.given("--agents") ? parse_agent_list(f.agents) : std::vector<int>{3, 5, 7, 10};
  struct Variant {
    AssignMode mode;
    bool fair_reward;
  };
  const Variant variants[] = {{AssignMode::Random, false},
                              {AssignMode::Optimal, false},
                              {AssignMode::MinMax, false},
                              {AssignMode::MinMax, true}};
  if (!f.rows_dir.empty()) std::filesystem::create_directories(f.rows_dir);

  std::vector<BatchSummary> table;
  for (int n : counts) {
    for (const Variant& v : variants) {
      FileConfig fc = r.file;
      set_agents(fc, n);
      fc.run.scenario.assignment_mode = v.mode;
      fc.run.scenario.fairness_reward_enabled = v.fair_reward;
      const BatchResult result = run_batch(fc.run, r.episodes, fc.run.scenario.seed);
      if (!f.rows_dir.empty()) {
        const auto path = std::filesystem::path(f.rows_dir) /
                          (result.summary.variant + "_n" + std::to_string(n) + ".csv");
        std::ofstream csv = open_out(path.string());
        write_episode_csv(csv, result.rows);
      }
      table.push_back(result.summary);
    }
  }
  if (!f.out.empty()) {
    std::ofstream csv = open_out(f.out);
    write_summary_csv(csv, table);
  }
  print_table_header(out);
  for (const BatchSummary& s : table) print_table_row(out, s);
  return 0;
}

CostMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("matrix entry '" + tok + "' is not a number");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("matrix file is empty");
  try {
    return CostMatrix(std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int cmd_assign(const std::string& path, const std::string& mode_name, std::uint64_t seed,
               std::ostream& out) {
  const CostMatrix c = read_matrix(path);
  const AssignMode mode = parse_assign_mode(mode_name);
  Assignment a;
  switch (mode) {
    case AssignMode::Random: a = assign_random(c.size(), seed); break;
    case AssignMode::Optimal: a = assign_optimal(c); break;
    case AssignMode::MinMax: a = assign_minmax_fair(c); break;
  }
  auto join = [](const auto& values) {
    std::string s;
    for (const auto& v : values) {
      if (!s.empty()) s += ' ';
      if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
        s += format_number(v);
      } else {
        s += std::to_string(v);
      }
    }
    return s;
  };
  out << "mode " << to_string(mode) << '\n';
  out << "goal_of " << join(a.goal_of) << '\n';
  out << "costs " << join(assigned_costs(c, a.goal_of)) << '\n';
  out << "sum " << format_number(total_cost(c, a.goal_of)) << '\n';
  out << "max " << format_number(max_cost(c, a.goal_of)) << '\n';
  out << "sorted_desc " << join(sorted_costs_desc(c, a.goal_of)) << '\n';
  return 0;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  if (const auto bad = validate_trace(in)) {
    err << "violation at line " << bad->line << ", step " << bad->step << ": " << bad->message
        << '\n';
    return 1;
  }
  out << "trace ok\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Fairness-aware multi-agent goal coverage simulator", "fairnav");
  app.require_subcommand(1);

  RunFlags run_flags, formation_flags, bench_flags;
  CLI::App* run = app.add_subcommand("run", "run a batch of episodes for one configuration");
  add_run_flags(run, run_flags, true);
  CLI::App* formation = app.add_subcommand("formation", "run formation episodes");
  add_run_flags(formation, formation_flags, true);
  CLI::App* bench = app.add_subcommand("bench", "sweep agent counts and the four variants");
  add_run_flags(bench, bench_flags, false);
  bench->add_option("--rows-dir", bench_flags.rows_dir, "directory for per-episode CSVs");

  std::string matrix_path, assign_mode = "optimal";
  std::uint64_t assign_seed = 0;
  CLI::App* assign = app.add_subcommand("assign", "solve one assignment problem");
  assign->add_option("matrix", matrix_path, "cost matrix, one row per line")->required();
  assign->add_option("--mode", assign_mode, "random | optimal | minmax");
  assign->add_option("--seed", assign_seed, "seed for random mode");

  std::string trace_path;
  CLI::App* validate = app.add_subcommand("validate", "check a trace file");
  validate->add_option("trace", trace_path, "trace file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, false, out);
    if (formation->parsed()) return cmd_run(formation_flags, true, out);
    if (bench->parsed()) return cmd_bench(bench_flags, out);
    if (assign->parsed()) return cmd_assign(matrix_path, assign_mode, assign_seed, out);
    if (validate->parsed()) return cmd_validate(trace_path, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace fairnav
