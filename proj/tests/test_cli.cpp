#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairnav/cli.hpp"

using namespace fairnav;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "fairnav_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
  return cells;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

TEST_CASE("run writes one CSV row per episode") {
  const std::string cfg = write_file("three.json", R"({"num_agents": 3, "seed": 1})");
  const std::string csv = (scratch() / "run.csv").string();
  const Result r = cli({"run", "--config", cfg, "--episodes", "10", "--out", csv});
  CHECK(r.code == 0);
  const auto rows = lines_of(read_file(csv));
  CHECK(rows.size() == 11);
  CHECK(rows[0] == "seed,F,S_pct,T,D,collisions");
  CHECK(split(rows[1])[0] == "1");
  const auto table = lines_of(r.out);
  REQUIRE(table.size() == 2);
  CHECK(table[1].rfind("oa", 0) == 0);
}

TEST_CASE("run output is byte-identical across repeats") {
  const std::string cfg = write_file("rep.json", R"({"num_agents": 4, "assignment_mode": "minmax"})");
  const std::string a = (scratch() / "a.csv").string(), b = (scratch() / "b.csv").string();
  const std::string ta = (scratch() / "a.jsonl").string(), tb = (scratch() / "b.jsonl").string();
  REQUIRE(cli({"run", "--config", cfg, "--episodes", "12", "--seed", "5", "--out", a, "--trace", ta}).code == 0);
  REQUIRE(cli({"run", "--config", cfg, "--episodes", "12", "--seed", "5", "--out", b, "--trace", tb}).code == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(ta) == read_file(tb));
  CHECK(cli({"validate", ta}).code == 0);
}

TEST_CASE("usage and config errors exit nonzero") {
  Result r = cli({"run", "--episodes", "0"});
  CHECK(r.code != 0);
  CHECK_FALSE(r.err.empty());
  CHECK(r.out.empty());
  CHECK(cli({}).code != 0);
  CHECK(cli({"run", "--assign", "best"}).code != 0);
  CHECK(cli({"run", "--fair-reward", "maybe"}).code != 0);
  CHECK(cli({"run", "--config", write_file("bad.json", R"({"agents": 3})")}).code != 0);
  CHECK(cli({"run", "--config", write_file("broken.json", "{")}).code != 0);
  CHECK(cli({"run", "--policy", "external"}).code != 0);
  CHECK(cli({"run", "--agents", "3,5"}).code != 0);
}

TEST_CASE("external policy errors surface as failures") {
  const Result r = cli({"run", "--episodes", "1", "--policy", "external", "--external-cmd",
                        "while read l; do echo '{\"actions\":[0]}'; done"});
  CHECK(r.code != 0);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("bench sweeps agent counts and variants") {
  const std::string out = (scratch() / "bench.csv").string();
  const std::string rows_dir = (scratch() / "bench_rows").string();
  const Result r = cli({"bench", "--agents", "3,5", "--episodes", "9", "--out", out, "--rows-dir",
                        rows_dir});
  REQUIRE(r.code == 0);
  const auto table = lines_of(read_file(out));
  REQUIRE(table.size() == 9);
  CHECK(lines_of(r.out).size() == 9);
  for (std::size_t k = 1; k < table.size(); ++k) {
    const auto cells = split(table[k]);
    const std::string file = rows_dir + "/" + cells[0] + "_n" + cells[1] + ".csv";
    std::vector<double> f, d, t;
    const auto rows = lines_of(read_file(file));
    REQUIRE(rows.size() == 10);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto c = split(rows[i]);
      f.push_back(std::stod(c[1]));
      t.push_back(std::stod(c[3]));
      d.push_back(std::stod(c[4]));
    }
    CHECK(std::stod(cells[3]) == doctest::Approx(median(f)).epsilon(1e-12));
    CHECK(std::stod(cells[5]) == doctest::Approx(median(t)).epsilon(1e-12));
    CHECK(std::stod(cells[6]) == doctest::Approx(median(d)).epsilon(1e-12));
  }
  std::vector<std::string> variants;
  for (std::size_t k = 1; k <= 4; ++k) variants.push_back(split(table[k])[0]);
  CHECK(variants == std::vector<std::string>{"ra", "oa", "fa", "fa_fr"});
}

TEST_CASE("default bench has sixteen rows") {
  const std::string out = (scratch() / "bench16.csv").string();
  REQUIRE(cli({"bench", "--episodes", "2", "--out", out}).code == 0);
  CHECK(lines_of(read_file(out)).size() == 17);
}

TEST_CASE("formation command") {
  const std::string cfg =
      write_file("circle.json", R"({"num_agents": 5, "formation": {"shape": "circle"}})");
  const Result r = cli({"formation", "--config", cfg, "--episodes", "5"});
  CHECK(r.code == 0);
  CHECK(lines_of(r.out).size() == 2);
  CHECK(cli({"formation", "--config", cfg, "--episodes", "2", "--agents", "4"}).code == 0);

  CHECK(cli({"formation", "--episodes", "2"}).code != 0);
  const std::string bad_shape =
      write_file("square.json", R"({"num_agents": 5, "formation": {"shape": "square"}})");
  CHECK(cli({"formation", "--config", bad_shape}).code != 0);
  const std::string bad_count = write_file(
      "count.json", R"({"num_agents": 5, "formation": {"shape": "line", "n_positions": 4}})");
  const Result e = cli({"formation", "--config", bad_count});
  CHECK(e.code != 0);
  CHECK(e.err.find("n_positions") != std::string::npos);
}

TEST_CASE("validate reports the first bad step") {
  const std::string trace = (scratch() / "v.jsonl").string();
  REQUIRE(cli({"run", "--episodes", "2", "--trace", trace}).code == 0);
  CHECK(cli({"validate", trace}).code == 0);

  auto lines = lines_of(read_file(trace));
  auto j = nlohmann::json::parse(lines[3]);
  j["rewards"][0][4] = 42.0;
  lines[3] = j.dump();
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  const Result r = cli({"validate", write_file("bad.jsonl", text)});
  CHECK(r.code != 0);
  CHECK(r.err.find("line 4") != std::string::npos);
  CHECK(r.err.find("step " + std::to_string(j["step"].get<int>())) != std::string::npos);
  CHECK(cli({"validate", (scratch() / "missing.jsonl").string()}).code != 0);
}

TEST_CASE("assign solves a matrix file") {
  const std::string m = write_file("m.txt", "1 4\n3 5\n");
  Result r = cli({"assign", m, "--mode", "optimal"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("goal_of 0 1\n") != std::string::npos);
  CHECK(r.out.find("sum 6\n") != std::string::npos);
  r = cli({"assign", m, "--mode", "minmax"});
  CHECK(r.out.find("goal_of 1 0\n") != std::string::npos);
  CHECK(r.out.find("max 4\n") != std::string::npos);
  CHECK(cli({"assign", m, "--mode", "random", "--seed", "3"}).code == 0);
  CHECK(cli({"assign", write_file("ragged.txt", "1 2\n3\n")}).code != 0);
  CHECK(cli({"assign", write_file("text.txt", "1 x\n3 4\n")}).code != 0);
}
