#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "fairnav/config.hpp"
#include "fairnav/fairness.hpp"
#include "fairnav/runner.hpp"

namespace fairnav {

using nlohmann::json;

namespace {

struct AgentSnap {
  double x = 0, y = 0, d = 0;
  bool done = false;
};

std::vector<AgentSnap> read_agents(const json& arr) {
  std::vector<AgentSnap> out;
  for (const json& a : arr) {
    out.push_back({a.at("p").at(0).get<double>(), a.at("p").at(1).get<double>(),
                   a.at("d").get<double>(), a.at("done").get<bool>()});
  }
  return out;
}

class Validator {
 public:
  std::optional<TraceViolation> feed(int line_no, const std::string& text) {
    line_ = line_no;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception&) {
      return fail("line is not valid JSON");
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") return header(j);
      if (!have_header_) return fail("trace does not start with a header line");
      if (type == "episode") return episode(j);
      if (type == "step") return step(j);
      if (type == "end") return std::nullopt;
      return fail("unknown line type '" + type + "'");
    } catch (const json::exception& e) {
      return fail(std::string("malformed trace line: ") + e.what());
    }
  }

  std::optional<TraceViolation> finish() {
    if (!have_header_) return TraceViolation{0, -1, "empty trace"};
    return std::nullopt;
  }

 private:
  std::optional<TraceViolation> fail(std::string msg) {
    return TraceViolation{line_, step_, std::move(msg)};
  }

  std::optional<TraceViolation> header(const json& j) {
    world_ = world_config_from_json(j.at("world"));
    fairness_ = fairness_config_from_json(j.at("fairness"));
    have_header_ = true;
    return std::nullopt;
  }

  std::optional<TraceViolation> episode(const json& j) {
    step_ = j.at("step").get<int>();
    agents_ = read_agents(j.at("agents"));
    goal_rewards_.assign(agents_.size(), 0);
    in_episode_ = true;
    return std::nullopt;
  }

  std::optional<TraceViolation> step(const json& j) {
    if (!in_episode_) return fail("step line outside an episode");
    const int s = j.at("step").get<int>();
    if (s != step_ + 1) return fail("step index does not advance by one");
    step_ = s;
    if (s > world_.episode_length) return fail("step index beyond episode_length");

    const std::vector<AgentSnap> now = read_agents(j.at("agents"));
    if (now.size() != agents_.size()) return fail("agent count changed");
    const double e = world_.world_half_extent;
    std::set<int> claimed;
    for (std::size_t i = 0; i < now.size(); ++i) {
      const AgentSnap& a = now[i];
      const AgentSnap& prev = agents_[i];
      const json& aj = j["agents"][i];
      const double speed = std::hypot(aj.at("v").at(0).get<double>(), aj.at("v").at(1).get<double>());
      const std::string who = "agent " + std::to_string(i) + ": ";
      if (std::abs(a.x) > e || std::abs(a.y) > e) return fail(who + "outside the arena");
      if (speed > world_.max_speed * (1 + 1e-12)) return fail(who + "speed above max_speed");
      if (a.d < prev.d) return fail(who + "distance traveled decreased");
      if (prev.done && !a.done) return fail(who + "left the done set");
      if (prev.done && (a.x != prev.x || a.y != prev.y || a.d != prev.d)) {
        return fail(who + "moved after becoming done");
      }
      if (a.done) {
        if (aj.at("goal").is_null()) return fail(who + "done without a claimed goal");
        if (!claimed.insert(aj["goal"].get<int>()).second) return fail(who + "shares a claimed goal");
      }
    }

    const json& rewards = j.at("rewards");
    if (rewards.size() != now.size()) return fail("reward count differs from agent count");
    std::optional<double> shared_fair;
    for (std::size_t i = 0; i < rewards.size(); ++i) {
      const json& r = rewards[i];
      const double dist = r.at(0).get<double>();
      const double fair = r.at(1).get<double>();
      const double goal = r.at(2).get<double>();
      const double coll = r.at(3).get<double>();
      const double total = r.at(4).get<double>();
      const std::string who = "agent " + std::to_string(i) + ": ";
      if (total != reward_total(dist, fair, goal, coll)) {
        return fail(who + "reward total differs from the sum of its terms");
      }
      if (std::abs(fair) > fairness_.lambda) return fail(who + "|R_fair| exceeds lambda");
      if (shared_fair && *shared_fair != fair) return fail("fairness reward differs between agents");
      shared_fair = fair;
      if (goal != 0.0 && ++goal_rewards_[i] > 1) return fail(who + "goal reward paid twice");
    }

    const auto oa = j.at("oa_costs").get<std::vector<double>>();
    const auto fa = j.at("fa_costs").get<std::vector<double>>();
    double oa_sum = 0, fa_sum = 0;
    for (double c : oa) oa_sum += c;
    for (double c : fa) fa_sum += c;
    if (oa_sum > fa_sum) return fail("dominance violated: sum(OA) > sum(FA)");
    const double oa_max = oa.empty() ? 0 : *std::max_element(oa.begin(), oa.end());
    const double fa_max = fa.empty() ? 0 : *std::max_element(fa.begin(), fa.end());
    if (fa_max > oa_max) return fail("dominance violated: max(FA) > max(OA)");

    agents_ = now;
    return std::nullopt;
  }

  WorldConfig world_;
  FairnessConfig fairness_;
  bool have_header_ = false;
  bool in_episode_ = false;
  int line_ = 0;
  int step_ = -1;
  std::vector<AgentSnap> agents_;
  std::vector<int> goal_rewards_;
};

}  // namespace

std::optional<TraceViolation> validate_trace(std::istream& in) {
  Validator v;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    if (auto bad = v.feed(line_no, text)) return bad;
  }
  return v.finish();
}

}  // namespace fairnav
