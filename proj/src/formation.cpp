#include "fairnav/formation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "fairnav/errors.hpp"
#include "fairnav/world.hpp"

namespace fairnav {

std::string_view to_string(FormationShape shape) {
  switch (shape) {
    case FormationShape::Circle: return "circle";
    case FormationShape::Line: return "line";
    case FormationShape::Arrow: return "arrow";
    case FormationShape::Infinity: return "infinity";
  }
  return "?";
}

FormationShape parse_formation_shape(std::string_view name) {
  if (name == "circle") return FormationShape::Circle;
  if (name == "line") return FormationShape::Line;
  if (name == "arrow") return FormationShape::Arrow;
  if (name == "infinity") return FormationShape::Infinity;
  throw ConfigError("unknown formation shape '" + std::string(name) + "'");
}

void validate(const FormationSpec& spec) {
  const std::size_t want = spec.shape == FormationShape::Line ? 2 : 1;
  if (spec.landmarks.size() != want) {
    throw ConfigError(std::string(to_string(spec.shape)) + " formation needs " +
                      std::to_string(want) + " landmark(s)");
  }
  if (spec.shape == FormationShape::Line && spec.landmarks[0] == spec.landmarks[1]) {
    throw ConfigError("line formation landmarks must differ");
  }
  if (spec.shape != FormationShape::Line && !(spec.scale > 0)) {
    throw ConfigError("formation scale must be > 0");
  }
  if (spec.n_positions < 1) throw ConfigError("formation n_positions must be >= 1");
  if (!(spec.threshold >= 0)) throw ConfigError("formation threshold must be >= 0");
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTailAngle = 0.75 * std::numbers::pi;  // 135 degrees

}  // namespace

Vec2 lemniscate_point(double a, double t) {
  const double s = std::sin(t);
  const double c = std::cos(t);
  const double den = 1.0 + c * c;
  return {a * s / den, a * s * c / den};
}

double lemniscate_parameter(int k, int n) {
  // t = 0 and t = pi both land on the crossing point, so even counts are
  // shifted by half a step.
  const double shift = n % 2 == 0 ? 0.5 : 0.0;
  return kTwoPi * (k + shift) / n;
}

ArrowTails arrow_tails(const FormationSpec& spec) {
  const Vec2 tip = spec.landmarks.at(0);
  const Vec2 up{std::cos(kTailAngle), std::sin(kTailAngle)};
  const Vec2 down{std::cos(-kTailAngle), std::sin(-kTailAngle)};
  return {tip, tip + up * spec.scale, tip + down * spec.scale};
}

std::pair<Vec2, Vec2> infinity_lobe_centers(const FormationSpec& spec) {
  const Vec2 mid = spec.landmarks.at(0);
  const double h = spec.scale / 2.0;
  return {mid + Vec2{-h, 0.0}, mid + Vec2{h, 0.0}};
}

std::vector<Vec2> expected_positions(const FormationSpec& spec) {
  validate(spec);
  const int n = spec.n_positions;
  std::vector<Vec2> pts;
  pts.reserve(n);
  switch (spec.shape) {
    case FormationShape::Circle: {
      const Vec2 c = spec.landmarks[0];
      for (int k = 0; k < n; ++k) {
        const double th = kTwoPi * k / n;
        pts.push_back(c + Vec2{spec.scale * std::cos(th), spec.scale * std::sin(th)});
      }
      break;
    }
    case FormationShape::Line: {
      const Vec2 a = spec.landmarks[0];
      const Vec2 b = spec.landmarks[1];
      if (n == 1) {
        pts.push_back((a + b) * 0.5);
        break;
      }
      for (int k = 0; k < n; ++k) {
        pts.push_back(k == n - 1 ? b : a + (b - a) * (static_cast<double>(k) / (n - 1)));
      }
      break;
    }
    case FormationShape::Arrow: {
      const ArrowTails tails = arrow_tails(spec);
      pts.push_back(tails.tip);
      if (n == 1) break;
      const int per_tail = (n - 1 + 1) / 2;  // ceil((n-1)/2)
      const double spacing = spec.scale / per_tail;
      const Vec2 up = normalized(tails.upper_end - tails.tip);
      const Vec2 down = normalized(tails.lower_end - tails.tip);
      for (int k = 1; k < n; ++k) {
        const int along = (k + 1) / 2;
        const Vec2 dir = k % 2 == 1 ? up : down;
        pts.push_back(along == per_tail ? (k % 2 == 1 ? tails.upper_end : tails.lower_end)
                                        : tails.tip + dir * (spacing * along));
      }
      break;
    }
    case FormationShape::Infinity: {
      const Vec2 mid = spec.landmarks[0];
      for (int k = 0; k < n; ++k) {
        pts.push_back(mid + lemniscate_point(spec.scale, lemniscate_parameter(k, n)));
      }
      break;
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (distance(pts[i], pts[j]) <= 1e-9) throw ConfigError("formation expected positions coincide");
    }
  }
  return pts;
}

bool on_shape(const FormationSpec& spec, const Vec2& p, double threshold) {
  threshold += kShapeRoundoff;
  switch (spec.shape) {
    case FormationShape::Circle:
      return std::abs(distance(p, spec.landmarks[0]) - spec.scale) <= threshold;
    case FormationShape::Line:
      return distance_to_segment(p, spec.landmarks[0], spec.landmarks[1]) <= threshold;
    case FormationShape::Arrow: {
      const ArrowTails t = arrow_tails(spec);
      return std::min(distance_to_segment(p, t.tip, t.upper_end),
                      distance_to_segment(p, t.tip, t.lower_end)) <= threshold;
    }
    case FormationShape::Infinity: {
      // Each lobe is approximated by the disc of radius a/2 around its
      // center; the lemniscate lies inside the union of the two discs.
      const auto [left, right] = infinity_lobe_centers(spec);
      const double r_lobe = spec.scale / 2.0;
      return std::min(distance(p, left), distance(p, right)) <= r_lobe + threshold;
    }
  }
  return false;
}

FormationResult formation_success(const WorldState& state, const FormationSpec& spec) {
  const std::vector<Vec2> points = expected_positions(spec);
  const int n_agents = state.num_agents();
  FormationResult result;
  result.success.assign(n_agents, false);
  result.claimed_position.assign(n_agents, std::nullopt);

  // (distance, agent, point) for every eligible pair, claimed nearest-first.
  std::vector<std::tuple<double, int, int>> pairs;
  for (int i = 0; i < n_agents; ++i) {
    const Vec2 p = state.agents[i].position;
    if (!on_shape(spec, p, spec.threshold)) continue;
    for (int k = 0; k < static_cast<int>(points.size()); ++k) {
      const double d = distance(p, points[k]);
      if (d <= spec.threshold) pairs.emplace_back(d, i, k);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> taken(points.size(), false);
  for (const auto& [d, i, k] : pairs) {
    if (result.success[i] || taken[k]) continue;
    result.success[i] = true;
    result.claimed_position[i] = k;
    taken[k] = true;
  }
  const auto wins = std::count(result.success.begin(), result.success.end(), true);
  result.success_pct = n_agents > 0 ? 100.0 * static_cast<double>(wins) / n_agents : 0.0;
  return result;
}

}  // namespace fairnav
