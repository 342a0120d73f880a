#pragma once

#include <optional>
#include <utility>
#include <string_view>
#include <vector>

#include "fairnav/geometry.hpp"

namespace fairnav {

struct WorldState;

enum class FormationShape { Circle, Line, Arrow, Infinity };

std::string_view to_string(FormationShape shape);
// Throws ConfigError on an unknown name.
FormationShape parse_formation_shape(std::string_view name);

// Shape description around one landmark (circle, arrow, infinity) or between
// two landmarks (line).
//
// `scale` means: circle radius; ignored for line (the landmarks fix its
// length); arrow tail length; lemniscate half-width.
struct FormationSpec {
  FormationShape shape = FormationShape::Circle;
  std::vector<Vec2> landmarks{Vec2{}};
  double scale = 0.5;
  int n_positions = 3;
  double threshold = 0.1;
};

// Throws ConfigError when landmark count, scale or n_positions are invalid.
void validate(const FormationSpec& spec);

// Discretizes the shape into spec.n_positions points, in a fixed order:
//   circle   - angles 2*pi*k/n counterclockwise from +x;
//   line     - evenly spaced from landmarks[0] to landmarks[1], endpoints
//              included (a single point sits at the midpoint);
//   arrow    - tip at the landmark, then alternating between the +135 and
//              -135 degree tails, spaced scale / ceil((n-1)/2) apart;
//   infinity - lemniscate_point(scale, lemniscate_parameter(k, n)) shifted
//              to the landmark.
std::vector<Vec2> expected_positions(const FormationSpec& spec);

// x = a sin t / (1 + cos^2 t), y = a sin t cos t / (1 + cos^2 t).
Vec2 lemniscate_point(double a, double t);
// t = 2*pi*k/n for odd n, 2*pi*(k + 1/2)/n for even n.
double lemniscate_parameter(int k, int n);

// The two tail segments of an arrow, each from the tip outward.
struct ArrowTails {
  Vec2 tip;
  Vec2 upper_end;
  Vec2 lower_end;
};
ArrowTails arrow_tails(const FormationSpec& spec);

// Lobe circle centers for the infinity shape; radius is scale / 2.
std::pair<Vec2, Vec2> infinity_lobe_centers(const FormationSpec& spec);

// Absolute slack added to every shape test so points generated on a shape
// pass at threshold 0 despite rounding.
inline constexpr double kShapeRoundoff = 1e-12;

// Shape-only predicate for a single point at the given threshold.
bool on_shape(const FormationSpec& spec, const Vec2& p, double threshold);

struct FormationResult {
  std::vector<bool> success;
  // Index into expected_positions() claimed by each successful agent.
  std::vector<std::optional<int>> claimed_position;
  double success_pct = 0.0;
};

// Per-agent success: on the shape within spec.threshold and holding a unique
// expected position (within threshold, claimed nearest-first, ties by agent
// index then position index).
FormationResult formation_success(const WorldState& state, const FormationSpec& spec);

}  // namespace fairnav
