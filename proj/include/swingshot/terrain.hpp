#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swingshot/rng.hpp"
#include "swingshot/vec2.hpp"

namespace swingshot {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A 2D grasp target in world coordinates (meters).
struct Handhold {
  double x = 0.0;
  double y = 0.0;
};

struct HandholdSequence {
  std::vector<Handhold> holds;
  uint64_t seed = 0;
};

struct GapInterval {
  double x0 = 0.0;
  double x1 = 0.0;
  double width() const { return x1 - x0; }
};

// Piecewise-linear ceiling heightfield with unreachable gap intervals where
// no handhold may be placed.
struct Terrain {
  std::vector<Vec2> ceiling;  // knots, ascending x
  std::vector<GapInterval> gaps;
  uint64_t seed = 0;

  double x_min() const { return ceiling.front().x; }
  double x_max() const { return ceiling.back().x; }
  double height_at(double x) const;
  bool in_gap(double x) const;
  // Index of the first gap containing x, or -1.
  int gap_index(double x) const;
};

// An ordered candidate handhold plan for the MPC planner.
struct Plan {
  std::vector<Handhold> holds;
  double score = 0.0;
  bool truncated = false;  // plan hit the terrain extent before H holds
};

inline Handhold next_handhold(const Handhold& prev, double d, double phi) {
  return {prev.x + d * std::cos(phi), prev.y + d * std::sin(phi)};
}

// First hold fixed at the origin; successive holds drawn d ~ U(d_range),
// phi ~ U(phi_range). Deterministic in seed.
HandholdSequence generate_sequence(uint64_t seed, int count,
                                   std::pair<double, double> d_range,
                                   std::pair<double, double> phi_range);

struct TerrainParams {
  double length = 40.0;       // heightfield x-extent, meters
  double knot_spacing = 0.5;  // meters
  double base_height = 2.0;
  double walk_step = 0.13;    // random-walk step bound, matches +/-15 deg at 0.5 m
  int num_gaps = 3;
  double gap_width_min = 2.1;  // strictly above the 1.8 m plan step and 2.0 m d max
  double gap_width_max = 2.6;
  double gap_margin = 3.0;  // clearance between gaps and from terrain ends
};

Terrain generate_terrain(uint64_t seed, const TerrainParams& params = {});

// Holds placed at dx ~ U(1.1, 1.8) beyond the previous one, y from the
// ceiling; a hold landing inside a gap snaps to the nearest gap edge.
Plan sample_plan(const Terrain& terrain, const Handhold& start, int horizon_holds, Rng& rng);

// Line-oriented text serialization: `H x y` handholds, `G x0 x1` gaps,
// `C x y` ceiling knots; 9 significant digits.
std::string serialize_sequence(const HandholdSequence& seq);
HandholdSequence parse_sequence(const std::string& text);
std::string serialize_terrain(const Terrain& terrain);
Terrain parse_terrain(const std::string& text);

}  // namespace swingshot
