#include "swingshot/terrain.hpp"

#include <algorithm>
#include <cmath>

#include "swingshot/io.hpp"

namespace swingshot {

double Terrain::height_at(double x) const {
  if (x <= ceiling.front().x) return ceiling.front().y;
  if (x >= ceiling.back().x) return ceiling.back().y;
  // Knots are evenly spaced in practice, but binary search keeps this valid
  // for any parsed terrain.
  auto it = std::upper_bound(ceiling.begin(), ceiling.end(), x,
                             [](double v, const Vec2& k) { return v < k.x; });
  const Vec2& b = *it;
  const Vec2& a = *(it - 1);
  const double t = (x - a.x) / (b.x - a.x);
  return a.y + t * (b.y - a.y);
}

bool Terrain::in_gap(double x) const { return gap_index(x) >= 0; }

int Terrain::gap_index(double x) const {
  for (size_t i = 0; i < gaps.size(); ++i)
    if (x > gaps[i].x0 && x < gaps[i].x1) return static_cast<int>(i);
  return -1;
}

HandholdSequence generate_sequence(uint64_t seed, int count,
                                   std::pair<double, double> d_range,
                                   std::pair<double, double> phi_range) {
  if (count < 2) throw ConfigError("generate_sequence: count must be >= 2");
  if (d_range.first > d_range.second || phi_range.first > phi_range.second)
    throw ConfigError("generate_sequence: invalid range (min > max)");

  HandholdSequence seq;
  seq.seed = seed;
  seq.holds.reserve(static_cast<size_t>(count));
  seq.holds.push_back({0.0, 0.0});
  Rng rng(seed);
  for (int i = 1; i < count; ++i) {
    const double d = rng.uniform(d_range.first, d_range.second);
    const double phi = rng.uniform(phi_range.first, phi_range.second);
    seq.holds.push_back(next_handhold(seq.holds.back(), d, phi));
  }
  return seq;
}

Terrain generate_terrain(uint64_t seed, const TerrainParams& p) {
  Terrain t;
  t.seed = seed;
  Rng rng(seed);

  const int knots = static_cast<int>(std::floor(p.length / p.knot_spacing)) + 1;
  t.ceiling.reserve(static_cast<size_t>(knots));
  double y = p.base_height;
  for (int i = 0; i < knots; ++i) {
    t.ceiling.push_back({i * p.knot_spacing, y});
    y += rng.uniform(-p.walk_step, p.walk_step);
  }

  // Gaps at uniformly random non-overlapping locations, rejection sampled.
  const double lo = t.x_min() + p.gap_margin;
  const double hi = t.x_max() - p.gap_margin;
  for (int attempt = 0; attempt < 10000 && static_cast<int>(t.gaps.size()) < p.num_gaps;
       ++attempt) {
    const double w = rng.uniform(p.gap_width_min, p.gap_width_max);
    const double x0 = rng.uniform(lo, hi - w);
    const GapInterval cand{x0, x0 + w};
    const bool clear = std::all_of(t.gaps.begin(), t.gaps.end(), [&](const GapInterval& g) {
      return cand.x1 + p.gap_margin <= g.x0 || g.x1 + p.gap_margin <= cand.x0;
    });
    if (clear) t.gaps.push_back(cand);
  }
  if (static_cast<int>(t.gaps.size()) < p.num_gaps)
    throw ConfigError("generate_terrain: could not place gaps; terrain too short");
  std::sort(t.gaps.begin(), t.gaps.end(),
            [](const GapInterval& a, const GapInterval& b) { return a.x0 < b.x0; });
  return t;
}

Plan sample_plan(const Terrain& terrain, const Handhold& start, int horizon_holds, Rng& rng) {
  if (horizon_holds < 1) throw ConfigError("sample_plan: horizon must be >= 1");
  Plan plan;
  plan.holds.reserve(static_cast<size_t>(horizon_holds));
  double x = start.x;
  for (int i = 0; i < horizon_holds; ++i) {
    x += rng.uniform(1.1, 1.8);
    if (x > terrain.x_max()) {
      plan.truncated = true;
      break;
    }
    const int g = terrain.gap_index(x);
    if (g >= 0) {
      const GapInterval& gap = terrain.gaps[static_cast<size_t>(g)];
      x = (x - gap.x0 < gap.x1 - x) ? gap.x0 : gap.x1;
    }
    plan.holds.push_back({x, terrain.height_at(x)});
  }
  return plan;
}

std::string serialize_sequence(const HandholdSequence& seq) {
  std::string out;
  appendf(out, "# seed %llu\n", static_cast<unsigned long long>(seq.seed));
  for (const Handhold& h : seq.holds)
    appendf(out, "H %s %s\n", fmt_g9(h.x).c_str(), fmt_g9(h.y).c_str());
  return out;
}

namespace {

uint64_t parse_seed_comment(const std::string& line) {
  const auto fields = split_fields(line);
  if (fields.size() >= 3 && fields[0] == "#" && fields[1] == "seed")
    return std::strtoull(fields[2].c_str(), nullptr, 10);
  return 0;
}

}  // namespace

HandholdSequence parse_sequence(const std::string& text) {
  HandholdSequence seq;
  for (const std::string& line : split_lines(text)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      seq.seed = parse_seed_comment(line);
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() == 3 && f[0] == "H")
      seq.holds.push_back({std::strtod(f[1].c_str(), nullptr), std::strtod(f[2].c_str(), nullptr)});
    else
      throw ConfigError("parse_sequence: bad line: " + line);
  }
  if (seq.holds.empty()) throw ConfigError("parse_sequence: no holds");
  return seq;
}

std::string serialize_terrain(const Terrain& terrain) {
  std::string out;
  appendf(out, "# seed %llu\n", static_cast<unsigned long long>(terrain.seed));
  for (const Vec2& k : terrain.ceiling)
    appendf(out, "C %s %s\n", fmt_g9(k.x).c_str(), fmt_g9(k.y).c_str());
  for (const GapInterval& g : terrain.gaps)
    appendf(out, "G %s %s\n", fmt_g9(g.x0).c_str(), fmt_g9(g.x1).c_str());
  return out;
}

Terrain parse_terrain(const std::string& text) {
  Terrain t;
  for (const std::string& line : split_lines(text)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.seed = parse_seed_comment(line);
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() == 3 && f[0] == "C")
      t.ceiling.push_back({std::strtod(f[1].c_str(), nullptr), std::strtod(f[2].c_str(), nullptr)});
    else if (f.size() == 3 && f[0] == "G")
      t.gaps.push_back({std::strtod(f[1].c_str(), nullptr), std::strtod(f[2].c_str(), nullptr)});
    else
      throw ConfigError("parse_terrain: bad line: " + line);
  }
  if (t.ceiling.size() < 2) throw ConfigError("parse_terrain: need >= 2 ceiling knots");
  return t;
}

}  // namespace swingshot
