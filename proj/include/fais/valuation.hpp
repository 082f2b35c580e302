#pragma once

#include <map>
#include <span>
#include <vector>

#include "fais/params.hpp"
#include "fais/world.hpp"

namespace fais {

/// Counter-clockwise convex hull by Graham scan, starting at the lowest
/// (then leftmost) point. Collinear and duplicate points are dropped;
/// inputs with fewer than three points come back unchanged.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

/// Burning buildings and the hull of their centroids.
struct FireBorder {
  std::vector<int> fiery;    // ascending building ids
  std::vector<Vec2> hull;    // counter-clockwise
};

FireBorder make_fire_border(const CityMap& map, std::span<const int> stages);

/// Unit bisector of the hull's interior angle at vertex x. Throws
/// std::invalid_argument when x is not a vertex or the hull has < 3 vertices.
Vec2 border_direction(Vec2 x, std::span<const Vec2> hull);

/// Fire-border destructiveness of burning building x (meters).
/// Throws std::invalid_argument when x is not in border.fiery.
double hv(const CityMap& map, int x, const FireBorder& border, const Weights& weights);

/// beta * n_unfired + gamma * hv - alpha * sum(distances).
double combine_value(double n_unfired, double hv_value, std::span<const double> distances,
                     const Weights& weights);

struct AgentDistance {
  int agent;
  double meters;    // road distance; +inf when the agent cannot reach the building
  double straight;  // centroid distance, stands in for unreachable agents when unrestricted
};

/// Building value of burning building b. Unreachable agents are left out of
/// the distance sum unless weights.restrict_to_domain is false.
double building_value(const CityMap& map, std::span<const int> stages, const FireBorder& border,
                      int b, std::span<const AgentDistance> free_agents, const Weights& weights,
                      double r_adj);

/// The k highest-valued buildings, ties toward the lower id.
std::vector<int> select_targets(const std::map<int, double>& values, int k);

/// ceil(free / 3) clamped to [1, max_targets].
int target_count(int free_agents, int max_targets);

} // namespace fais
