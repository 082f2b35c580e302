#pragma once

// Slow, literal reference implementations. None of them calls into the
// library code they check.

#include <optional>
#include <vector>

#include "fais/assign.hpp"
#include "fais/pathplan.hpp"
#include "fais/world.hpp"

namespace fais::oracle {

struct BruteAssignment {
  int matched = 0;
  double total = 0.0;
};

/// Exhaustive search: most finite pairs first, then the least total.
BruteAssignment brute_force_assignment(const CostMatrix& cost);

/// Hull vertices by checking every ordered pair as a candidate edge, O(n³).
/// Fewer than three input points come back unchanged, like the real thing.
std::vector<Vec2> hull_vertices(const std::vector<Vec2>& points);

/// Hull edges as (from, to) with every other point on the left or on the
/// segment; counter-clockwise orientation. Inputs must be distinct points.
std::vector<std::pair<Vec2, Vec2>> hull_edges(const std::vector<Vec2>& points);

struct HvInput {
  std::vector<Vec2> fiery; // centroids of every burning building
  std::size_t x = 0;       // index into fiery
  double margin = 20.0;
  double hv_max = 200.0;
};

/// Destructiveness by scanning every other burning building against the
/// interior bisector ray, computed from angles rather than vector sums.
double hv_scan(const HvInput& in);

/// Unit-weight Dijkstra over roads usable in `view`; -1 when unreachable.
std::vector<int> unit_dijkstra(const GraphView& view, int from);

} // namespace fais::oracle
