#include "fais/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fais {

namespace {

bool lower_left(Vec2 a, Vec2 b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

} // namespace

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
  if (points.size() < 3) return {points.begin(), points.end()};

  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), lower_left);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  const Vec2 pivot = pts.front();
  std::sort(pts.begin() + 1, pts.end(), [pivot](Vec2 a, Vec2 b) {
    const double c = cross(a - pivot, b - pivot);
    if (c != 0.0) return c > 0.0;
    return dot(a - pivot, a - pivot) < dot(b - pivot, b - pivot);
  });

  std::vector<Vec2> hull;
  for (const Vec2& p : pts) {
    while (hull.size() >= 2 &&
           cross(hull.back() - hull[hull.size() - 2], p - hull.back()) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return hull;
}

FireBorder make_fire_border(const CityMap& map, std::span<const int> stages) {
  FireBorder border;
  std::vector<Vec2> points;
  for (int id = 0; id < map.building_count(); ++id) {
    if (!is_fiery(stages[static_cast<std::size_t>(id)])) continue;
    border.fiery.push_back(id);
    points.push_back(map.building(id).pos);
  }
  border.hull = convex_hull(points);
  return border;
}

Vec2 border_direction(Vec2 x, std::span<const Vec2> hull) {
  if (hull.size() < 3) throw std::invalid_argument("hull needs at least 3 vertices");
  const auto it = std::find(hull.begin(), hull.end(), x);
  if (it == hull.end()) throw std::invalid_argument("point is not a hull vertex");
  const std::size_t i = static_cast<std::size_t>(it - hull.begin());
  const Vec2 prev = hull[(i + hull.size() - 1) % hull.size()];
  const Vec2 next = hull[(i + 1) % hull.size()];
  const Vec2 a = prev - x;
  const Vec2 b = next - x;
  const Vec2 sum = a * (1.0 / norm(a)) + b * (1.0 / norm(b));
  return sum * (1.0 / norm(sum));
}

double hv(const CityMap& map, int x, const FireBorder& border, const Weights& weights) {
  if (!std::binary_search(border.fiery.begin(), border.fiery.end(), x))
    throw std::invalid_argument("building " + std::to_string(x) + " is not burning");
  const Vec2 px = map.building(x).pos;
  if (border.fiery.size() == 1) return weights.hv_max;
  if (border.fiery.size() == 2) {
    const int other = border.fiery[0] == x ? border.fiery[1] : border.fiery[0];
    return std::min(distance(px, map.building(other).pos), weights.hv_max);
  }
  if (border.hull.size() < 3) return 0.0;
  if (std::find(border.hull.begin(), border.hull.end(), px) == border.hull.end()) return 0.0;

  Vec2 u = border_direction(px, border.hull);
  if (!weights.inward_bisector) u = u * -1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int y : border.fiery) {
    if (y == x) continue;
    const Vec2 d = map.building(y).pos - px;
    if (dot(d, u) < 0.0) continue;
    if (std::abs(cross(u, d)) > weights.margin) continue;
    best = std::min(best, norm(d));
  }
  return std::min(best, weights.hv_max);
}

double combine_value(double n_unfired, double hv_value, std::span<const double> distances,
                     const Weights& weights) {
  double sum = 0.0;
  for (double d : distances) sum += d;
  return weights.beta * n_unfired + weights.gamma * hv_value - weights.alpha * sum;
}

double building_value(const CityMap& map, std::span<const int> stages, const FireBorder& border,
                      int b, std::span<const AgentDistance> free_agents, const Weights& weights,
                      double r_adj) {
  if (!map.has_building(b) || !is_fiery(stages[static_cast<std::size_t>(b)]))
    throw std::invalid_argument("building " + std::to_string(b) + " is not burning");
  std::vector<double> distances;
  for (const AgentDistance& a : free_agents) {
    if (std::isfinite(a.meters)) {
      distances.push_back(a.meters);
    } else if (!weights.restrict_to_domain) {
      distances.push_back(a.straight);
    }
  }
  const int n = unfired_neighbors(map, stages, b, r_adj);
  return combine_value(n, hv(map, b, border, weights), distances, weights);
}

std::vector<int> select_targets(const std::map<int, double>& values, int k) {
  std::vector<std::pair<int, double>> ranked(values.begin(), values.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<int> out;
  for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < k; ++i)
    out.push_back(ranked[i].first);
  return out;
}

int target_count(int free_agents, int max_targets) {
  return std::clamp((free_agents + 2) / 3, 1, max_targets);
}

} // namespace fais
