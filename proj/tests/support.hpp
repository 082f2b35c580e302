#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "fais/world.hpp"

namespace fais::test {

struct BuildingSpec {
  Vec2 pos;
  int entrance = 0;
  double area = 100.0;
  bool broken = false;
};

/// Hand-made city: roads get their Euclidean length.
inline CityMap make_map(const std::vector<Vec2>& nodes, const std::vector<std::pair<int, int>>& roads,
                        const std::vector<BuildingSpec>& buildings, std::vector<int> refuges = {},
                        const std::vector<int>& blocked_roads = {}) {
  std::vector<Node> ns;
  for (std::size_t i = 0; i < nodes.size(); ++i) ns.push_back({static_cast<int>(i), nodes[i]});
  std::vector<Road> rs;
  for (std::size_t i = 0; i < roads.size(); ++i) {
    const auto [a, b] = roads[i];
    Road r{static_cast<int>(i), a, b, distance(nodes.at(a), nodes.at(b)), false};
    for (int k : blocked_roads) r.initially_blocked = r.initially_blocked || k == static_cast<int>(i);
    rs.push_back(r);
  }
  std::vector<Building> bs;
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const auto& s = buildings[i];
    Building b;
    b.id = static_cast<int>(i);
    b.pos = s.pos;
    b.area = s.area;
    b.broken = s.broken;
    b.entrance = s.entrance;
    for (int r : refuges) b.is_refuge = b.is_refuge || r == b.id;
    bs.push_back(b);
  }
  return CityMap(std::move(ns), std::move(rs), std::move(bs), std::move(refuges));
}

inline Scenario make_scenario(CityMap map, std::vector<int> ignitions, std::vector<int> spawns) {
  Scenario s;
  s.map = std::move(map);
  s.ignitions = std::move(ignitions);
  s.brigade_spawns = std::move(spawns);
  return s;
}

/// A straight line of junctions 100 m apart, one building beside each.
inline CityMap line_city(int n, double spacing = 100.0) {
  std::vector<Vec2> nodes;
  std::vector<std::pair<int, int>> roads;
  std::vector<BuildingSpec> buildings;
  for (int i = 0; i < n; ++i) {
    nodes.push_back({i * spacing, 0.0});
    if (i > 0) roads.push_back({i - 1, i});
    buildings.push_back({{i * spacing, 10.0}, i});
  }
  return make_map(nodes, roads, buildings);
}

} // namespace fais::test
