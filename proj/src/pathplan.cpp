#include "fais/pathplan.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace fais {

GraphView::GraphView(const CityMap* map, int cycle)
    : map_(map),
      cycle_(cycle),
      known_blocked_(static_cast<std::size_t>(map->road_count()), 0),
      reopen_at_(static_cast<std::size_t>(map->road_count()), 0) {}

void GraphView::mark_blocked(int road, bool blocked) {
  known_blocked_.at(static_cast<std::size_t>(road)) = blocked ? 1 : 0;
}

void GraphView::suppress_until(int road, int cycle) {
  int& at = reopen_at_.at(static_cast<std::size_t>(road));
  at = std::max(at, cycle);
}

bool GraphView::traversable(int road) const {
  const auto i = static_cast<std::size_t>(road);
  return known_blocked_[i] == 0 && reopen_at_[i] <= cycle_;
}

std::vector<int> GraphView::known_blocked_roads() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < known_blocked_.size(); ++i) {
    if (known_blocked_[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

GraphView report_blocked(GraphView view, int road, int current_cycle, int reopen_delay) {
  if (!view.map().has_road(road)) throw std::out_of_range("unknown road " + std::to_string(road));
  view.suppress_until(road, current_cycle + reopen_delay);
  return view;
}

BfsTree::BfsTree(const GraphView& view, int from) : source_(from) {
  const CityMap& map = view.map();
  if (!map.has_node(from)) throw std::out_of_range("unknown node " + std::to_string(from));
  const auto n = static_cast<std::size_t>(map.node_count());
  parent_.assign(n, -1);
  hops_.assign(n, -1);
  length_.assign(n, std::numeric_limits<double>::infinity());
  std::deque<int> queue{from};
  hops_[static_cast<std::size_t>(from)] = 0;
  length_[static_cast<std::size_t>(from)] = 0.0;
  // Adjacency is sorted by neighbor id and nodes leave the queue in
  // lexicographic order of their paths, so first discovery is the smallest.
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Adjacent& adj : map.adjacent(u)) {
      const auto v = static_cast<std::size_t>(adj.node);
      if (hops_[v] >= 0 || !view.traversable(adj.road)) continue;
      hops_[v] = hops_[static_cast<std::size_t>(u)] + 1;
      parent_[v] = u;
      length_[v] = length_[static_cast<std::size_t>(u)] + map.road(adj.road).length;
      queue.push_back(adj.node);
    }
  }
}

double BfsTree::length(int node) const { return length_.at(static_cast<std::size_t>(node)); }

std::optional<Path> BfsTree::path_to(int node) const {
  if (!reached(node)) return std::nullopt;
  Path path;
  for (int v = node; v >= 0; v = parent_[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> BfsTree::reached_nodes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < hops_.size(); ++i) {
    if (hops_[i] >= 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::optional<Path> shortest_path(const GraphView& view, int from, int to) {
  if (!view.map().has_node(to)) throw std::out_of_range("unknown node " + std::to_string(to));
  return BfsTree(view, from).path_to(to);
}

std::vector<int> reachable_set(const GraphView& view, int from) {
  return BfsTree(view, from).reached_nodes();
}

double path_length(const CityMap& map, std::span<const int> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int road = map.road_between(path[i - 1], path[i]);
    if (road < 0) throw std::invalid_argument("path uses non-adjacent nodes");
    total += map.road(road).length;
  }
  return total;
}

std::map<int, std::vector<int>> agent_domains(std::span<const AgentLocation> agents,
                                              std::span<const int> buildings) {
  std::map<int, std::vector<int>> domains;
  if (buildings.empty()) return domains;
  for (int b : buildings) domains[b];
  for (const AgentLocation& a : agents) {
    const BfsTree tree(*a.view, a.node);
    const CityMap& map = a.view->map();
    for (int b : buildings) {
      if (tree.reached(map.building(b).entrance)) domains[b].push_back(a.agent);
    }
  }
  for (auto& [b, list] : domains) std::sort(list.begin(), list.end());
  return domains;
}

} // namespace fais
