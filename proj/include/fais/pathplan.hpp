#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fais/world.hpp"

namespace fais {

using Path = std::vector<int>;

/// One agent's knowledge of the dynamic road graph. Every road starts out
/// potentially open; blockages are discovered and marked as the agent
/// explores, and Collision Detection suppresses edges for a while.
class GraphView {
 public:
  GraphView() = default;
  explicit GraphView(const CityMap* map, int cycle = 0);

  const CityMap& map() const { return *map_; }
  int cycle() const { return cycle_; }
  void set_cycle(int cycle) { cycle_ = cycle; }

  bool known_blocked(int road) const { return known_blocked_.at(static_cast<std::size_t>(road)) != 0; }
  void mark_blocked(int road, bool blocked);
  /// Cycle at which a suppressed road becomes usable again; 0 when none.
  int reopen_cycle(int road) const { return reopen_at_.at(static_cast<std::size_t>(road)); }
  void suppress_until(int road, int cycle);

  bool traversable(int road) const;
  std::vector<int> known_blocked_roads() const;

 private:
  const CityMap* map_ = nullptr;
  int cycle_ = 0;
  std::vector<std::uint8_t> known_blocked_;
  std::vector<int> reopen_at_;
};

/// Collision Detection: suppress `road` until current + reopen_delay.
/// Throws std::out_of_range for an unknown road.
GraphView report_blocked(GraphView view, int road, int current_cycle, int reopen_delay);

/// Breadth-first tree over traversable roads. Parents are chosen so that the
/// path to every node is the lexicographically smallest minimum-hop path.
class BfsTree {
 public:
  BfsTree(const GraphView& view, int from);

  int source() const { return source_; }
  bool reached(int node) const { return hops_.at(static_cast<std::size_t>(node)) >= 0; }
  int hops(int node) const { return hops_.at(static_cast<std::size_t>(node)); }
  /// Length in meters of the tree path, or +inf when unreachable.
  double length(int node) const;
  std::optional<Path> path_to(int node) const;
  std::vector<int> reached_nodes() const;

 private:
  int source_;
  std::vector<int> parent_;
  std::vector<int> hops_;
  std::vector<double> length_;
};

/// Minimum-hop path, ties toward the lexicographically smallest node
/// sequence; std::nullopt when unreachable.
std::optional<Path> shortest_path(const GraphView& view, int from, int to);

/// Nodes connected to `from` through traversable roads, ascending.
std::vector<int> reachable_set(const GraphView& view, int from);

double path_length(const CityMap& map, std::span<const int> path);

struct AgentLocation {
  int agent;
  int node;
  const GraphView* view;
};

/// building id -> free agents (ascending) whose position reaches its entrance.
/// Every candidate building appears, possibly with an empty set.
std::map<int, std::vector<int>> agent_domains(std::span<const AgentLocation> agents,
                                              std::span<const int> buildings);

} // namespace fais
