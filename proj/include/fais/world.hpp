#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fais/params.hpp"

namespace fais {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 v);
double distance(Vec2 a, Vec2 b);
/// Distance from p to the closed segment [a, b].
double segment_distance(Vec2 p, Vec2 a, Vec2 b);

struct Node {
  int id = 0;
  Vec2 pos;
  bool operator==(const Node&) const = default;
};

struct Road {
  int id = 0;
  int a = 0;
  int b = 0;
  double length = 0.0;
  bool initially_blocked = false;
  bool operator==(const Road&) const = default;

  int other(int node) const { return node == a ? b : a; }
};

struct Building {
  int id = 0;
  Vec2 pos;
  double area = 0.0;
  bool broken = false;
  bool is_refuge = false;
  int entrance = 0; // nearest road junction
  bool operator==(const Building&) const = default;
};

struct Adjacent {
  int node;
  int road;
};

/// Static city graph. Immutable once finalized; the spatial index and
/// adjacency lists are derived data and excluded from equality.
class CityMap {
 public:
  CityMap() = default;
  CityMap(std::vector<Node> nodes, std::vector<Road> roads,
          std::vector<Building> buildings, std::vector<int> refuges);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Road>& roads() const { return roads_; }
  const std::vector<Building>& buildings() const { return buildings_; }
  const std::vector<int>& refuges() const { return refuges_; }

  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const Road& road(int id) const { return roads_.at(static_cast<std::size_t>(id)); }
  const Building& building(int id) const {
    return buildings_.at(static_cast<std::size_t>(id));
  }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int road_count() const { return static_cast<int>(roads_.size()); }
  int building_count() const { return static_cast<int>(buildings_.size()); }
  bool has_building(int id) const { return id >= 0 && id < building_count(); }
  bool has_node(int id) const { return id >= 0 && id < node_count(); }
  bool has_road(int id) const { return id >= 0 && id < road_count(); }

  /// Neighbors of a junction sorted by neighbor id, then road id.
  std::span<const Adjacent> adjacent(int node) const;
  /// Lowest-id road joining a and b, or -1.
  int road_between(int a, int b) const;

  /// Buildings (ascending id) whose centroid lies within r of p.
  std::vector<int> buildings_within(Vec2 p, double r) const;

  bool operator==(const CityMap& o) const {
    return nodes_ == o.nodes_ && roads_ == o.roads_ && buildings_ == o.buildings_ &&
           refuges_ == o.refuges_;
  }

 private:
  void build_index();

  std::vector<Node> nodes_;
  std::vector<Road> roads_;
  std::vector<Building> buildings_;
  std::vector<int> refuges_;

  std::vector<std::vector<Adjacent>> adjacency_;
  double cell_ = 50.0;
  Vec2 origin_;
  int grid_w_ = 0;
  int grid_h_ = 0;
  std::vector<std::vector<int>> cells_;
};

struct ScheduledOpening {
  int cycle = 0;
  int road = 0;
  bool operator==(const ScheduledOpening&) const = default;
};

struct Scenario {
  CityMap map;
  std::vector<int> ignitions;
  std::vector<int> brigade_spawns;
  std::vector<ScheduledOpening> road_open_schedule;
  SimParams params;

  bool operator==(const Scenario&) const = default;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates scenario JSON. Throws ScenarioError.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);
/// Canonical encoding (sorted keys, two-space indent, trailing newline).
std::string save_scenario(const Scenario& scenario);
nlohmann::json scenario_to_json(const Scenario& scenario);
/// Replay readers pass require_ignitions = false: a run may start with
/// nothing burning even though a scenario file may not.
Scenario scenario_from_json(const nlohmann::json& j, bool require_ignitions = true);

struct CityOptions {
  int ignitions = -1; // -1: derive from building count
  int brigades = -1;  // -1: derive from building count
  double min_area = 500.0; // footprint range, m²
  double max_area = 3000.0;
};

/// Jittered-grid city; a pure function of its arguments.
/// n_buildings is clamped to [2, 20000], density to [50, 5000] per km².
Scenario generate_city(std::uint64_t seed, int n_buildings, double density,
                       CityOptions options = {});

/// Burning stages are 1..3; 0 unburnt, 4 extinguished, 5 burnt-out.
constexpr bool is_fiery(int stage) { return stage >= 1 && stage <= 3; }

/// Buildings other than b within r_adj whose stage is 0.
int unfired_neighbors(const CityMap& map, std::span<const int> stages, int b, double r_adj);

} // namespace fais
