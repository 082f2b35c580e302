#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fais/world.hpp"

namespace fais {

/// Where a brigade is: on a road junction or inside a building.
struct Position {
  enum class Kind : std::uint8_t { Node, Building };
  Kind kind = Kind::Node;
  int id = 0;

  static Position at_node(int id) { return {Kind::Node, id}; }
  static Position in_building(int id) { return {Kind::Building, id}; }
  bool is_node() const { return kind == Kind::Node; }
  bool operator==(const Position&) const = default;
};

/// Junction a position starts from: the node itself or the building entrance.
int node_of(const CityMap& map, Position p);
Vec2 point_of(const CityMap& map, Position p);
nlohmann::json to_json(Position p);
Position position_from_json(const nlohmann::json& j);

struct BuildingState {
  double heat = 0.0;
  int stage = 0;
  int max_stage = 0; // highest burning stage reached, 0..3
  double water_need = 0.0;
  int stage_since = 0; // cycle the current stage was entered
  bool operator==(const BuildingState&) const = default;
};

struct BrigadeState {
  Position pos;
  double health = 0.0;
  double water = 0.0;
  bool incapacitated() const { return health <= 0.0; }
  bool operator==(const BrigadeState&) const = default;
};

struct WorldState {
  int cycle = 0;
  std::vector<BuildingState> buildings;
  std::vector<std::uint8_t> road_blocked;
  std::vector<BrigadeState> brigades;

  bool operator==(const WorldState&) const = default;
  std::vector<int> stages() const;
  int fiery_count() const;
};

/// Initial ignitions start at stage 1; brigades spawn at the given nodes
/// with full tanks and health.
WorldState initial_state(const Scenario& scenario, std::span<const int> spawn_nodes);
WorldState initial_state(const Scenario& scenario);

struct Rest {
  bool operator==(const Rest&) const = default;
};
/// Traverse `path` (starting at the current junction); optionally enter a
/// building whose entrance is the last node of the path.
struct Move {
  std::vector<int> path;
  std::optional<int> enter;
  bool operator==(const Move&) const = default;
};
struct Extinguish {
  int target = 0;
  double amount = 0.0;
  bool operator==(const Extinguish&) const = default;
};
using Command = std::variant<Rest, Move, Extinguish>;
using CommandMap = std::map<int, Command>;

nlohmann::json to_json(const Command& c);

struct StageChange {
  int building;
  int from;
  int to;
};
struct WaterApplication {
  int brigade;
  int building;
  double amount;
};

struct StepEvents {
  std::vector<std::string> diagnostics;
  std::vector<int> ignitions;
  std::vector<StageChange> stage_changes;
  std::vector<WaterApplication> water;
  std::vector<int> opened_roads;
  // Brigades working from one junction beyond params.stand_cap, summed.
  int standing_violations = 0;
};

struct StepResult {
  WorldState state;
  StepEvents events;
};

/// One kernel cycle: road openings, moves, extinguishing, fire physics,
/// refuge and damage effects, then cycle + 1. Malformed commands are
/// treated as Rest and reported in the diagnostics.
StepResult step(const WorldState& state, const CommandMap& commands, const Scenario& scenario);

struct SeenBuilding {
  int id;
  int stage;
  bool broken;
  bool operator==(const SeenBuilding&) const = default;
};
struct SeenRoad {
  int id;
  bool blocked;
  bool operator==(const SeenRoad&) const = default;
};
struct Perception {
  int cycle = 0;
  std::optional<BrigadeState> self;
  std::vector<SeenBuilding> buildings;
  std::vector<SeenRoad> roads;
};

/// What brigade `agent` sees within the vision radius. Throws std::out_of_range.
Perception perceive(const WorldState& state, const Scenario& scenario, int agent);
/// Vision from a fixed point (the station).
Perception perceive_at(const WorldState& state, const Scenario& scenario, Vec2 where);

/// Mean over buildings of the highest burning stage reached, divided by 3.
double burnt_ratio(const WorldState& state);

} // namespace fais
