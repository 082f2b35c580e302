#include "fais/simkernel.hpp"

#include <algorithm>
#include <stdexcept>

namespace fais {

int node_of(const CityMap& map, Position p) {
  return p.is_node() ? p.id : map.building(p.id).entrance;
}

Vec2 point_of(const CityMap& map, Position p) {
  return p.is_node() ? map.node(p.id).pos : map.building(p.id).pos;
}

nlohmann::json to_json(Position p) { return nlohmann::json::array({p.is_node() ? 0 : 1, p.id}); }

Position position_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("position must be [kind, id]");
  const int kind = j[0].get<int>();
  if (kind != 0 && kind != 1) throw std::invalid_argument("position kind must be 0 or 1");
  return kind == 0 ? Position::at_node(j[1].get<int>()) : Position::in_building(j[1].get<int>());
}

std::vector<int> WorldState::stages() const {
  std::vector<int> out;
  out.reserve(buildings.size());
  for (const auto& b : buildings) out.push_back(b.stage);
  return out;
}

int WorldState::fiery_count() const {
  return static_cast<int>(std::count_if(buildings.begin(), buildings.end(),
                                        [](const BuildingState& b) { return is_fiery(b.stage); }));
}

WorldState initial_state(const Scenario& scenario, std::span<const int> spawn_nodes) {
  const CityMap& map = scenario.map;
  const SimParams& p = scenario.params;
  WorldState s;
  s.buildings.resize(static_cast<std::size_t>(map.building_count()));
  for (int id : scenario.ignitions) {
    auto& b = s.buildings.at(static_cast<std::size_t>(id));
    b.stage = 1;
    b.max_stage = 1;
    b.water_need = map.building(id).area * p.water_per_m2 * stage_water_multiplier(1);
  }
  s.road_blocked.resize(static_cast<std::size_t>(map.road_count()));
  for (const Road& r : map.roads()) s.road_blocked[static_cast<std::size_t>(r.id)] = r.initially_blocked;
  for (int node : spawn_nodes) {
    s.brigades.push_back({Position::at_node(node), p.max_health, p.tank_capacity});
  }
  return s;
}

WorldState initial_state(const Scenario& scenario) {
  return initial_state(scenario, scenario.brigade_spawns);
}

nlohmann::json to_json(const Command& c) {
  return std::visit(
      [](const auto& cmd) -> nlohmann::json {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, Rest>) {
          return {{"type", "rest"}};
        } else if constexpr (std::is_same_v<T, Move>) {
          nlohmann::json j = {{"type", "move"}, {"path", cmd.path}};
          if (cmd.enter) j["enter"] = *cmd.enter;
          return j;
        } else {
          return {{"type", "extinguish"}, {"target", cmd.target}, {"amount", cmd.amount}};
        }
      },
      c);
}

namespace {

std::string brigade_tag(int id) { return "brigade " + std::to_string(id) + ": "; }

// Lowest-id unblocked road joining a and b, or -1 when every joining road is
// blocked. -2 when no road joins them at all.
int open_road(const CityMap& map, const WorldState& s, int a, int b) {
  int found = -2;
  for (const Adjacent& adj : map.adjacent(a)) {
    if (adj.node != b) continue;
    if (!s.road_blocked[static_cast<std::size_t>(adj.road)]) return adj.road;
    found = -1;
  }
  return found;
}

std::optional<std::string> validate_move(const CityMap& map, const BrigadeState& b, const Move& m) {
  if (m.path.empty()) return "move with empty path";
  if (m.path.front() != node_of(map, b.pos)) return "move path does not start at current node";
  for (std::size_t i = 0; i < m.path.size(); ++i) {
    if (!map.has_node(m.path[i])) return "move path names unknown node";
    if (i > 0 && map.road_between(m.path[i - 1], m.path[i]) < 0)
      return "move path uses non-adjacent nodes";
  }
  if (m.enter) {
    if (!map.has_building(*m.enter)) return "move enters unknown building";
    if (map.building(*m.enter).entrance != m.path.back())
      return "move enters building whose entrance is not the path end";
  }
  return std::nullopt;
}

} // namespace

StepResult step(const WorldState& state, const CommandMap& commands, const Scenario& scenario) {
  const CityMap& map = scenario.map;
  const SimParams& p = scenario.params;
  StepResult result{state, {}};
  WorldState& s = result.state;
  StepEvents& ev = result.events;
  const int cycle = state.cycle;

  // (0) screen commands
  CommandMap valid;
  for (const auto& [id, cmd] : commands) {
    if (id < 0 || id >= static_cast<int>(s.brigades.size())) {
      ev.diagnostics.push_back("command for unknown brigade " + std::to_string(id));
      continue;
    }
    const BrigadeState& b = s.brigades[static_cast<std::size_t>(id)];
    if (b.incapacitated()) continue;
    if (const auto* m = std::get_if<Move>(&cmd)) {
      if (auto err = validate_move(map, b, *m)) {
        ev.diagnostics.push_back(brigade_tag(id) + *err);
        continue;
      }
    } else if (const auto* e = std::get_if<Extinguish>(&cmd)) {
      if (!map.has_building(e->target)) {
        ev.diagnostics.push_back(brigade_tag(id) + "extinguish names unknown building");
        continue;
      }
      if (!(e->amount > 0.0) || e->amount > p.max_extinguish) {
        ev.diagnostics.push_back(brigade_tag(id) + "extinguish amount out of range");
        continue;
      }
    }
    valid.emplace(id, cmd);
  }

  // (1) scheduled road openings
  for (const auto& op : scenario.road_open_schedule) {
    if (op.cycle != cycle) continue;
    auto& blocked = s.road_blocked.at(static_cast<std::size_t>(op.road));
    if (blocked) {
      blocked = 0;
      ev.opened_roads.push_back(op.road);
    }
  }

  // (2) moves; brigades standing still at a junction can jam it
  std::vector<int> standing(static_cast<std::size_t>(map.node_count()), 0);
  for (std::size_t i = 0; i < s.brigades.size(); ++i) {
    const BrigadeState& b = s.brigades[i];
    if (!b.pos.is_node() || b.incapacitated()) continue;
    auto it = valid.find(static_cast<int>(i));
    if (it == valid.end() || !std::holds_alternative<Move>(it->second))
      ++standing[static_cast<std::size_t>(b.pos.id)];
  }
  for (const auto& [id, cmd] : valid) {
    const auto* m = std::get_if<Move>(&cmd);
    if (!m) continue;
    BrigadeState& b = s.brigades[static_cast<std::size_t>(id)];
    int at = m->path.front();
    int budget = p.move_budget;
    bool stopped = false;
    const Position start = b.pos;
    std::size_t k = 1;
    for (; k < m->path.size() && budget > 0; ++k) {
      const int next = m->path[k];
      if (open_road(map, s, at, next) < 0 ||
          standing[static_cast<std::size_t>(next)] >= p.jam_limit) {
        stopped = true;
        break;
      }
      at = next;
      --budget;
    }
    if (k < m->path.size()) stopped = true;
    if (m->enter && !stopped && budget > 0) {
      b.pos = Position::in_building(*m->enter);
    } else if (m->path.size() > 1 || !start.is_node()) {
      // A one-node path without `enter` steps out of a building onto its entrance.
      b.pos = Position::at_node(at);
    }
  }

  // (3) extinguishing, ascending brigade id
  std::vector<int> working(static_cast<std::size_t>(map.node_count()), 0);
  for (const auto& [id, cmd] : valid) {
    const auto* e = std::get_if<Extinguish>(&cmd);
    if (!e) continue;
    BrigadeState& b = s.brigades[static_cast<std::size_t>(id)];
    const Building& target = map.building(e->target);
    if (distance(point_of(map, b.pos), target.pos) > p.extinguish_range) {
      ev.diagnostics.push_back(brigade_tag(id) + "extinguish target out of range");
      continue;
    }
    if (b.pos.is_node()) ++working[static_cast<std::size_t>(b.pos.id)];
    BuildingState& bs = s.buildings[static_cast<std::size_t>(e->target)];
    if (!is_fiery(bs.stage)) continue;
    const double applied = std::min(e->amount, b.water);
    if (applied <= 0.0) continue;
    b.water -= applied;
    bs.water_need -= applied;
    ev.water.push_back({id, e->target, applied});
    if (bs.water_need <= 0.0) {
      ev.stage_changes.push_back({e->target, bs.stage, 4});
      bs.stage = 4;
      bs.water_need = 0.0;
      bs.stage_since = cycle;
    }
  }
  for (int n : working) ev.standing_violations += std::max(0, n - p.stand_cap);

  // (4) fire physics
  std::vector<int> burning;
  for (int id = 0; id < map.building_count(); ++id) {
    if (is_fiery(s.buildings[static_cast<std::size_t>(id)].stage)) burning.push_back(id);
  }
  for (int f : burning) {
    for (int other : map.buildings_within(map.building(f).pos, p.spread_radius)) {
      if (other == f) continue;
      auto& bs = s.buildings[static_cast<std::size_t>(other)];
      if (bs.stage == 0) bs.heat += p.spread_power;
    }
  }
  for (int f : burning) {
    BuildingState& bs = s.buildings[static_cast<std::size_t>(f)];
    if (cycle - bs.stage_since < p.stage_period) continue;
    const int from = bs.stage;
    if (from == 3) {
      bs.stage = 5;
      bs.water_need = 0.0;
    } else {
      bs.stage = from + 1;
      bs.water_need += map.building(f).area * p.water_per_m2 *
                       (stage_water_multiplier(bs.stage) - stage_water_multiplier(from));
      bs.max_stage = std::max(bs.max_stage, bs.stage);
    }
    bs.stage_since = cycle;
    ev.stage_changes.push_back({f, from, bs.stage});
  }
  for (int id = 0; id < map.building_count(); ++id) {
    BuildingState& bs = s.buildings[static_cast<std::size_t>(id)];
    if (bs.stage != 0) continue;
    const double threshold =
        map.building(id).broken ? p.ignition_threshold / 2.0 : p.ignition_threshold;
    if (bs.heat < threshold) continue;
    bs.stage = 1;
    bs.max_stage = std::max(bs.max_stage, 1);
    bs.stage_since = cycle;
    bs.water_need = map.building(id).area * p.water_per_m2 * stage_water_multiplier(1);
    ev.ignitions.push_back(id);
    ev.stage_changes.push_back({id, 0, 1});
  }

  // (5) refuges and fire damage
  for (BrigadeState& b : s.brigades) {
    if (b.incapacitated() || b.pos.is_node()) continue;
    if (map.building(b.pos.id).is_refuge) {
      b.water = std::min(p.tank_capacity, b.water + p.refill_rate);
      b.health = std::min(p.max_health, b.health + p.heal_rate);
    }
    if (is_fiery(s.buildings[static_cast<std::size_t>(b.pos.id)].stage)) {
      b.health = std::max(0.0, b.health - p.fire_damage);
    }
  }

  s.cycle = cycle + 1;
  return result;
}

Perception perceive_at(const WorldState& state, const Scenario& scenario, Vec2 where) {
  const CityMap& map = scenario.map;
  const double r = scenario.params.vision_radius;
  Perception out;
  out.cycle = state.cycle;
  for (int id : map.buildings_within(where, r)) {
    out.buildings.push_back(
        {id, state.buildings[static_cast<std::size_t>(id)].stage, map.building(id).broken});
  }
  for (const Road& road : map.roads()) {
    if (segment_distance(where, map.node(road.a).pos, map.node(road.b).pos) <= r)
      out.roads.push_back({road.id, state.road_blocked[static_cast<std::size_t>(road.id)] != 0});
  }
  return out;
}

Perception perceive(const WorldState& state, const Scenario& scenario, int agent) {
  if (agent < 0 || agent >= static_cast<int>(state.brigades.size()))
    throw std::out_of_range("unknown agent " + std::to_string(agent));
  const BrigadeState& self = state.brigades[static_cast<std::size_t>(agent)];
  Perception out = perceive_at(state, scenario, point_of(scenario.map, self.pos));
  out.self = self;
  return out;
}

double burnt_ratio(const WorldState& state) {
  if (state.buildings.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& b : state.buildings) sum += static_cast<double>(b.max_stage) / 3.0;
  return sum / static_cast<double>(state.buildings.size());
}

} // namespace fais
