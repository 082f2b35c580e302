#include "fais/brigade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fais {

std::vector<int> BrigadeMemory::known_fires() const {
  std::vector<int> out;
  for (std::size_t b = 0; b < buildings.size(); ++b) {
    if (is_fiery(buildings[b].stage)) out.push_back(static_cast<int>(b));
  }
  return out;
}

BrigadeMemory make_brigade_memory(int id, const Scenario& scenario, Position start) {
  BrigadeMemory m;
  m.id = id;
  m.view = GraphView(&scenario.map);
  m.buildings.assign(static_cast<std::size_t>(scenario.map.building_count()), {});
  m.node_seen.assign(static_cast<std::size_t>(scenario.map.node_count()), -1);
  m.self = {start, scenario.params.max_health, scenario.params.tank_capacity};
  return m;
}

namespace {

bool in_range(const CityMap& map, const BrigadeState& self, int building, const SimParams& p) {
  return distance(point_of(map, self.pos), map.building(building).pos) <= p.extinguish_range;
}

// Head for junction `dest`, then optionally step into `enter`.
Proposal head_for(const BrigadeMemory& memory, int dest, std::optional<int> enter) {
  const CityMap& map = memory.view.map();
  const int here = node_of(map, memory.self.pos);
  Proposal p;
  p.destination = dest;
  auto path = shortest_path(memory.view, here, dest);
  if (!path) {
    p.unreachable = true;
    return p;
  }
  if (path->size() == 1) {
    if (enter && memory.self.pos != Position::in_building(*enter)) {
      p.command = Move{*path, enter};
    } else if (!enter && !memory.self.pos.is_node()) {
      p.command = Move{*path, std::nullopt};
    }
    return p;
  }
  p.command = Move{std::move(*path), enter};
  return p;
}

Proposal attack(const BrigadeMemory& memory, int target, const SimParams& params) {
  const CityMap& map = memory.view.map();
  if (in_range(map, memory.self, target, params)) {
    const double amount = std::min(params.max_extinguish, memory.self.water);
    Proposal p;
    if (amount > 0.0) p.command = Extinguish{target, amount};
    return p;
  }
  return head_for(memory, map.building(target).entrance, std::nullopt);
}

// Nearest reachable building out of `candidates` by road distance to its
// entrance; ties toward the lower id.
std::optional<int> nearest_reachable(const BrigadeMemory& memory, const std::vector<int>& candidates) {
  const CityMap& map = memory.view.map();
  const BfsTree tree(memory.view, node_of(map, memory.self.pos));
  std::optional<int> best;
  double best_len = std::numeric_limits<double>::infinity();
  for (int b : candidates) {
    const double len = tree.length(map.building(b).entrance);
    if (len < best_len) {
      best_len = len;
      best = b;
    }
  }
  return best;
}

bool inside_refuge(const BrigadeMemory& memory) {
  return !memory.self.pos.is_node() && memory.view.map().building(memory.self.pos.id).is_refuge;
}

} // namespace

std::pair<Alternatives, BrigadeMemory> heuristic_layer(const Perception& perception,
                                                       std::span<const Message> messages,
                                                       BrigadeMemory memory, int cycle,
                                                       const SimParams& params,
                                                       const BrigadeConfig& config) {
  Alternatives alt;
  const CityMap& map = memory.view.map();
  if (perception.self) memory.self = *perception.self;
  memory.view.set_cycle(cycle);

  // sight: buildings, roads, junctions
  for (const SeenBuilding& sb : perception.buildings) {
    KnownBuilding& kb = memory.buildings.at(static_cast<std::size_t>(sb.id));
    const bool changed = kb.stage != sb.stage && !(kb.stage < 0 && sb.stage == 0);
    kb.stage = sb.stage;
    kb.seen_cycle = cycle;
    if (!changed) continue;
    auto& pending = memory.unreported_fires;
    std::erase_if(pending, [&](const auto& e) { return e.first == sb.id; });
    pending.emplace_back(sb.id, sb.stage);
  }
  for (const SeenRoad& sr : perception.roads) {
    if (sr.blocked && !memory.view.known_blocked(sr.id)) {
      memory.view.mark_blocked(sr.id, true);
      memory.unreported_blocks.push_back(sr.id);
      std::erase(memory.unreported_clears, sr.id);
    } else if (!sr.blocked && memory.view.known_blocked(sr.id)) {
      memory.view.mark_blocked(sr.id, false);
      memory.unreported_clears.push_back(sr.id);
      std::erase(memory.unreported_blocks, sr.id);
    }
  }
  const Vec2 here = point_of(map, memory.self.pos);
  for (const Node& n : map.nodes()) {
    if (distance(here, n.pos) <= params.vision_radius)
      memory.node_seen[static_cast<std::size_t>(n.id)] = cycle;
  }
  memory.node_seen[static_cast<std::size_t>(node_of(map, memory.self.pos))] = cycle;

  // Collision Detection: the last move fell short on a road that is not
  // visibly blocked, so something else is in the way.
  if (memory.last_move && memory.last_move->path.size() > 1) {
    const Path& path = memory.last_move->path;
    const std::size_t reach = std::min(path.size() - 1, static_cast<std::size_t>(params.move_budget));
    const int at = node_of(map, memory.self.pos);
    const auto it = std::find(path.begin(), path.end(), at);
    if (it != path.end()) {
      const auto k = static_cast<std::size_t>(it - path.begin());
      if (k < reach) {
        const int road = map.road_between(path[k], path[k + 1]);
        if (road >= 0 && !memory.view.known_blocked(road)) {
          memory.view = report_blocked(std::move(memory.view), road, cycle, params.reopen_delay);
          alt.blocked_edges.push_back(road);
        }
      }
    }
  }
  memory.last_move.reset();

  // Advice from the station
  for (const Message& m : messages) {
    try {
      if (m.kind == MessageKind::Advice && m.payload.at("brigade").get<int>() == memory.id) {
        const int deadline = m.payload.at("deadline").get<int>();
        if (deadline >= cycle) {
          memory.mission = ActiveMission{m.payload.at("target").get<int>(),
                                         position_from_json(m.payload.at("stand")), deadline};
        }
      } else if (m.kind == MessageKind::TrafficAdvice &&
                 m.payload.at("brigade").get<int>() == memory.id && memory.mission) {
        memory.mission->stand = position_from_json(m.payload.at("stand"));
      }
    } catch (const std::exception&) {
      // malformed advice is ignored
    }
  }
  if (memory.mission) {
    const int stage = memory.buildings.at(static_cast<std::size_t>(memory.mission->target)).stage;
    if (cycle > memory.mission->deadline || stage == 4 || stage == 5) memory.mission.reset();
  }

  // Critical Injury and Water Insufficiency, held until fully restored
  const BrigadeState& self = memory.self;
  if (self.health <= params.critical_health) memory.healing = true;
  if (self.health >= params.max_health) memory.healing = false;
  if (self.water < params.max_extinguish) memory.refilling = true;
  if (self.water >= params.tank_capacity) memory.refilling = false;
  alt.critical_injury = self.health <= params.critical_health || memory.healing;
  alt.water_empty = self.water < params.max_extinguish || memory.refilling;

  if (config.mode == TargetMode::Random) {
    const auto fires = memory.known_fires();
    if (!memory.chosen_fire || !std::binary_search(fires.begin(), fires.end(), *memory.chosen_fire)) {
      memory.chosen_fire.reset();
      if (!fires.empty()) {
        Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(memory.id) * 1000003ULL +
                static_cast<std::uint64_t>(cycle));
        memory.chosen_fire = fires[static_cast<std::size_t>(rng.below(fires.size()))];
      }
    }
  }

  if (cycle - memory.last_feedback_cycle >= params.feedback_interval) {
    alt.feedback_due = true;
    alt.feedback = feedback_payload(memory, params.max_payload_bytes);
    memory.last_feedback_cycle = cycle;
    memory.unreported_fires.clear();
    memory.unreported_blocks.clear();
    memory.unreported_clears.clear();
  }
  return {std::move(alt), std::move(memory)};
}

nlohmann::json feedback_payload(const BrigadeMemory& memory, int max_bytes) {
  std::vector<std::pair<int, int>> fires = memory.unreported_fires;
  std::vector<int> blocks = memory.unreported_blocks;
  std::vector<int> clears = memory.unreported_clears;
  const auto build = [&] {
    nlohmann::json fires_json = nlohmann::json::array();
    for (const auto& [id, stage] : fires) fires_json.push_back({id, stage});
    return nlohmann::json{{"new_fires", fires_json},
                          {"new_blocks", blocks},
                          {"cleared", clears},
                          {"pos", to_json(memory.self.pos)},
                          {"water", std::lround(memory.self.water)},
                          {"health", std::lround(memory.self.health)}};
  };
  nlohmann::json payload = build();
  while (encode_payload(payload).size() > static_cast<std::size_t>(max_bytes)) {
    if (!fires.empty()) {
      fires.erase(fires.begin());
    } else if (!blocks.empty()) {
      blocks.erase(blocks.begin());
    } else if (!clears.empty()) {
      clears.erase(clears.begin());
    } else {
      break;
    }
    payload = build();
  }
  return payload;
}

Proposal wander(const BrigadeMemory& memory) {
  const CityMap& map = memory.view.map();
  const int here = node_of(map, memory.self.pos);
  const BfsTree tree(memory.view, here);
  int best = here;
  int best_seen = std::numeric_limits<int>::max();
  for (int n : tree.reached_nodes()) {
    const int seen = memory.node_seen[static_cast<std::size_t>(n)];
    if (seen < best_seen) {
      best_seen = seen;
      best = n;
    }
  }
  return head_for(memory, best, std::nullopt);
}

Proposal decision_layer(const Alternatives& /*alternatives*/, const BrigadeMemory& memory,
                        const SimParams& params, const BrigadeConfig& config) {
  const CityMap& map = memory.view.map();
  if (memory.mission) {
    const ActiveMission& m = *memory.mission;
    const int stage = memory.buildings.at(static_cast<std::size_t>(m.target)).stage;
    // A brigade sent into a building works from there, not from the road.
    const bool placed = m.stand.is_node() || memory.self.pos == m.stand;
    if (is_fiery(stage) && placed && in_range(map, memory.self, m.target, params))
      return attack(memory, m.target, params);
    const int dest = node_of(map, m.stand);
    const std::optional<int> enter = m.stand.is_node() ? std::nullopt : std::optional<int>(m.stand.id);
    return head_for(memory, dest, enter);
  }

  const std::vector<int> fires = memory.known_fires();
  if (!fires.empty()) {
    if (config.mode == TargetMode::Random && memory.chosen_fire) {
      return attack(memory, *memory.chosen_fire, params);
    }
    std::optional<int> closest;
    double closest_d = std::numeric_limits<double>::infinity();
    for (int b : fires) {
      const double d = distance(point_of(map, memory.self.pos), map.building(b).pos);
      if (d <= params.extinguish_range && d < closest_d) {
        closest_d = d;
        closest = b;
      }
    }
    if (closest) return attack(memory, *closest, params);
    if (auto target = nearest_reachable(memory, fires)) return attack(memory, *target, params);
    Proposal stuck;
    stuck.destination = map.building(fires.front()).entrance;
    stuck.unreachable = true;
    return stuck;
  }
  return wander(memory);
}

Command core_filter(const Proposal& proposal, const Alternatives& alternatives,
                    const BrigadeMemory& memory, const SimParams& /*params*/) {
  const CityMap& map = memory.view.map();
  if (alternatives.critical_injury || alternatives.water_empty) {
    if (inside_refuge(memory)) return Rest{};
    if (auto refuge = nearest_reachable(memory, map.refuges())) {
      return head_for(memory, map.building(*refuge).entrance, *refuge).command;
    }
    // no refuge reachable: treat as trapped
    return wander(memory).command;
  }
  if (proposal.unreachable) return wander(memory).command;
  return proposal.command;
}

FireBrigade::FireBrigade(int id, const Scenario& scenario, Position start, BrigadeConfig config)
    : scenario_(&scenario), config_(config), memory_(make_brigade_memory(id, scenario, start)) {}

FireBrigade::Output FireBrigade::step(const Perception& perception, std::span<const Message> messages,
                                      int cycle) {
  const SimParams& params = scenario_->params;
  if (trace_) trace_->push_back("heuristic");
  auto [alternatives, memory] = heuristic_layer(perception, messages, std::move(memory_), cycle, params, config_);
  memory_ = std::move(memory);
  if (trace_) trace_->push_back("decision");
  const Proposal proposal = decision_layer(alternatives, memory_, params, config_);
  if (trace_) trace_->push_back("core");
  Output out{core_filter(proposal, alternatives, memory_, params), std::nullopt};

  if (const auto* move = std::get_if<Move>(&out.command)) memory_.last_move = *move;
  if (alternatives.feedback) {
    Message m;
    m.sender = memory_.id;
    m.kind = MessageKind::Feedback;
    m.recipient = kStationId;
    m.payload = std::move(*alternatives.feedback);
    out.feedback = std::move(m);
  }
  return out;
}

} // namespace fais
