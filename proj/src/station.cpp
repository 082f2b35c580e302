#include "fais/station.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fais/valuation.hpp"

namespace fais {

bool StationWorldModel::on_mission(int brigade) const {
  return std::any_of(missions.begin(), missions.end(), [&](const Mission& m) {
    return std::find(m.brigades.begin(), m.brigades.end(), brigade) != m.brigades.end();
  });
}

std::vector<int> StationWorldModel::free_agents() const {
  const SimParams& p = fires.params();
  std::vector<int> out;
  for (int id = 0; id < static_cast<int>(brigades.size()); ++id) {
    const BrigadeInfo& b = brigades[static_cast<std::size_t>(id)];
    if (on_mission(id) || b.health <= p.critical_health || b.water < p.max_extinguish) continue;
    out.push_back(id);
  }
  return out;
}

StationWorldModel make_station_model(const Scenario& scenario, std::span<const int> spawn_nodes) {
  StationWorldModel m;
  m.fires = FireKnowledge(&scenario.map, &scenario.params);
  m.view = GraphView(&scenario.map);
  for (int node : spawn_nodes) {
    m.brigades.push_back(
        {Position::at_node(node), scenario.params.tank_capacity, scenario.params.max_health, -1});
  }
  return m;
}

Vec2 station_location(const CityMap& map) {
  if (!map.refuges().empty()) return map.building(map.refuges().front()).pos;
  return map.building_count() > 0 ? map.building(0).pos : Vec2{};
}

namespace {

struct ParsedFeedback {
  std::vector<std::pair<int, int>> fires;
  std::vector<int> blocks;
  std::vector<int> cleared;
  Position pos;
  double water;
  double health;
};

ParsedFeedback parse_feedback(const nlohmann::json& p, const CityMap& map) {
  ParsedFeedback f;
  for (const auto& e : p.at("new_fires")) {
    const int id = e.at(0).get<int>();
    const int stage = e.at(1).get<int>();
    if (!map.has_building(id) || stage < 0 || stage > 5) throw std::invalid_argument("bad fire entry");
    f.fires.emplace_back(id, stage);
  }
  const auto roads = [&](const char* key, std::vector<int>& out) {
    if (!p.contains(key)) return;
    for (const auto& e : p.at(key)) {
      const int id = e.get<int>();
      if (!map.has_road(id)) throw std::invalid_argument("unknown road");
      out.push_back(id);
    }
  };
  roads("new_blocks", f.blocks);
  roads("cleared", f.cleared);
  f.pos = position_from_json(p.at("pos"));
  if (f.pos.is_node() ? !map.has_node(f.pos.id) : !map.has_building(f.pos.id))
    throw std::invalid_argument("unknown position");
  f.water = p.at("water").get<double>();
  f.health = p.at("health").get<double>();
  return f;
}

double estimated_water(const CityMap& map, const SimParams& params, int b, int stage) {
  return map.building(b).area * params.water_per_m2 * stage_water_multiplier(std::clamp(stage, 1, 3));
}

} // namespace

StationWorldModel aggregate_feedback(StationWorldModel model, std::span<const Message> messages,
                                     const Perception& own, int cycle) {
  const CityMap& map = model.fires.map();
  for (const Message& m : messages) {
    if (m.kind != MessageKind::Feedback) continue;
    if (m.sender < 0 || m.sender >= static_cast<int>(model.brigades.size())) {
      model.diagnostics.push_back("feedback from unknown sender " + std::to_string(m.sender));
      continue;
    }
    ParsedFeedback f;
    try {
      f = parse_feedback(m.payload, map);
    } catch (const std::exception& e) {
      model.diagnostics.push_back("malformed feedback from brigade " + std::to_string(m.sender) +
                                  ": " + e.what());
      continue;
    }
    for (const auto& [id, stage] : f.fires) model.fires.observe(id, stage, m.cycle);
    for (int r : f.blocks) model.view.mark_blocked(r, true);
    for (int r : f.cleared) model.view.mark_blocked(r, false);
    BrigadeInfo& info = model.brigades[static_cast<std::size_t>(m.sender)];
    if (m.cycle >= info.report_cycle) info = {f.pos, f.water, f.health, m.cycle};
  }
  for (const SeenBuilding& b : own.buildings) model.fires.observe(b.id, b.stage, own.cycle);
  for (const SeenRoad& r : own.roads) model.view.mark_blocked(r.id, r.blocked);

  model.cycle = cycle;
  model.view.set_cycle(cycle);
  model.fires.accumulate_heat();

  std::erase_if(model.missions, [&](const Mission& m) {
    const int stage = model.fires.stage(m.target);
    const bool done = m.expired(cycle) || stage == 4 || stage == 5;
    if (done) {
      for (int b : m.brigades) model.stands.erase(b);
    }
    return done;
  });
  return model;
}

TrafficResult traffic_control(const std::vector<Mission>& missions, const StationWorldModel& model,
                              const SimParams& params) {
  const CityMap& map = model.fires.map();
  std::set<int> planned;
  for (const Mission& m : missions) planned.insert(m.brigades.begin(), m.brigades.end());

  std::map<int, int> occupancy;
  std::set<int> taken;
  for (const auto& [brigade, pos] : model.stands) {
    if (planned.count(brigade)) continue;
    if (pos.is_node()) {
      ++occupancy[pos.id];
    } else {
      taken.insert(pos.id);
    }
  }

  std::vector<const Mission*> order;
  for (const Mission& m : missions) order.push_back(&m);
  std::stable_sort(order.begin(), order.end(), [](const Mission* a, const Mission* b) {
    return a->issued != b->issued ? a->issued < b->issued : a->target < b->target;
  });

  const double reach = std::min(params.neighbor_radius, params.extinguish_range);
  TrafficResult out;
  for (const Mission* m : order) {
    const Building& target = map.building(m->target);
    std::vector<int> brigades = m->brigades;
    std::sort(brigades.begin(), brigades.end());
    for (int brigade : brigades) {
      const int node = target.entrance;
      if (occupancy[node] < params.stand_cap) {
        ++occupancy[node];
        out.stands.push_back({brigade, m->target, Position::at_node(node), false});
        continue;
      }
      std::optional<int> best;
      double best_d = 0.0;
      for (int b : map.buildings_within(target.pos, reach)) {
        if (b == m->target || taken.count(b) || model.fires.stage(b) != 0) continue;
        const double d = distance(map.building(b).pos, target.pos);
        if (!best || d < best_d) {
          best = b;
          best_d = d;
        }
      }
      if (best) {
        taken.insert(*best);
        out.stands.push_back({brigade, m->target, Position::in_building(*best), true});
      } else {
        ++occupancy[node];
        ++out.overflow;
        out.stands.push_back({brigade, m->target, Position::at_node(node), false});
      }
    }
  }
  return out;
}

PlanResult plan(const StationWorldModel& model, int cycle, const Predictor* predictor,
                const SimParams& params, const StationConfig& config) {
  PlanResult out;
  const CityMap& map = model.fires.map();
  const bool critical = config.critical_section && cycle < params.critical_end;
  out.pipeline = critical ? Pipeline::Critical : Pipeline::Scheduled;
  const bool predicting = !critical && config.prediction && predictor != nullptr;

  std::vector<int> stages = model.fires.stages();
  std::map<int, double> water;
  if (predicting) {
    for (int b = 0; b < map.building_count(); ++b) {
      const int stage = stages[static_cast<std::size_t>(b)];
      if (stage != 0 && !is_fiery(stage)) continue;
      const FeatureVector f = extract_features(model.fires, b, cycle);
      if (stage == 0) {
        if (predictor->ignition.forward(f) <= 0.5) continue;
        out.predicted.push_back(b);
      }
      water[b] = std::max(0.0, predictor->water.forward(f));
    }
    for (int b : out.predicted) stages[static_cast<std::size_t>(b)] = 1;
  }

  const std::vector<int> free = model.free_agents();
  std::vector<int> candidates;
  for (int b = 0; b < map.building_count(); ++b) {
    if (is_fiery(stages[static_cast<std::size_t>(b)])) candidates.push_back(b);
  }
  if (free.empty() || candidates.empty()) return out;

  std::vector<AgentLocation> locations;
  std::vector<BfsTree> trees;
  for (int a : free) {
    const int node = node_of(map, model.brigades[static_cast<std::size_t>(a)].pos);
    locations.push_back({a, node, &model.view});
    trees.emplace_back(model.view, node);
  }

  const auto domains = agent_domains(locations, candidates);
  const FireBorder border = make_fire_border(map, stages);
  std::map<int, double> values;
  DistanceTable distances;
  for (int b : candidates) {
    // nobody free can get there, so it is nobody's best building
    if (domains.at(b).empty()) continue;
    const Building& bd = map.building(b);
    std::vector<AgentDistance> agents;
    for (std::size_t i = 0; i < free.size(); ++i) {
      const Vec2 from = point_of(map, model.brigades[static_cast<std::size_t>(free[i])].pos);
      const double meters = trees[i].length(bd.entrance);
      agents.push_back({free[i], meters, distance(from, bd.pos)});
      if (std::isfinite(meters)) distances[free[i]][b] = meters;
    }
    values[b] = building_value(map, stages, border, b, agents, params.weights, params.neighbor_radius);
  }

  ScheduleResult scheduled;
  if (critical) {
    scheduled = critical_assign(map, free, values, cycle, params);
  } else {
    // Buildings whose slots are all taken by running missions are not offered again.
    std::map<int, TargetCandidate> open;
    for (const auto& [b, v] : values) {
      const auto w = water.find(b);
      const double need = w != water.end() ? w->second
                                           : estimated_water(map, params, b, stages[static_cast<std::size_t>(b)]);
      const bool guessed = std::binary_search(out.predicted.begin(), out.predicted.end(), b);
      TargetCandidate c{b, v, need, guessed, 0};
      for (const Mission& m : model.missions) {
        if (m.target == b) c.already_assigned += static_cast<int>(m.brigades.size());
      }
      if (slot_capacity(need, params) > c.already_assigned) open.emplace(b, c);
    }
    std::map<int, double> open_values;
    for (const auto& [b, c] : open) open_values[b] = c.value;
    const int k = target_count(static_cast<int>(free.size()), params.max_targets);
    std::vector<TargetCandidate> targets;
    for (int b : select_targets(open_values, k)) targets.push_back(open.at(b));
    scheduled = schedule_missions(map, targets, domains, distances, free, cycle, params);
  }

  out.missions = scheduled.missions;
  out.advices = scheduled.advices;
  if (config.traffic_control) {
    const TrafficResult traffic = traffic_control(out.missions, model, params);
    out.overflow = traffic.overflow;
    for (Advice& a : out.advices) {
      const auto it = std::find_if(traffic.stands.begin(), traffic.stands.end(),
                                   [&](const StandAssignment& s) { return s.brigade == a.brigade; });
      if (it != traffic.stands.end()) a.stand = it->stand;
    }
  }
  std::stable_sort(out.advices.begin(), out.advices.end(), [](const Advice& a, const Advice& b) {
    return a.value != b.value ? a.value > b.value : a.brigade < b.brigade;
  });
  return out;
}

FireStation::FireStation(const Scenario& scenario, std::span<const int> spawn_nodes,
                         const Predictor* predictor, StationConfig config)
    : scenario_(&scenario),
      predictor_(predictor),
      config_(config),
      model_(make_station_model(scenario, spawn_nodes)) {}

FireStation::Output FireStation::step(std::span<const Message> inbox, const Perception& own, int cycle) {
  const SimParams& params = scenario_->params;
  model_ = aggregate_feedback(std::move(model_), inbox, own, cycle);

  const auto mission_of = [&](int brigade) -> const Mission* {
    for (const Mission& m : model_.missions) {
      if (std::find(m.brigades.begin(), m.brigades.end(), brigade) != m.brigades.end()) return &m;
    }
    return nullptr;
  };
  // Deferred advice is only worth sending while its mission stands.
  std::erase_if(pending_, [&](const Pending& p) {
    const Mission* m = mission_of(p.message.recipient);
    if (m == nullptr) return true;
    return p.message.kind == MessageKind::Advice && m->target != p.message.payload.at("target").get<int>();
  });

  // Brigades parked in a building that has since caught fire get a new stand.
  if (config_.traffic_control) {
    for (const Mission& m : model_.missions) {
      for (int brigade : m.brigades) {
        const auto it = model_.stands.find(brigade);
        if (it == model_.stands.end() || it->second.is_node() || model_.fires.stage(it->second.id) == 0)
          continue;
        Mission single = m;
        single.brigades = {brigade};
        const TrafficResult moved = traffic_control({single}, model_, params);
        overflow_total_ += moved.overflow;
        it->second = moved.stands.front().stand;
        Message msg;
        msg.sender = kStationId;
        msg.kind = MessageKind::TrafficAdvice;
        msg.recipient = brigade;
        msg.payload = {{"brigade", brigade}, {"stand", to_json(it->second)}};
        std::erase_if(pending_, [&](const Pending& p) {
          return p.message.recipient == brigade && p.message.kind == MessageKind::TrafficAdvice;
        });
        pending_.push_back({std::move(msg), m.value});
      }
    }
  }

  Output out;
  out.plan = plan(model_, cycle, config_.prediction ? predictor_ : nullptr, params, config_);
  overflow_total_ += out.plan.overflow;
  for (const Mission& m : out.plan.missions) model_.missions.push_back(m);
  for (const Advice& a : out.plan.advices) {
    model_.stands[a.brigade] = a.stand;
    Message msg;
    msg.sender = kStationId;
    msg.kind = MessageKind::Advice;
    msg.recipient = a.brigade;
    msg.payload = {{"brigade", a.brigade},
                   {"target", a.target},
                   {"stand", to_json(a.stand)},
                   {"deadline", a.deadline}};
    pending_.push_back({std::move(msg), a.value});
  }

  std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.message.recipient != b.message.recipient) return a.message.recipient < b.message.recipient;
    return a.message.kind < b.message.kind;
  });
  const std::size_t n = std::min(pending_.size(), static_cast<std::size_t>(params.station_msg_cap));
  for (std::size_t i = 0; i < n; ++i) out.messages.push_back(std::move(pending_[i].message));
  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

} // namespace fais
