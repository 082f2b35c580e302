#include "fais/params.hpp"

#include <stdexcept>
#include <string>

namespace fais {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid params: ") + what);
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

} // namespace

double stage_water_multiplier(int stage) {
  switch (stage) {
    case 1: return 1.0;
    case 2: return 1.5;
    case 3: return 2.0;
    default: return 0.0;
  }
}

void SimParams::validate() const {
  require(deadline > 0, "deadline must be > 0");
  require(vision_radius > 0, "vision_radius must be > 0");
  require(extinguish_range > 0, "extinguish_range must be > 0");
  require(max_extinguish > 0, "max_extinguish must be > 0");
  require(tank_capacity > 0, "tank_capacity must be > 0");
  require(refill_rate > 0, "refill_rate must be > 0");
  require(heal_rate > 0, "heal_rate must be > 0");
  require(max_health > 0, "max_health must be > 0");
  require(fire_damage > 0, "fire_damage must be > 0");
  require(spread_radius > 0, "spread_radius must be > 0");
  require(spread_power > 0, "spread_power must be > 0");
  require(ignition_threshold > spread_power, "ignition_threshold must exceed spread_power");
  require(stage_period > 0, "stage_period must be > 0");
  require(water_per_m2 > 0, "water_per_m2 must be > 0");
  require(move_budget > 0, "move_budget must be > 0");
  require(jam_limit > 0, "jam_limit must be > 0");
  require(brigade_msg_cap > 0, "brigade_msg_cap must be > 0");
  require(station_msg_cap > 0, "station_msg_cap must be > 0");
  require(max_payload_bytes > 0, "max_payload_bytes must be > 0");
  require(neighbor_radius > 0, "neighbor_radius must be > 0");
  require(reopen_delay > 0, "reopen_delay must be > 0");
  require(mission_time > 0, "mission_time must be > 0");
  require(critical_end >= 0, "critical_end must be >= 0");
  require(critical_health > 0 && critical_health < max_health,
          "critical_health must lie in (0, max_health)");
  require(feedback_interval > 0, "feedback_interval must be > 0");
  require(stand_cap > 0, "stand_cap must be > 0");
  require(max_targets > 0, "max_targets must be > 0");
  require(max_slots_per_target > 0, "max_slots_per_target must be > 0");
  require(weights.alpha >= 0 && weights.beta >= 0 && weights.gamma >= 0,
          "weights must be non-negative");
  require(weights.margin > 0, "margin must be > 0");
  require(weights.hv_max > 0, "hv_max must be > 0");
}

nlohmann::json to_json(const SimParams& p) {
  nlohmann::json w = {
      {"alpha", p.weights.alpha},
      {"beta", p.weights.beta},
      {"gamma", p.weights.gamma},
      {"margin", p.weights.margin},
      {"hv_max", p.weights.hv_max},
      {"inward_bisector", p.weights.inward_bisector},
      {"restrict_to_domain", p.weights.restrict_to_domain},
  };
  return {
      {"deadline", p.deadline},
      {"vision_radius", p.vision_radius},
      {"extinguish_range", p.extinguish_range},
      {"max_extinguish", p.max_extinguish},
      {"tank_capacity", p.tank_capacity},
      {"refill_rate", p.refill_rate},
      {"heal_rate", p.heal_rate},
      {"max_health", p.max_health},
      {"fire_damage", p.fire_damage},
      {"spread_radius", p.spread_radius},
      {"spread_power", p.spread_power},
      {"ignition_threshold", p.ignition_threshold},
      {"stage_period", p.stage_period},
      {"water_per_m2", p.water_per_m2},
      {"move_budget", p.move_budget},
      {"jam_limit", p.jam_limit},
      {"brigade_msg_cap", p.brigade_msg_cap},
      {"station_msg_cap", p.station_msg_cap},
      {"max_payload_bytes", p.max_payload_bytes},
      {"neighbor_radius", p.neighbor_radius},
      {"reopen_delay", p.reopen_delay},
      {"mission_time", p.mission_time},
      {"critical_end", p.critical_end},
      {"critical_health", p.critical_health},
      {"feedback_interval", p.feedback_interval},
      {"stand_cap", p.stand_cap},
      {"max_targets", p.max_targets},
      {"max_slots_per_target", p.max_slots_per_target},
      {"weights", w},
  };
}

SimParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("params must be an object");
  const nlohmann::json defaults = to_json(SimParams{});
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw std::invalid_argument("unknown params key '" + key + "'");
  }
  SimParams p;
  read(j, "deadline", p.deadline);
  read(j, "vision_radius", p.vision_radius);
  read(j, "extinguish_range", p.extinguish_range);
  read(j, "max_extinguish", p.max_extinguish);
  read(j, "tank_capacity", p.tank_capacity);
  read(j, "refill_rate", p.refill_rate);
  read(j, "heal_rate", p.heal_rate);
  read(j, "max_health", p.max_health);
  read(j, "fire_damage", p.fire_damage);
  read(j, "spread_radius", p.spread_radius);
  read(j, "spread_power", p.spread_power);
  read(j, "ignition_threshold", p.ignition_threshold);
  read(j, "stage_period", p.stage_period);
  read(j, "water_per_m2", p.water_per_m2);
  read(j, "move_budget", p.move_budget);
  read(j, "jam_limit", p.jam_limit);
  read(j, "brigade_msg_cap", p.brigade_msg_cap);
  read(j, "station_msg_cap", p.station_msg_cap);
  read(j, "max_payload_bytes", p.max_payload_bytes);
  read(j, "neighbor_radius", p.neighbor_radius);
  read(j, "reopen_delay", p.reopen_delay);
  read(j, "mission_time", p.mission_time);
  read(j, "critical_end", p.critical_end);
  read(j, "critical_health", p.critical_health);
  read(j, "feedback_interval", p.feedback_interval);
  read(j, "stand_cap", p.stand_cap);
  read(j, "max_targets", p.max_targets);
  read(j, "max_slots_per_target", p.max_slots_per_target);
  if (auto it = j.find("weights"); it != j.end()) {
    const auto& w = *it;
    if (!w.is_object()) throw std::invalid_argument("weights must be an object");
    for (const auto& [key, value] : w.items()) {
      if (!defaults["weights"].contains(key))
        throw std::invalid_argument("unknown weights key '" + key + "'");
    }
    read(w, "alpha", p.weights.alpha);
    read(w, "beta", p.weights.beta);
    read(w, "gamma", p.weights.gamma);
    read(w, "margin", p.weights.margin);
    read(w, "hv_max", p.weights.hv_max);
    read(w, "inward_bisector", p.weights.inward_bisector);
    read(w, "restrict_to_domain", p.weights.restrict_to_domain);
  }
  p.validate();
  return p;
}

} // namespace fais
