#pragma once

#include "json.hpp"

namespace fais {

/// Building Value weights and fire-border geometry knobs.
struct Weights {
  double alpha = 0.001;
  double beta = 1.0;
  double gamma = 0.05;
  double margin = 20.0;  // strip half-width around the bisector ray, m
  double hv_max = 200.0; // cap on HV, m
  bool inward_bisector = true;
  // Sum distances over free agents in the building's domain only.
  bool restrict_to_domain = true;

  bool operator==(const Weights&) const = default;
};

/// Every tunable constant of the simulated world and of the agents.
struct SimParams {
  // kernel
  int deadline = 300;
  double vision_radius = 100.0;
  double extinguish_range = 30.0;
  double max_extinguish = 1000.0; // water per cycle per brigade
  double tank_capacity = 15000.0;
  double refill_rate = 3000.0;
  double heal_rate = 10.0;
  double max_health = 100.0;
  double fire_damage = 5.0;
  double spread_radius = 50.0;
  double spread_power = 10.0;
  double ignition_threshold = 30.0;
  int stage_period = 20;
  double water_per_m2 = 1.0;
  int move_budget = 3;  // edges per cycle
  int jam_limit = 3;    // standing brigades that block entry to a node

  // message bus
  int brigade_msg_cap = 4;
  int station_msg_cap = 32;
  int max_payload_bytes = 256;

  // agents
  double neighbor_radius = 50.0; // r_adj
  int reopen_delay = 20;         // collision-detection suppression, cycles
  int mission_time = 25;
  int critical_end = 30;
  double critical_health = 30.0;
  int feedback_interval = 5;
  int stand_cap = 2; // brigades allowed to stand at one road position
  int max_targets = 8;
  int max_slots_per_target = 5;

  Weights weights;

  bool operator==(const SimParams&) const = default;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

/// Water needed per m² at burning stage 1..3, relative to water_per_m2.
double stage_water_multiplier(int stage);

nlohmann::json to_json(const SimParams& params);
/// Missing keys keep their defaults; unknown keys throw std::invalid_argument.
SimParams params_from_json(const nlohmann::json& j);

} // namespace fais
