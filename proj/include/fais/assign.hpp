#pragma once

#include <limits>
#include <map>
#include <vector>

#include "fais/simkernel.hpp"

namespace fais {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

using CostMatrix = std::vector<std::vector<double>>; // rows: agents, columns: slots

struct AssignmentResult {
  std::vector<int> slot_of; // per agent row, -1 when unassigned
  double total = 0.0;
  int matched = 0;
};

/// Minimum-cost assignment over finite entries. The number of matched pairs
/// is maximized first, then the total cost minimized; rows whose entries are
/// all infinite stay unassigned. Hungarian method with potentials, O(n²m).
AssignmentResult min_cost_assignment(const CostMatrix& cost);

struct Slot {
  int building;
  int index;
};

/// Degree-limited matching expanded into a plain assignment problem: a
/// building with capacity c contributes c identical slots.
struct AssignmentProblem {
  std::vector<int> agents;
  std::vector<Slot> slots;
  CostMatrix cost;
};

struct Mission {
  int target = 0;
  std::vector<int> brigades;
  int issued = 0;
  int deadline = 0;
  double water_budget = 0.0;
  double value = 0.0;
  // Target was only predicted to ignite when the mission was issued.
  bool predicted = false;

  bool expired(int cycle) const { return cycle > deadline; }
};

struct Advice {
  int brigade;
  int target;
  Position stand;
  int deadline;
  double value;
};

struct TargetCandidate {
  int building;
  double value;
  double predicted_water;
  bool predicted = false;
  int already_assigned = 0; // brigades still on earlier missions to this building
};

/// agent -> building -> road distance in meters (missing means unreachable).
using DistanceTable = std::map<int, std::map<int, double>>;

/// clamp(ceil(water / (max_extinguish * mission_time / 2)), 1, max_slots_per_target)
int slot_capacity(double predicted_water, const SimParams& params);

AssignmentProblem build_problem(const std::vector<TargetCandidate>& targets,
                                const std::map<int, std::vector<int>>& domains,
                                const DistanceTable& distances, const std::vector<int>& free_agents,
                                const SimParams& params);

struct ScheduleResult {
  std::vector<Mission> missions;
  std::vector<Advice> advices;
  std::vector<int> unassigned;
  double total_cost = 0.0;
};

/// Optimal assignment of free brigades to the selected targets; one advice per
/// assigned brigade, standing at the target's entrance.
ScheduleResult schedule_missions(const CityMap& map, const std::vector<TargetCandidate>& targets,
                                 const std::map<int, std::vector<int>>& domains,
                                 const DistanceTable& distances,
                                 const std::vector<int>& free_agents, int cycle,
                                 const SimParams& params);

/// Opening-cycles override: every free agent goes to the single best burning
/// building (ties toward the lower id). Throws std::logic_error when called
/// at or after params.critical_end.
ScheduleResult critical_assign(const CityMap& map, const std::vector<int>& free_agents,
                               const std::map<int, double>& values, int cycle,
                               const SimParams& params);

} // namespace fais
