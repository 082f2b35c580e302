#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fais/assign.hpp"
#include "fais/msgbus.hpp"
#include "fais/pathplan.hpp"
#include "fais/predict.hpp"
#include "fais/simkernel.hpp"

namespace fais {

struct StationConfig {
  bool critical_section = true;
  bool prediction = true;
  bool traffic_control = true;
};

struct BrigadeInfo {
  Position pos;
  double water = 0.0;
  double health = 0.0;
  int report_cycle = -1;
};

struct StationWorldModel {
  FireKnowledge fires;
  GraphView view;
  std::vector<BrigadeInfo> brigades;
  std::vector<Mission> missions;
  std::map<int, Position> stands; // brigade -> stand position of its mission
  std::vector<std::string> diagnostics;
  int cycle = 0;

  bool on_mission(int brigade) const;
  /// The free set J: brigades without a mission that were last known able to
  /// work (health above the critical level, at least one full discharge of
  /// water). Ascending.
  std::vector<int> free_agents() const;
};

/// Fresh model: nothing burning is known, brigades at their spawn junctions.
StationWorldModel make_station_model(const Scenario& scenario, std::span<const int> spawn_nodes);

/// Fixed location the station sees from: the first refuge, else building 0.
Vec2 station_location(const CityMap& map);

/// Merges Feedback (newest report wins), then the station's own sight, then
/// closes missions that expired or whose target is out. Malformed payloads
/// are skipped with a diagnostic.
StationWorldModel aggregate_feedback(StationWorldModel model, std::span<const Message> messages,
                                     const Perception& own, int cycle);

struct StandAssignment {
  int brigade;
  int target;
  Position stand;
  bool redirected = false;
};

struct TrafficResult {
  std::vector<StandAssignment> stands;
  int overflow = 0; // brigades left on a junction beyond the cap
};

/// Stand positions for the brigades of `missions`, in mission order. A
/// junction holds at most stand_cap brigades, counting stands already in
/// `model.stands` for brigades outside `missions`; the rest are sent into
/// distinct unburnt buildings near the target, or stay on the road and are
/// counted as overflow.
TrafficResult traffic_control(const std::vector<Mission>& missions, const StationWorldModel& model,
                              const SimParams& params);

enum class Pipeline { Critical, Scheduled };

struct PlanResult {
  Pipeline pipeline = Pipeline::Scheduled;
  std::vector<Mission> missions;
  std::vector<Advice> advices; // stands already adjusted, highest value first
  int overflow = 0;
  std::vector<int> predicted; // buildings treated as burning on prediction alone
};

/// One planning pass over the model (no side effects). `predictor` may be
/// null, which disables prediction.
PlanResult plan(const StationWorldModel& model, int cycle, const Predictor* predictor,
                const SimParams& params, const StationConfig& config);

class FireStation {
 public:
  FireStation(const Scenario& scenario, std::span<const int> spawn_nodes,
              const Predictor* predictor, StationConfig config = {});

  struct Output {
    std::vector<Message> messages; // at most station_msg_cap
    PlanResult plan;
  };

  /// Aggregate, plan, then hand out advice highest value first; advice past
  /// the cap waits for the next cycle.
  Output step(std::span<const Message> inbox, const Perception& own, int cycle);

  const StationWorldModel& model() const { return model_; }
  int overflow_total() const { return overflow_total_; }

 private:
  const Scenario* scenario_;
  const Predictor* predictor_;
  StationConfig config_;
  StationWorldModel model_;
  struct Pending {
    Message message;
    double value;
  };
  std::vector<Pending> pending_;
  int overflow_total_ = 0;
};

} // namespace fais
