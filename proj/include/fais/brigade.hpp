#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fais/msgbus.hpp"
#include "fais/pathplan.hpp"
#include "fais/rng.hpp"
#include "fais/simkernel.hpp"

namespace fais {

enum class TargetMode { Nearest, Random };

struct BrigadeConfig {
  TargetMode mode = TargetMode::Nearest;
  std::uint64_t seed = 0; // Random mode only
};

struct KnownBuilding {
  int stage = -1; // -1: never seen
  int seen_cycle = -1;
};

struct ActiveMission {
  int target = 0;
  Position stand;
  int deadline = 0;
};

/// The brigade's own model of the world.
struct BrigadeMemory {
  int id = 0;
  GraphView view;
  std::vector<KnownBuilding> buildings;
  std::optional<ActiveMission> mission;
  int last_feedback_cycle = 0;
  std::vector<int> node_seen; // cycle a junction was last within sight, -1 never
  BrigadeState self;
  bool refilling = false;
  bool healing = false;
  std::optional<Move> last_move;
  std::optional<int> chosen_fire; // Random mode target

  // discoveries not yet reported, oldest first
  std::vector<std::pair<int, int>> unreported_fires;
  std::vector<int> unreported_blocks;
  std::vector<int> unreported_clears;

  std::vector<int> known_fires() const;
};

BrigadeMemory make_brigade_memory(int id, const Scenario& scenario, Position start);

struct Alternatives {
  bool critical_injury = false;
  bool water_empty = false;
  std::vector<int> blocked_edges; // newly suppressed by Collision Detection
  bool feedback_due = false;
  std::optional<nlohmann::json> feedback;
};

struct Proposal {
  Command command = Rest{};
  std::optional<int> destination; // junction the proposal heads for
  bool unreachable = false;
};

/// Sensing and reactive heuristics: memory update from perception and
/// advice, Collision Detection, mission timeout, Critical Injury, Water
/// Insufficiency and the Feedback schedule.
std::pair<Alternatives, BrigadeMemory> heuristic_layer(const Perception& perception,
                                                       std::span<const Message> messages,
                                                       BrigadeMemory memory, int cycle,
                                                       const SimParams& params,
                                                       const BrigadeConfig& config = {});

/// Ordered Based Behavior (follow the station's advice), otherwise attack a
/// known fire, otherwise Wander Mode.
Proposal decision_layer(const Alternatives& alternatives, const BrigadeMemory& memory,
                        const SimParams& params, const BrigadeConfig& config = {});

/// Rule filter, first match wins: critical injury -> refuge; water empty ->
/// refuge; trapped -> wander within the reachable component; else pass.
Command core_filter(const Proposal& proposal, const Alternatives& alternatives,
                    const BrigadeMemory& memory, const SimParams& params);

/// Least-recently-seen reachable junction (ties toward the lower id).
Proposal wander(const BrigadeMemory& memory);

/// Feedback payload {new_fires, new_blocks, cleared, pos, water, health},
/// trimmed oldest-first to fit max_bytes.
nlohmann::json feedback_payload(const BrigadeMemory& memory, int max_bytes);

class FireBrigade {
 public:
  FireBrigade(int id, const Scenario& scenario, Position start, BrigadeConfig config = {});

  struct Output {
    Command command;
    std::optional<Message> feedback;
  };

  Output step(const Perception& perception, std::span<const Message> messages, int cycle);

  const BrigadeMemory& memory() const { return memory_; }
  /// Records the name of each layer as it runs.
  void set_trace(std::vector<std::string>* trace) { trace_ = trace; }

 private:
  const Scenario* scenario_;
  BrigadeConfig config_;
  BrigadeMemory memory_;
  std::vector<std::string>* trace_ = nullptr;
};

} // namespace fais
