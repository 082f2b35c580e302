#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace fais {

/// The single Fire Station's agent id; brigades use 0..n-1.
inline constexpr int kStationId = -1;

enum class MessageKind { Feedback, Advice, TrafficAdvice };

const char* to_string(MessageKind kind);
MessageKind message_kind_from_string(const std::string& s);

struct Message {
  int sender = 0;
  MessageKind kind = MessageKind::Feedback;
  // Feedback goes to the station; advice to the brigade named here.
  int recipient = kStationId;
  nlohmann::json payload;
  int send_index = 0; // assigned by the bus on submit
  int cycle = 0;      // submission cycle, assigned by the bus

  bool operator==(const Message&) const = default;
};

nlohmann::json to_json(const Message& m);
Message message_from_json(const nlohmann::json& j);
/// Canonical encoding shared with the replay log.
std::string encode_payload(const nlohmann::json& payload);

enum class SubmitStatus { Accepted, DroppedCap, RejectedOversize };

struct BusConfig {
  int brigade_cap = 4;
  int station_cap = 32;
  int max_payload_bytes = 256;
};

struct BusStats {
  long submitted = 0;
  long accepted = 0;
  long dropped_cap = 0;
  long rejected_oversize = 0;
  long delivered = 0;
};

/// Kernel-mediated, bandwidth-capped channel with one-cycle latency.
/// submit is safe to call concurrently; delivery order is by
/// (sender id, send_index) regardless of arrival interleaving.
class MessageBus {
 public:
  explicit MessageBus(BusConfig config = {}) : config_(config) {}

  SubmitStatus submit(int cycle, Message message);

  /// Messages accepted at cycle - 1 for this agent. Each message is handed
  /// out once; a repeated call returns only what was not yet delivered.
  std::vector<Message> receive(int cycle, int agent);
  /// Every message accepted at `cycle`, in delivery order.
  std::vector<Message> accepted_at(int cycle) const;
  /// Forget messages accepted before `cycle`.
  void discard_before(int cycle);

  int cap_for(int sender) const { return sender == kStationId ? config_.station_cap : config_.brigade_cap; }
  BusStats stats() const;
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  BusConfig config_;
  mutable std::mutex mutex_;
  // cycle -> sender -> submissions so far (send_index counter)
  std::map<int, std::map<int, int>> submitted_;
  std::map<int, std::map<int, int>> accepted_count_;
  struct Entry {
    Message message;
    bool delivered = false;
  };
  std::map<int, std::vector<Entry>> accepted_;
  BusStats stats_;
  std::vector<std::string> diagnostics_;
};

} // namespace fais
