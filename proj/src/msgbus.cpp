#include "fais/msgbus.hpp"

#include <algorithm>
#include <stdexcept>

namespace fais {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Feedback: return "feedback";
    case MessageKind::Advice: return "advice";
    case MessageKind::TrafficAdvice: return "traffic_advice";
  }
  return "unknown";
}

MessageKind message_kind_from_string(const std::string& s) {
  if (s == "feedback") return MessageKind::Feedback;
  if (s == "advice") return MessageKind::Advice;
  if (s == "traffic_advice") return MessageKind::TrafficAdvice;
  throw std::invalid_argument("unknown message kind '" + s + "'");
}

nlohmann::json to_json(const Message& m) {
  return {{"sender", m.sender}, {"kind", to_string(m.kind)}, {"to", m.recipient},
          {"index", m.send_index}, {"cycle", m.cycle},       {"payload", m.payload}};
}

Message message_from_json(const nlohmann::json& j) {
  Message m;
  m.sender = j.at("sender").get<int>();
  m.kind = message_kind_from_string(j.at("kind").get<std::string>());
  m.recipient = j.at("to").get<int>();
  m.send_index = j.at("index").get<int>();
  m.cycle = j.at("cycle").get<int>();
  m.payload = j.at("payload");
  return m;
}

namespace {

bool by_sender(const Message& a, const Message& b) {
  return a.sender != b.sender ? a.sender < b.sender : a.send_index < b.send_index;
}

} // namespace

std::string encode_payload(const nlohmann::json& payload) { return payload.dump(); }

SubmitStatus MessageBus::submit(int cycle, Message message) {
  const std::size_t size = encode_payload(message.payload).size();
  std::lock_guard lock(mutex_);
  ++stats_.submitted;
  message.cycle = cycle;
  message.send_index = submitted_[cycle][message.sender]++;
  if (size > static_cast<std::size_t>(config_.max_payload_bytes)) {
    ++stats_.rejected_oversize;
    diagnostics_.push_back("cycle " + std::to_string(cycle) + ": sender " +
                           std::to_string(message.sender) + " payload of " + std::to_string(size) +
                           " bytes exceeds limit");
    return SubmitStatus::RejectedOversize;
  }
  int& count = accepted_count_[cycle][message.sender];
  if (count >= cap_for(message.sender)) {
    ++stats_.dropped_cap;
    return SubmitStatus::DroppedCap;
  }
  ++count;
  ++stats_.accepted;
  accepted_[cycle].push_back({std::move(message), false});
  return SubmitStatus::Accepted;
}

std::vector<Message> MessageBus::accepted_at(int cycle) const {
  std::lock_guard lock(mutex_);
  std::vector<Message> out;
  if (auto it = accepted_.find(cycle); it != accepted_.end()) {
    for (const Entry& e : it->second) out.push_back(e.message);
  }
  std::sort(out.begin(), out.end(), by_sender);
  return out;
}

std::vector<Message> MessageBus::receive(int cycle, int agent) {
  std::lock_guard lock(mutex_);
  std::vector<Message> out;
  if (auto it = accepted_.find(cycle - 1); it != accepted_.end()) {
    for (Entry& e : it->second) {
      if (e.message.recipient != agent || e.delivered) continue;
      e.delivered = true;
      out.push_back(e.message);
    }
  }
  std::sort(out.begin(), out.end(), by_sender);
  stats_.delivered += static_cast<long>(out.size());
  return out;
}

void MessageBus::discard_before(int cycle) {
  std::lock_guard lock(mutex_);
  std::erase_if(accepted_, [&](const auto& kv) { return kv.first < cycle; });
  std::erase_if(submitted_, [&](const auto& kv) { return kv.first < cycle; });
  std::erase_if(accepted_count_, [&](const auto& kv) { return kv.first < cycle; });
}

BusStats MessageBus::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

} // namespace fais
