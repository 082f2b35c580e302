#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fais {

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON Lines replay log: a header line {"header": {...}} carrying the
/// scenario, seed and strategy, then one record per simulated cycle. Keys
/// are emitted in sorted order so the bytes are stable for hashing.
struct ReplayLog {
  nlohmann::json header;
  std::vector<nlohmann::json> records;
};

ReplayLog parse_replay(std::string_view text);
ReplayLog read_replay_file(const std::string& path);
std::string replay_line(const nlohmann::json& record);

/// Burnt ratio after each record, recomputed from stage changes alone.
std::vector<double> replay_scores(const ReplayLog& log);

} // namespace fais
