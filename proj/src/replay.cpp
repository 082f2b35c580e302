#include "fais/replay.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fais {

ReplayLog parse_replay(std::string_view text) {
  ReplayLog log;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ReplayError("replay line " + std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1) {
      if (!j.is_object() || !j.contains("header"))
        throw ReplayError("replay line 1: missing header record");
      log.header = j["header"];
      continue;
    }
    if (!j.is_object() || !j.contains("cycle") || !j["cycle"].is_number_integer())
      throw ReplayError("replay line " + std::to_string(line_no) + ": record without cycle");
    log.records.push_back(std::move(j));
  }
  if (log.header.is_null()) throw ReplayError("empty replay log");
  return log;
}

ReplayLog read_replay_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReplayError("cannot open replay log '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_replay(ss.str());
}

std::string replay_line(const nlohmann::json& record) { return record.dump() + "\n"; }

std::vector<double> replay_scores(const ReplayLog& log) {
  const auto& scenario = log.header.at("scenario");
  const std::size_t n = scenario.at("buildings").size();
  std::vector<int> max_stage(n, 0);
  for (const auto& b : scenario.at("ignitions")) max_stage.at(b.get<std::size_t>()) = 1;
  std::vector<double> out;
  for (const auto& r : log.records) {
    for (const auto& change : r.at("stage_changes")) {
      const auto b = change.at(0).get<std::size_t>();
      const int to = change.at(2).get<int>();
      if (to >= 1 && to <= 3) max_stage.at(b) = std::max(max_stage.at(b), to);
    }
    double sum = 0.0;
    for (int s : max_stage) sum += s / 3.0;
    out.push_back(n == 0 ? 0.0 : sum / static_cast<double>(n));
  }
  return out;
}

} // namespace fais
