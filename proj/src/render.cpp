#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fais/harness.hpp"

namespace fais {

namespace {

const char* stage_color(int stage) {
  static const char* colors[] = {"white", "yellow", "orange", "red", "blue", "black"};
  return stage >= 0 && stage <= 5 ? colors[stage] : "gray";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

struct Frame {
  std::vector<int> stages;
  std::vector<char> blocked;
  std::vector<nlohmann::json> brigades; // [kind, id, health, water]
  nlohmann::json missions = nlohmann::json::array();
};

// State at the start of `cycle`: every record before it has been applied.
Frame frame_at(const ReplayLog& log, const CityMap& map, const nlohmann::json& spawns,
               const std::vector<int>& ignitions, int cycle) {
  Frame f;
  f.stages.assign(static_cast<std::size_t>(map.building_count()), 0);
  for (int b : ignitions) f.stages.at(static_cast<std::size_t>(b)) = 1;
  for (const Road& r : map.roads()) f.blocked.push_back(r.initially_blocked ? 1 : 0);
  for (const auto& n : spawns) f.brigades.push_back({0, n.get<int>(), 0, 0});
  for (const auto& r : log.records) {
    const int c = r.at("cycle").get<int>();
    if (c == cycle) {
      f.missions = r.value("missions", nlohmann::json::array());
      break;
    }
    for (const auto& ch : r.at("stage_changes")) f.stages.at(ch.at(0).get<std::size_t>()) = ch.at(2).get<int>();
    for (const auto& road : r.value("opened_roads", nlohmann::json::array()))
      f.blocked.at(road.get<std::size_t>()) = 0;
    if (r.contains("brigades")) f.brigades.assign(r["brigades"].begin(), r["brigades"].end());
  }
  return f;
}

} // namespace

std::string render_frame(const ReplayLog& log, int cycle) {
  Scenario scenario;
  try {
    scenario = scenario_from_json(log.header.at("scenario"), false);
  } catch (const std::exception& e) {
    throw ReplayError(std::string("replay header: ") + e.what());
  }
  const CityMap& map = scenario.map;
  const nlohmann::json spawns = log.header.value("spawns", nlohmann::json(scenario.brigade_spawns));
  Frame f;
  try {
    f = frame_at(log, map, spawns, scenario.ignitions, cycle);
  } catch (const std::exception& e) {
    throw ReplayError(std::string("malformed replay record: ") + e.what());
  }

  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  const auto extend = [&](Vec2 p) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  };
  for (const Node& n : map.nodes()) extend(n.pos);
  for (const Building& b : map.buildings()) extend(b.pos);
  if (!std::isfinite(lo_x)) lo_x = lo_y = hi_x = hi_y = 0.0;
  const double pad = 20.0;
  // flip y so north is up
  const auto sx = [&](double x) { return num(x - lo_x + pad); };
  const auto sy = [&](double y) { return num(hi_y - y + pad); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(hi_x - lo_x + 2 * pad)
      << "\" height=\"" << num(hi_y - lo_y + 2 * pad) << "\">\n";
  svg << "<title>cycle " << cycle << "</title>\n";
  for (const Road& r : map.roads()) {
    const Vec2 a = map.node(r.a).pos, b = map.node(r.b).pos;
    svg << "<line class=\"road\" data-road=\"" << r.id << "\" x1=\"" << sx(a.x) << "\" y1=\"" << sy(a.y)
        << "\" x2=\"" << sx(b.x) << "\" y2=\"" << sy(b.y) << "\" stroke=\"gray\"";
    if (f.blocked[static_cast<std::size_t>(r.id)]) svg << " stroke-dasharray=\"4,3\"";
    svg << "/>\n";
  }
  for (const Building& b : map.buildings()) {
    const double side = std::sqrt(b.area) / 2.0;
    const int stage = f.stages[static_cast<std::size_t>(b.id)];
    svg << "<rect class=\"building\" data-building=\"" << b.id << "\" data-stage=\"" << stage << "\" x=\""
        << sx(b.pos.x - side / 2) << "\" y=\"" << sy(b.pos.y + side / 2) << "\" width=\"" << num(side)
        << "\" height=\"" << num(side) << "\" fill=\"" << stage_color(stage) << "\" stroke=\""
        << (b.is_refuge ? "green" : "black") << "\"/>\n";
  }
  const auto brigade_point = [&](const nlohmann::json& b) {
    const Position p = position_from_json({b.at(0), b.at(1)});
    return point_of(map, p);
  };
  for (const auto& m : f.missions) {
    const Vec2 t = map.building(m.at(0).get<int>()).pos;
    for (const auto& id : m.at(1)) {
      const auto k = id.get<std::size_t>();
      if (k >= f.brigades.size()) continue;
      const Vec2 p = brigade_point(f.brigades[k]);
      svg << "<line class=\"mission\" x1=\"" << sx(p.x) << "\" y1=\"" << sy(p.y) << "\" x2=\"" << sx(t.x)
          << "\" y2=\"" << sy(t.y) << "\" stroke=\"purple\" stroke-width=\"0.8\"/>\n";
    }
  }
  for (std::size_t i = 0; i < f.brigades.size(); ++i) {
    const Vec2 p = brigade_point(f.brigades[i]);
    svg << "<circle class=\"brigade\" data-brigade=\"" << i << "\" cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
        << "\" r=\"4\" fill=\"steelblue\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

int render(const ReplayLog& log, const std::string& out_dir, int every) {
  if (every <= 0) throw std::invalid_argument("frame interval must be positive");
  const int cycles = static_cast<int>(log.records.size());
  std::filesystem::create_directories(out_dir);
  int frames = 0;
  for (int c = 0; c < std::max(cycles, 1); c += every) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05d.svg", c);
    std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write frame in '" + out_dir + "'");
    out << render_frame(log, c);
    ++frames;
  }
  return frames;
}

} // namespace fais
