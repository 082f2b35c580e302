#include "fais/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "fais/rng.hpp"

namespace fais {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }
double distance(Vec2 a, Vec2 b) { return norm(b - a); }

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

CityMap::CityMap(std::vector<Node> nodes, std::vector<Road> roads,
                 std::vector<Building> buildings, std::vector<int> refuges)
    : nodes_(std::move(nodes)),
      roads_(std::move(roads)),
      buildings_(std::move(buildings)),
      refuges_(std::move(refuges)) {
  build_index();
}

void CityMap::build_index() {
  adjacency_.assign(nodes_.size(), {});
  for (const Road& r : roads_) {
    adjacency_.at(static_cast<std::size_t>(r.a)).push_back({r.b, r.id});
    adjacency_.at(static_cast<std::size_t>(r.b)).push_back({r.a, r.id});
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end(), [](const Adjacent& l, const Adjacent& r) {
      return l.node != r.node ? l.node < r.node : l.road < r.road;
    });
  }

  cells_.clear();
  grid_w_ = grid_h_ = 0;
  if (buildings_.empty()) return;
  double min_x = buildings_[0].pos.x, max_x = min_x;
  double min_y = buildings_[0].pos.y, max_y = min_y;
  for (const Building& b : buildings_) {
    min_x = std::min(min_x, b.pos.x);
    max_x = std::max(max_x, b.pos.x);
    min_y = std::min(min_y, b.pos.y);
    max_y = std::max(max_y, b.pos.y);
  }
  origin_ = {min_x, min_y};
  grid_w_ = static_cast<int>((max_x - min_x) / cell_) + 1;
  grid_h_ = static_cast<int>((max_y - min_y) / cell_) + 1;
  cells_.assign(static_cast<std::size_t>(grid_w_) * static_cast<std::size_t>(grid_h_), {});
  for (const Building& b : buildings_) {
    const int cx = static_cast<int>((b.pos.x - origin_.x) / cell_);
    const int cy = static_cast<int>((b.pos.y - origin_.y) / cell_);
    cells_[static_cast<std::size_t>(cy) * static_cast<std::size_t>(grid_w_) +
           static_cast<std::size_t>(cx)]
        .push_back(b.id);
  }
}

std::span<const Adjacent> CityMap::adjacent(int node) const {
  return adjacency_.at(static_cast<std::size_t>(node));
}

int CityMap::road_between(int a, int b) const {
  if (!has_node(a) || !has_node(b)) return -1;
  int best = -1;
  for (const Adjacent& adj : adjacent(a)) {
    if (adj.node == b && (best < 0 || adj.road < best)) best = adj.road;
  }
  return best;
}

std::vector<int> CityMap::buildings_within(Vec2 p, double r) const {
  std::vector<int> out;
  if (cells_.empty() || r < 0) return out;
  const auto clamp_cell = [](double v, int hi) {
    return static_cast<int>(std::clamp(std::floor(v), 0.0, static_cast<double>(hi - 1)));
  };
  const int x0 = clamp_cell((p.x - r - origin_.x) / cell_, grid_w_);
  const int x1 = clamp_cell((p.x + r - origin_.x) / cell_, grid_w_);
  const int y0 = clamp_cell((p.y - r - origin_.y) / cell_, grid_h_);
  const int y1 = clamp_cell((p.y + r - origin_.y) / cell_, grid_h_);
  for (int cy = y0; cy <= y1; ++cy) {
    for (int cx = x0; cx <= x1; ++cx) {
      for (int id : cells_[static_cast<std::size_t>(cy) * static_cast<std::size_t>(grid_w_) +
                           static_cast<std::size_t>(cx)]) {
        if (distance(p, buildings_[static_cast<std::size_t>(id)].pos) <= r) out.push_back(id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int unfired_neighbors(const CityMap& map, std::span<const int> stages, int b, double r_adj) {
  if (!map.has_building(b)) throw std::out_of_range("unknown building id " + std::to_string(b));
  int count = 0;
  for (int other : map.buildings_within(map.building(b).pos, r_adj)) {
    if (other != b && stages[static_cast<std::size_t>(other)] == 0) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ScenarioError(what); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) fail(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end())
      fail(where + ": unknown key '" + key + "'");
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) fail(where + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where + "." + key + ": not finite");
  return d;
}

int id_value(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0 ||
      v.get<long long>() > std::numeric_limits<int>::max())
    fail(where + ": expected a non-negative integer id");
  return v.get<int>();
}

bool flag(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (!it->is_boolean()) fail(where + "." + key + ": expected a boolean");
  return it->get<bool>();
}

const json& array_field(const json& root, const char* key, bool required) {
  static const json empty = json::array();
  auto it = root.find(key);
  if (it == root.end()) {
    if (required) fail(std::string("missing top-level key '") + key + "'");
    return empty;
  }
  if (!it->is_array()) fail(std::string(key) + ": expected an array");
  return *it;
}

int nearest_node(const std::vector<Node>& nodes, Vec2 p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Node& n : nodes) {
    const double d = distance(p, n.pos);
    if (d < best_d) {
      best_d = d;
      best = n.id;
    }
  }
  return best;
}

template <class T>
void sort_dense(std::vector<T>& items, const char* what) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id != static_cast<int>(i))
      fail(std::string(what) + " ids must be unique and dense from 0 (missing or duplicate id " +
           std::to_string(i) + ")");
  }
}

} // namespace

Scenario scenario_from_json(const json& root, bool require_ignitions) {
  check_keys(root,
             {"nodes", "roads", "buildings", "refuges", "ignitions", "brigade_spawns",
              "road_open_schedule", "params"},
             "scenario");

  std::vector<Node> nodes;
  const json& jnodes = array_field(root, "nodes", true);
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    check_keys(jnodes[i], {"id", "x", "y"}, where);
    nodes.push_back({id_value(field(jnodes[i], "id", where), where + ".id"),
                     {number(jnodes[i], "x", where), number(jnodes[i], "y", where)}});
  }
  sort_dense(nodes, "node");

  std::vector<Road> roads;
  const json& jroads = array_field(root, "roads", true);
  for (std::size_t i = 0; i < jroads.size(); ++i) {
    const std::string where = "roads[" + std::to_string(i) + "]";
    const json& r = jroads[i];
    check_keys(r, {"id", "a", "b", "length", "blocked"}, where);
    Road road;
    road.id = id_value(field(r, "id", where), where + ".id");
    road.a = id_value(field(r, "a", where), where + ".a");
    road.b = id_value(field(r, "b", where), where + ".b");
    if (road.a >= static_cast<int>(nodes.size()) || road.b >= static_cast<int>(nodes.size()))
      fail(where + ": unknown node id");
    if (road.a == road.b) fail(where + ": road endpoints must be distinct nodes");
    const double euclid = distance(nodes[static_cast<std::size_t>(road.a)].pos,
                                   nodes[static_cast<std::size_t>(road.b)].pos);
    road.length = r.contains("length") ? number(r, "length", where) : euclid;
    if (!(road.length > 0)) fail(where + ": road length must be > 0");
    if (std::abs(road.length - euclid) > 1e-3 * euclid)
      fail(where + ": road length deviates from node distance by more than 0.1%");
    road.initially_blocked = flag(r, "blocked", where);
    roads.push_back(road);
  }
  sort_dense(roads, "road");

  std::vector<Building> buildings;
  const json& jbuild = array_field(root, "buildings", true);
  for (std::size_t i = 0; i < jbuild.size(); ++i) {
    const std::string where = "buildings[" + std::to_string(i) + "]";
    const json& b = jbuild[i];
    check_keys(b, {"id", "x", "y", "area", "broken", "entrance"}, where);
    Building bd;
    bd.id = id_value(field(b, "id", where), where + ".id");
    bd.pos = {number(b, "x", where), number(b, "y", where)};
    bd.area = number(b, "area", where);
    if (!(bd.area > 0)) fail(where + ": area must be > 0");
    bd.broken = flag(b, "broken", where);
    if (b.contains("entrance")) {
      bd.entrance = id_value(b["entrance"], where + ".entrance");
      if (bd.entrance >= static_cast<int>(nodes.size())) fail(where + ": unknown entrance node");
    } else {
      if (nodes.empty()) fail(where + ": no node available as entrance");
      bd.entrance = nearest_node(nodes, bd.pos);
    }
    buildings.push_back(bd);
  }
  sort_dense(buildings, "building");

  std::vector<int> refuges;
  for (const json& v : array_field(root, "refuges", false)) {
    const int id = id_value(v, "refuges");
    if (id >= static_cast<int>(buildings.size())) fail("unknown refuge id " + std::to_string(id));
    refuges.push_back(id);
  }
  std::sort(refuges.begin(), refuges.end());
  if (std::adjacent_find(refuges.begin(), refuges.end()) != refuges.end())
    fail("duplicate refuge id");
  for (int id : refuges) buildings[static_cast<std::size_t>(id)].is_refuge = true;

  Scenario s;
  for (const json& v : array_field(root, "ignitions", true)) {
    const int id = id_value(v, "ignitions");
    if (id >= static_cast<int>(buildings.size()))
      fail("unknown ignition building id " + std::to_string(id));
    s.ignitions.push_back(id);
  }
  std::sort(s.ignitions.begin(), s.ignitions.end());
  s.ignitions.erase(std::unique(s.ignitions.begin(), s.ignitions.end()), s.ignitions.end());
  if (require_ignitions && s.ignitions.empty()) fail("ignitions must be non-empty");

  for (const json& v : array_field(root, "brigade_spawns", false)) {
    const int id = id_value(v, "brigade_spawns");
    if (id >= static_cast<int>(nodes.size()))
      fail("unknown brigade spawn node " + std::to_string(id));
    s.brigade_spawns.push_back(id);
  }

  if (root.contains("params")) {
    try {
      s.params = params_from_json(root["params"]);
    } catch (const std::invalid_argument& e) {
      fail(std::string("params: ") + e.what());
    } catch (const json::exception& e) {
      fail(std::string("params: ") + e.what());
    }
  }

  const json& sched = array_field(root, "road_open_schedule", false);
  for (std::size_t i = 0; i < sched.size(); ++i) {
    const std::string where = "road_open_schedule[" + std::to_string(i) + "]";
    const json& e = sched[i];
    if (!e.is_array() || e.size() != 2) fail(where + ": expected [cycle, road]");
    ScheduledOpening op{id_value(e[0], where + "[0]"), id_value(e[1], where + "[1]")};
    if (op.cycle <= 0 || op.cycle > s.params.deadline)
      fail(where + ": cycle must lie in [1, deadline]");
    if (op.road >= static_cast<int>(roads.size())) fail(where + ": unknown road id");
    s.road_open_schedule.push_back(op);
  }
  std::sort(s.road_open_schedule.begin(), s.road_open_schedule.end(),
            [](const ScheduledOpening& a, const ScheduledOpening& b) {
              return a.cycle != b.cycle ? a.cycle < b.cycle : a.road < b.road;
            });

  s.map = CityMap(std::move(nodes), std::move(roads), std::move(buildings), std::move(refuges));
  return s;
}

Scenario load_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("parse error: ") + e.what());
  }
  try {
    return scenario_from_json(root);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("invalid scenario: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

json scenario_to_json(const Scenario& s) {
  json nodes = json::array();
  for (const Node& n : s.map.nodes()) nodes.push_back({{"id", n.id}, {"x", n.pos.x}, {"y", n.pos.y}});
  json roads = json::array();
  for (const Road& r : s.map.roads()) {
    roads.push_back({{"id", r.id}, {"a", r.a}, {"b", r.b}, {"length", r.length},
                     {"blocked", r.initially_blocked}});
  }
  json buildings = json::array();
  for (const Building& b : s.map.buildings()) {
    buildings.push_back({{"id", b.id}, {"x", b.pos.x}, {"y", b.pos.y}, {"area", b.area},
                         {"broken", b.broken}, {"entrance", b.entrance}});
  }
  json sched = json::array();
  for (const auto& op : s.road_open_schedule) sched.push_back({op.cycle, op.road});
  return {
      {"nodes", nodes},
      {"roads", roads},
      {"buildings", buildings},
      {"refuges", s.map.refuges()},
      {"ignitions", s.ignitions},
      {"brigade_spawns", s.brigade_spawns},
      {"road_open_schedule", sched},
      {"params", to_json(s.params)},
  };
}

std::string save_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Generation

Scenario generate_city(std::uint64_t seed, int n_buildings, double density,
                       CityOptions options) {
  const int n = std::clamp(n_buildings, 2, 20000);
  density = std::clamp(density, 50.0, 5000.0);
  Rng rng(seed);

  // Roughly three buildings cluster around each junction.
  const int junctions = std::max(2, (n + 2) / 3);
  const int gx = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(junctions)))));
  const int gy = std::max(1, (junctions + gx - 1) / gx);
  const double area_m2 = static_cast<double>(n) / density * 1e6;
  const double spacing = std::sqrt(area_m2 / static_cast<double>(gx * gy));

  std::vector<Node> nodes;
  for (int j = 0; j < gy; ++j) {
    for (int i = 0; i < gx; ++i) {
      const double jx = rng.uniform(-0.15, 0.15) * spacing;
      const double jy = rng.uniform(-0.15, 0.15) * spacing;
      nodes.push_back({static_cast<int>(nodes.size()), {i * spacing + jx, j * spacing + jy}});
    }
  }
  std::vector<Road> roads;
  const auto link = [&](int a, int b) {
    const double len = distance(nodes[static_cast<std::size_t>(a)].pos,
                                nodes[static_cast<std::size_t>(b)].pos);
    roads.push_back({static_cast<int>(roads.size()), a, b, len, false});
  };
  for (int j = 0; j < gy; ++j) {
    for (int i = 0; i < gx; ++i) {
      const int id = j * gx + i;
      if (i + 1 < gx) link(id, id + 1);
      if (j + 1 < gy) link(id, id + gx);
    }
  }
  std::vector<int> road_order(roads.size());
  for (std::size_t i = 0; i < road_order.size(); ++i) road_order[i] = static_cast<int>(i);
  rng.shuffle(road_order);
  const auto n_blocked = static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(roads.size())));
  for (std::size_t i = 0; i < n_blocked; ++i)
    roads[static_cast<std::size_t>(road_order[i])].initially_blocked = true;

  std::vector<int> anchors(nodes.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) anchors[i] = static_cast<int>(i);
  rng.shuffle(anchors);
  const double max_offset = std::min(20.0, 0.3 * spacing);
  const double lo_area = std::max(1.0, std::min(options.min_area, options.max_area));
  const double hi_area = std::max(lo_area, options.max_area);
  std::vector<Building> buildings;
  for (int b = 0; b < n; ++b) {
    const Node& anchor = nodes[static_cast<std::size_t>(anchors[static_cast<std::size_t>(b) % anchors.size()])];
    const double r = rng.uniform(0.5 * max_offset, max_offset);
    const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    Building bd;
    bd.id = b;
    bd.pos = {anchor.pos.x + r * std::cos(theta), anchor.pos.y + r * std::sin(theta)};
    bd.area = std::round(rng.uniform(lo_area, hi_area));
    bd.broken = rng.uniform() < 0.2;
    bd.entrance = nearest_node(nodes, bd.pos);
    buildings.push_back(bd);
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  const int n_refuges = std::clamp(n / 16, 1, n - 1);
  std::vector<int> refuges(order.begin(), order.begin() + n_refuges);
  std::sort(refuges.begin(), refuges.end());
  for (int id : refuges) buildings[static_cast<std::size_t>(id)].is_refuge = true;

  Scenario s;
  const int n_ign = options.ignitions > 0 ? std::min(options.ignitions, n - n_refuges)
                                          : std::clamp(n / 60, 1, 10);
  s.ignitions.assign(order.begin() + n_refuges, order.begin() + n_refuges + n_ign);
  std::sort(s.ignitions.begin(), s.ignitions.end());

  const int n_brigades = options.brigades >= 0 ? options.brigades : std::clamp(n / 15, 2, 30);
  for (int i = 0; i < n_brigades; ++i)
    s.brigade_spawns.push_back(static_cast<int>(rng.below(nodes.size())));

  for (std::size_t i = 0; i < n_blocked; ++i) {
    if (rng.uniform() < 0.5) {
      const int cycle = 10 + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                                 std::max(1, s.params.deadline / 2 - 10))));
      s.road_open_schedule.push_back({cycle, road_order[i]});
    }
  }
  std::sort(s.road_open_schedule.begin(), s.road_open_schedule.end(),
            [](const ScheduledOpening& a, const ScheduledOpening& b) {
              return a.cycle != b.cycle ? a.cycle < b.cycle : a.road < b.road;
            });

  s.map = CityMap(std::move(nodes), std::move(roads), std::move(buildings), std::move(refuges));
  return s;
}

} // namespace fais
