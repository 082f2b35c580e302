#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>

#include "fais/world.hpp"
#include "support.hpp"

using namespace fais;
using fais::test::make_map;

namespace {

const char* kMinimal = R"({
  "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 100, "y": 0}],
  "roads": [{"id": 0, "a": 0, "b": 1, "length": 100}],
  "buildings": [{"id": 0, "x": 10, "y": 10, "area": 200}],
  "refuges": [],
  "ignitions": [0],
  "brigade_spawns": [0],
  "road_open_schedule": [],
  "params": {}
})";

std::string with_replacement(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return text.replace(at, from.size(), to);
}

bool graph_connected(const CityMap& map) {
  if (map.node_count() == 0) return true;
  std::vector<char> seen(static_cast<std::size_t>(map.node_count()), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const Road& r : map.roads()) {
      if (r.a != u && r.b != u) continue;
      const int v = r.other(u);
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == map.node_count();
}

} // namespace

TEST(LoadScenario, MinimalFileHasOneIgnition) {
  const Scenario s = load_scenario(kMinimal);
  EXPECT_EQ(s.ignitions, std::vector<int>{0});
  EXPECT_EQ(s.map.building_count(), 1);
  EXPECT_EQ(s.map.building(0).entrance, 0);
}

TEST(LoadScenario, UnknownRefugeIsNamed) {
  const std::string bad = with_replacement(kMinimal, R"("refuges": [])", R"("refuges": [4])");
  try {
    load_scenario(bad);
    FAIL() << "accepted an unknown refuge";
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown refuge id"), std::string::npos) << e.what();
  }
}

TEST(LoadScenario, RejectsBrokenInvariants) {
  EXPECT_THROW(load_scenario(with_replacement(kMinimal, R"("length": 100)", R"("length": 150)")), ScenarioError);
  EXPECT_THROW(load_scenario(with_replacement(kMinimal, R"("ignitions": [0])", R"("ignitions": [])")),
               ScenarioError);
  EXPECT_THROW(load_scenario(with_replacement(kMinimal, R"("area": 200)", R"("area": 0)")), ScenarioError);
  EXPECT_THROW(load_scenario(with_replacement(kMinimal, R"("params": {})", R"("params": {}, "extra": 1)")),
               ScenarioError);
  EXPECT_THROW(load_scenario(with_replacement(kMinimal, R"("b": 1)", R"("b": 0)")), ScenarioError);
  EXPECT_THROW(load_scenario(with_replacement(kMinimal, R"("road_open_schedule": [])",
                                              R"("road_open_schedule": [[0, 0]])")),
               ScenarioError);
}

TEST(LoadScenario, ParseErrorMentionsLocation) {
  try {
    load_scenario("{\n  \"nodes\": [,]\n}");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(LoadScenario, ShippedSampleCity) {
  const Scenario s = load_scenario_file(std::string(FAIS_DATA_DIR) + "/sample_city.json");
  EXPECT_EQ(s.map.building_count(), 50);
  EXPECT_EQ(s.map.refuges().size(), 3u);
  for (int r : s.map.refuges()) EXPECT_TRUE(s.map.building(r).is_refuge);
}

TEST(GenerateCity, SameSeedSameBytes) {
  EXPECT_EQ(save_scenario(generate_city(1, 10, 600)), save_scenario(generate_city(1, 10, 600)));
}

TEST(GenerateCity, DifferentSeedsDiffer) {
  EXPECT_NE(save_scenario(generate_city(1, 10, 600)), save_scenario(generate_city(2, 10, 600)));
}

TEST(GenerateCity, TwoBuildingMinimum) {
  const Scenario s = generate_city(3, 2, 600);
  EXPECT_EQ(s.map.building_count(), 2);
  EXPECT_GE(s.map.road_count(), 1);
  const Scenario clamped = generate_city(3, -5, 600);
  EXPECT_EQ(clamped.map.building_count(), 2);
}

TEST(GenerateCity, RoundTripConnectedAndValid) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const int n = 2 + static_cast<int>(seed * 37 % 400);
    const Scenario s = generate_city(seed, n, 300.0 + 100.0 * static_cast<double>(seed));
    const std::string text = save_scenario(s);
    const Scenario back = load_scenario(text);
    EXPECT_EQ(back, s) << "seed " << seed;
    EXPECT_EQ(save_scenario(back), text);
    EXPECT_TRUE(graph_connected(s.map)) << "seed " << seed;
    EXPECT_EQ(s.map.building_count(), n);
    for (const Road& r : s.map.roads()) {
      const double d = distance(s.map.node(r.a).pos, s.map.node(r.b).pos);
      EXPECT_LE(std::abs(r.length - d), 1e-3 * d);
    }
    for (const Building& b : s.map.buildings()) {
      // the entrance is the nearest junction
      for (const Node& nd : s.map.nodes())
        EXPECT_LE(distance(b.pos, s.map.node(b.entrance).pos), distance(b.pos, nd.pos) + 1e-9);
    }
  }
}

TEST(UnfiredNeighbors, IsolatedBuilding) {
  const CityMap map = make_map({{0, 0}}, {}, {{{0, 0}}, {{500, 0}}});
  const std::vector<int> stages{0, 0};
  EXPECT_EQ(unfired_neighbors(map, stages, 0, 50.0), 0);
}

TEST(UnfiredNeighbors, FourAtThirtyMetres) {
  const CityMap map = make_map({{0, 0}}, {},
                               {{{0, 0}}, {{30, 0}}, {{-30, 0}}, {{0, 30}}, {{0, -30}}, {{80, 0}}});
  std::vector<int> stages(6, 0);
  EXPECT_EQ(unfired_neighbors(map, stages, 0, 50.0), 4);
  stages[1] = 2;
  stages[3] = 1;
  EXPECT_EQ(unfired_neighbors(map, stages, 0, 50.0), 2);
  stages[2] = 5; // burnt out no longer counts
  stages[4] = 4;
  EXPECT_EQ(unfired_neighbors(map, stages, 0, 50.0), 0);
  EXPECT_THROW(unfired_neighbors(map, stages, 9, 50.0), std::out_of_range);
}

TEST(UnfiredNeighbors, MonotoneAsBuildingsIgnite) {
  const Scenario s = generate_city(5, 120, 900);
  std::vector<int> stages(static_cast<std::size_t>(s.map.building_count()), 0);
  std::vector<int> before;
  for (int b = 0; b < s.map.building_count(); ++b) before.push_back(unfired_neighbors(s.map, stages, b, 50.0));
  for (int step = 0; step < s.map.building_count(); step += 7) {
    stages[static_cast<std::size_t>(step)] = 1;
    for (int b = 0; b < s.map.building_count(); ++b) {
      const int now = unfired_neighbors(s.map, stages, b, 50.0);
      EXPECT_LE(now, before[static_cast<std::size_t>(b)]);
      before[static_cast<std::size_t>(b)] = now;
    }
  }
}

TEST(Geometry, SegmentDistance) {
  EXPECT_DOUBLE_EQ(segment_distance({5, 3}, {0, 0}, {10, 0}), 3.0);
  EXPECT_DOUBLE_EQ(segment_distance({-3, 4}, {0, 0}, {10, 0}), 5.0);
  EXPECT_DOUBLE_EQ(segment_distance({2, 2}, {1, 1}, {1, 1}), std::sqrt(2.0));
}
