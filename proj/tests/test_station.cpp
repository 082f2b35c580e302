#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fais/station.hpp"
#include "support.hpp"

using namespace fais;
using fais::test::make_map;
using fais::test::make_scenario;

namespace {

// Ten junctions 100 m apart with a building by each one. With `neighbors`,
// buildings 10 and 11 sit 20 m either side of building 5.
Scenario row_city(bool neighbors = false, std::vector<int> spawns = {3}) {
  std::vector<Vec2> nodes;
  std::vector<std::pair<int, int>> roads;
  std::vector<fais::test::BuildingSpec> buildings;
  for (int i = 0; i < 10; ++i) {
    nodes.push_back({100.0 * i, 0});
    if (i) roads.push_back({i - 1, i});
    buildings.push_back({{100.0 * i, 10}, i});
  }
  if (neighbors) {
    buildings.push_back({{520, 10}, 5});
    buildings.push_back({{480, 10}, 5});
  }
  return make_scenario(make_map(nodes, roads, buildings, {0}), {5}, std::move(spawns));
}

Message feedback(int sender, int cycle, nlohmann::json fires, Position pos, double water = 15000) {
  Message m;
  m.sender = sender;
  m.kind = MessageKind::Feedback;
  m.cycle = cycle;
  m.payload = {{"new_fires", std::move(fires)}, {"new_blocks", nlohmann::json::array()},
               {"cleared", nlohmann::json::array()}, {"pos", to_json(pos)},
               {"water", water}, {"health", 100}};
  return m;
}

Perception sight(int cycle, std::vector<SeenBuilding> buildings = {}) {
  Perception p;
  p.cycle = cycle;
  p.buildings = std::move(buildings);
  return p;
}

std::map<int, int> node_load(const TrafficResult& r) {
  std::map<int, int> load;
  for (const auto& s : r.stands) {
    if (s.stand.is_node()) ++load[s.stand.id];
  }
  return load;
}

} // namespace

TEST(AggregateFeedback, NewestReportWins) {
  const Scenario s = row_city(false, {3, 3});
  const std::vector<int> spawns{3, 3};
  StationWorldModel m = make_station_model(s, spawns);
  const std::vector<Message> in{feedback(0, 6, {{5, 2}}, Position::at_node(6)),
                                feedback(0, 4, {{5, 1}}, Position::at_node(4))};
  m = aggregate_feedback(std::move(m), in, sight(7), 7);
  EXPECT_EQ(m.fires.stage(5), 2);
  EXPECT_EQ(m.fires.report_cycle(5), 6);
  EXPECT_EQ(m.brigades[0].pos, Position::at_node(6));
  EXPECT_EQ(m.brigades[0].report_cycle, 6);
  EXPECT_EQ(m.brigades[1].pos, Position::at_node(3));
  EXPECT_TRUE(m.diagnostics.empty());
}

TEST(AggregateFeedback, MalformedFeedbackSkipped) {
  const Scenario s = row_city();
  const std::vector<int> spawns{3};
  StationWorldModel m = make_station_model(s, spawns);
  Message bad = feedback(0, 2, {{99, 1}}, Position::at_node(2));
  Message stranger = feedback(7, 2, {{5, 1}}, Position::at_node(2));
  const std::vector<Message> in{bad, stranger};
  m = aggregate_feedback(std::move(m), in, sight(3), 3);
  EXPECT_EQ(m.diagnostics.size(), 2u);
  EXPECT_EQ(m.brigades[0].pos, Position::at_node(3));
  EXPECT_EQ(m.fires.stage(5), 0);
}

TEST(AggregateFeedback, ExpiredMissionReleasesBrigades) {
  const Scenario s = row_city(false, {3, 3, 3});
  const std::vector<int> spawns{3, 3, 3};
  StationWorldModel m = make_station_model(s, spawns);
  m.missions.push_back({5, {0, 1}, 0, 9, 0.0, 1.0, false});
  m.stands[0] = m.stands[1] = Position::at_node(5);
  EXPECT_EQ(m.free_agents(), std::vector<int>{2});
  m = aggregate_feedback(std::move(m), {}, sight(9), 9); // still on time
  EXPECT_EQ(m.missions.size(), 1u);
  m = aggregate_feedback(std::move(m), {}, sight(10), 10); // deadline = cycle - 1
  EXPECT_TRUE(m.missions.empty());
  EXPECT_TRUE(m.stands.empty());
  EXPECT_EQ(m.free_agents(), (std::vector<int>{0, 1, 2}));
}

TEST(AggregateFeedback, ExtinguishedTargetClosesMission) {
  const Scenario s = row_city(false, {3, 3});
  const std::vector<int> spawns{3, 3};
  StationWorldModel m = make_station_model(s, spawns);
  m.missions.push_back({5, {0}, 0, 40, 0.0, 1.0, false});
  const std::vector<Message> in{feedback(1, 11, {{5, 4}}, Position::at_node(5))};
  m = aggregate_feedback(std::move(m), in, sight(12), 12);
  EXPECT_TRUE(m.missions.empty());
}

TEST(FreeAgents, HurtOrDryBrigadesAreNotFree) {
  const Scenario s = row_city(false, {3, 3, 3});
  const std::vector<int> spawns{3, 3, 3};
  StationWorldModel m = make_station_model(s, spawns);
  m.brigades[0].health = 30.0;
  m.brigades[1].water = 999.0;
  EXPECT_EQ(m.free_agents(), std::vector<int>{2});
}

TEST(Plan, CriticalSectionSendsEveryoneToOneFire) {
  const Scenario s = row_city(false, {3, 3, 3, 3, 3, 3});
  const std::vector<int> spawns(6, 3);
  StationWorldModel m = make_station_model(s, spawns);
  m.fires.observe(5, 1, 5);
  const PlanResult r = plan(m, 5, nullptr, s.params, {});
  EXPECT_EQ(r.pipeline, Pipeline::Critical);
  ASSERT_EQ(r.advices.size(), 6u);
  for (const Advice& a : r.advices) EXPECT_EQ(a.target, 5);
  ASSERT_EQ(r.missions.size(), 1u);
  EXPECT_EQ(r.missions[0].brigades.size(), 6u);
}

TEST(Plan, NothingBurningNothingAdvised) {
  const Scenario s = row_city(false, {3, 3});
  const std::vector<int> spawns{3, 3};
  const StationWorldModel m = make_station_model(s, spawns);
  const PlanResult r = plan(m, 100, nullptr, s.params, {});
  EXPECT_EQ(r.pipeline, Pipeline::Scheduled);
  EXPECT_TRUE(r.advices.empty());
  EXPECT_TRUE(r.missions.empty());
}

TEST(Plan, PipelinesAreExclusive) {
  const Scenario s = row_city(false, {3, 3, 3, 3});
  const std::vector<int> spawns(4, 3);
  StationWorldModel m = make_station_model(s, spawns);
  m.fires.observe(5, 1, 0);
  m.fires.observe(8, 2, 0);
  for (int cycle : {0, 29, 30, 60}) {
    const PlanResult r = plan(m, cycle, nullptr, s.params, {});
    const bool critical = cycle < s.params.critical_end;
    EXPECT_EQ(r.pipeline, critical ? Pipeline::Critical : Pipeline::Scheduled) << cycle;
    std::set<int> targets;
    for (const Advice& a : r.advices) targets.insert(a.target);
    if (critical) { EXPECT_EQ(targets.size(), 1u); }
  }
  StationConfig no_critical;
  no_critical.critical_section = false;
  EXPECT_EQ(plan(m, 5, nullptr, s.params, no_critical).pipeline, Pipeline::Scheduled);
}

TEST(Plan, AdviceOrderedByValue) {
  const Scenario s = row_city(false, {0, 2, 4, 6, 8, 9});
  const std::vector<int> spawns{0, 2, 4, 6, 8, 9};
  StationWorldModel m = make_station_model(s, spawns);
  m.fires.observe(2, 1, 0);
  m.fires.observe(5, 3, 0);
  m.fires.observe(8, 1, 0);
  const PlanResult r = plan(m, 40, nullptr, s.params, {});
  ASSERT_FALSE(r.advices.empty());
  for (std::size_t i = 1; i < r.advices.size(); ++i) EXPECT_GE(r.advices[i - 1].value, r.advices[i].value);
}

TEST(TrafficControl, TwoBrigadesBothOnTheRoad) {
  const Scenario s = row_city(true);
  const std::vector<int> spawns{3, 3};
  const StationWorldModel m = make_station_model(s, spawns);
  const TrafficResult r = traffic_control({{5, {0, 1}, 5, 30, 0.0, 1.0, false}}, m, s.params);
  ASSERT_EQ(r.stands.size(), 2u);
  for (const auto& st : r.stands) EXPECT_EQ(st.stand, Position::at_node(5));
  EXPECT_EQ(r.overflow, 0);
}

TEST(TrafficControl, ExtraBrigadesGoIntoNeighbors) {
  const Scenario s = row_city(true);
  const std::vector<int> spawns(4, 3);
  const StationWorldModel m = make_station_model(s, spawns);
  const TrafficResult r = traffic_control({{5, {3, 1, 2, 0}, 5, 30, 0.0, 1.0, false}}, m, s.params);
  ASSERT_EQ(r.stands.size(), 4u);
  std::set<int> inside;
  for (const auto& st : r.stands) {
    if (!st.redirected) continue;
    EXPECT_FALSE(st.stand.is_node());
    inside.insert(st.stand.id);
    EXPECT_LE(distance(s.map.building(st.stand.id).pos, s.map.building(5).pos), s.params.extinguish_range);
  }
  EXPECT_EQ(inside, (std::set<int>{10, 11}));
  EXPECT_EQ(r.overflow, 0);
  for (const auto& [node, n] : node_load(r)) EXPECT_LE(n, s.params.stand_cap);
  // lowest ids keep the road stand
  EXPECT_EQ(r.stands[0].brigade, 0);
  EXPECT_FALSE(r.stands[0].redirected);
  EXPECT_FALSE(r.stands[1].redirected);
}

TEST(TrafficControl, NoRoomMeansOverflow) {
  const Scenario s = row_city(false);
  const std::vector<int> spawns(4, 3);
  const StationWorldModel m = make_station_model(s, spawns);
  const TrafficResult r = traffic_control({{5, {0, 1, 2, 3}, 5, 30, 0.0, 1.0, false}}, m, s.params);
  EXPECT_EQ(r.overflow, 2);
  for (const auto& st : r.stands) EXPECT_EQ(st.stand, Position::at_node(5));
}

TEST(TrafficControl, BurningNeighborsAndExistingStandsCount) {
  const Scenario s = row_city(true);
  const std::vector<int> spawns(5, 3);
  StationWorldModel m = make_station_model(s, spawns);
  m.fires.observe(10, 1, 0);
  m.stands[4] = Position::at_node(5);
  const TrafficResult r = traffic_control({{5, {0, 1, 2}, 5, 30, 0.0, 1.0, false}}, m, s.params);
  ASSERT_EQ(r.stands.size(), 3u);
  EXPECT_EQ(r.stands[0].stand, Position::at_node(5));
  EXPECT_EQ(r.stands[1].stand, Position::in_building(11));
  EXPECT_EQ(r.stands[2].stand, Position::at_node(5));
  EXPECT_EQ(r.overflow, 1);
}

TEST(FireStation, CapDefersLowestAdvice) {
  const std::vector<int> spawns(40, 3);
  const Scenario s = row_city(false, spawns);
  FireStation station(s, spawns, nullptr);
  const auto first = station.step({}, sight(5, {{5, 1, false}}), 5);
  EXPECT_EQ(first.plan.advices.size(), 40u);
  ASSERT_EQ(first.messages.size(), 32u);
  for (int i = 0; i < 32; ++i) EXPECT_EQ(first.messages[static_cast<std::size_t>(i)].recipient, i);
  const auto second = station.step({}, sight(6, {{5, 1, false}}), 6);
  EXPECT_TRUE(second.plan.advices.empty()); // nobody is free any more
  ASSERT_EQ(second.messages.size(), 8u);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(second.messages[static_cast<std::size_t>(i)].recipient, 32 + i);
}

TEST(FireStation, AdvisesOnlyAndAdvisedBrigadesLeaveTheFreeSet) {
  const std::vector<int> spawns{1, 3, 7};
  const Scenario s = row_city(true, spawns);
  FireStation station(s, spawns, nullptr);
  for (int cycle = 0; cycle < 60; ++cycle) {
    std::vector<SeenBuilding> seen{{5, cycle < 50 ? 2 : 4, false}};
    if (cycle >= 35) seen.push_back({8, 1, false});
    const auto out = station.step({}, sight(cycle, seen), cycle);
    for (const Message& msg : out.messages) {
      EXPECT_TRUE(msg.kind == MessageKind::Advice || msg.kind == MessageKind::TrafficAdvice);
      EXPECT_GE(msg.recipient, 0);
    }
    EXPECT_LE(out.messages.size(), static_cast<std::size_t>(s.params.station_msg_cap));
    const std::vector<int> after = station.model().free_agents();
    std::set<int> advised;
    for (const Advice& a : out.plan.advices) {
      EXPECT_TRUE(advised.insert(a.brigade).second) << cycle;
      EXPECT_FALSE(std::binary_search(after.begin(), after.end(), a.brigade)) << cycle;
    }
  }
}

TEST(FireStation, KnowledgeFromSightMatchesPlainKnowledge) {
  const CityMap map = fais::test::line_city(10, 30);
  const Scenario s = make_scenario(map, {4}, {0, 0});
  const std::vector<int> spawns{0, 0};
  FireStation station(s, spawns, nullptr);
  FireKnowledge plain(&s.map, &s.params);
  for (int cycle = 0; cycle < 12; ++cycle) {
    std::vector<SeenBuilding> seen;
    if (cycle >= 2) seen.push_back({4, 1, false});
    if (cycle >= 6) seen.push_back({5, 2, false});
    station.step({}, sight(cycle, seen), cycle);
    for (const auto& b : seen) plain.observe(b.id, b.stage, cycle);
    plain.accumulate_heat();
  }
  for (int b = 0; b < s.map.building_count(); ++b)
    EXPECT_EQ(extract_features(station.model().fires, b, 12), extract_features(plain, b, 12)) << b;
}
