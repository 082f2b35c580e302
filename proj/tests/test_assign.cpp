#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fais/assign.hpp"
#include "fais/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fais;

namespace {

double total_of(const CostMatrix& cost, const std::vector<int>& slot_of) {
  double t = 0.0;
  for (std::size_t i = 0; i < slot_of.size(); ++i) {
    if (slot_of[i] >= 0) t += cost[i][static_cast<std::size_t>(slot_of[i])];
  }
  return t;
}

} // namespace

TEST(MinCostAssignment, TwoByTwo) {
  const CostMatrix c{{1, 2}, {2, 1}};
  const auto r = min_cost_assignment(c);
  EXPECT_EQ(r.slot_of, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(r.total, 2.0);
}

TEST(MinCostAssignment, ThreeByThree) {
  const CostMatrix c{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  const auto r = min_cost_assignment(c);
  EXPECT_DOUBLE_EQ(r.total, 5.0);
  EXPECT_EQ(r.slot_of, (std::vector<int>{1, 0, 2}));
}

TEST(MinCostAssignment, SingleCell) {
  const auto r = min_cost_assignment({{5}});
  EXPECT_EQ(r.slot_of, std::vector<int>{0});
  EXPECT_DOUBLE_EQ(r.total, 5.0);
  EXPECT_EQ(r.matched, 1);
}

TEST(MinCostAssignment, InfiniteRowsStayUnassigned) {
  const CostMatrix c{{kUnreachable, kUnreachable}, {3, kUnreachable}, {kUnreachable, 4}};
  const auto r = min_cost_assignment(c);
  EXPECT_EQ(r.slot_of, (std::vector<int>{-1, 0, 1}));
  EXPECT_EQ(r.matched, 2);
  EXPECT_DOUBLE_EQ(r.total, 7.0);
}

TEST(MinCostAssignment, MoreMatchesBeforeCheaper) {
  // Pairing agent 0 with slot 0 is cheapest but leaves agent 1 stranded.
  const CostMatrix c{{1, 100}, {5, kUnreachable}};
  const auto r = min_cost_assignment(c);
  EXPECT_EQ(r.matched, 2);
  EXPECT_DOUBLE_EQ(r.total, 105.0);
}

TEST(MinCostAssignment, RectangularBothWays) {
  const CostMatrix wide{{3, 1, 2}};
  EXPECT_EQ(min_cost_assignment(wide).slot_of, std::vector<int>{1});
  const CostMatrix tall{{3}, {1}, {2}};
  const auto r = min_cost_assignment(tall);
  EXPECT_EQ(r.slot_of, (std::vector<int>{-1, 0, -1}));
  EXPECT_TRUE(min_cost_assignment({}).slot_of.empty());
}

TEST(MinCostAssignment, BruteForceAndSwapCertificate) {
  Rng rng(77);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t rows = 1 + rng.below(6), cols = 1 + rng.below(6);
    CostMatrix c(rows, std::vector<double>(cols));
    for (auto& row : c) {
      for (double& x : row) x = rng.below(5) == 0 ? kUnreachable : static_cast<double>(rng.below(50));
    }
    const auto r = min_cost_assignment(c);
    const auto best = oracle::brute_force_assignment(c);
    ASSERT_EQ(r.matched, best.matched);
    ASSERT_EQ(r.total, best.total);
    EXPECT_EQ(total_of(c, r.slot_of), r.total);
    std::set<int> used;
    for (int s : r.slot_of) {
      if (s >= 0) { EXPECT_TRUE(used.insert(s).second); }
    }
    // no swap of two assigned agents lowers the total
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = i + 1; j < rows; ++j) {
        const int si = r.slot_of[i], sj = r.slot_of[j];
        if (si < 0 || sj < 0) continue;
        const double now = c[i][static_cast<std::size_t>(si)] + c[j][static_cast<std::size_t>(sj)];
        const double swapped = c[i][static_cast<std::size_t>(sj)] + c[j][static_cast<std::size_t>(si)];
        EXPECT_LE(now, swapped);
      }
    }
  }
}

TEST(SlotCapacity, Clamped) {
  const SimParams p; // 1000 per cycle over half of 25 cycles
  EXPECT_EQ(slot_capacity(0.0, p), 1);
  EXPECT_EQ(slot_capacity(12500.0, p), 1);
  EXPECT_EQ(slot_capacity(12501.0, p), 2);
  EXPECT_EQ(slot_capacity(1e9, p), 5);
}

TEST(ScheduleMissions, TwoAgentsShareOneTarget) {
  const CityMap map = fais::test::line_city(3);
  const SimParams p;
  const std::vector<TargetCandidate> targets{{2, 1.0, 20000.0}};
  const std::map<int, std::vector<int>> domains{{2, {0, 1}}};
  const DistanceTable d{{0, {{2, 200.0}}}, {1, {{2, 100.0}}}};
  const auto r = schedule_missions(map, targets, domains, d, {0, 1}, 40, p);
  ASSERT_EQ(r.missions.size(), 1u);
  EXPECT_EQ(r.missions[0].target, 2);
  EXPECT_EQ(r.missions[0].brigades, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.missions[0].deadline, 65);
  ASSERT_EQ(r.advices.size(), 2u);
  EXPECT_EQ(r.advices[0].stand, Position::at_node(2));
  EXPECT_DOUBLE_EQ(r.total_cost, 300.0);
}

TEST(ScheduleMissions, AgentOutsideEveryDomain) {
  const CityMap map = fais::test::line_city(3);
  const SimParams p;
  const std::vector<TargetCandidate> targets{{1, 1.0, 0.0}, {2, 0.5, 0.0}};
  const std::map<int, std::vector<int>> domains{{1, {0}}, {2, {0}}};
  const DistanceTable d{{0, {{1, 100.0}, {2, 200.0}}}, {1, {{1, 10.0}, {2, 10.0}}}};
  const auto r = schedule_missions(map, targets, domains, d, {0, 1}, 40, p);
  EXPECT_EQ(r.unassigned, std::vector<int>{1});
  for (const Advice& a : r.advices) EXPECT_NE(a.brigade, 1);
  EXPECT_EQ(r.advices.size(), 1u);
}

TEST(ScheduleMissions, CapacityLimitsAndEarlierAssignments) {
  const CityMap map = fais::test::line_city(3);
  const SimParams p;
  std::vector<TargetCandidate> targets{{1, 1.0, 0.0}};
  const std::map<int, std::vector<int>> domains{{1, {0, 1, 2}}};
  const DistanceTable d{{0, {{1, 5.0}}}, {1, {{1, 1.0}}}, {2, {{1, 9.0}}}};
  auto r = schedule_missions(map, targets, domains, d, {0, 1, 2}, 40, p);
  EXPECT_EQ(r.advices.size(), 1u); // c_b = 1
  EXPECT_EQ(r.advices[0].brigade, 1);
  targets[0].predicted_water = 40000.0; // c_b = 4, two already busy there
  targets[0].already_assigned = 2;
  r = schedule_missions(map, targets, domains, d, {0, 1, 2}, 40, p);
  EXPECT_EQ(r.advices.size(), 2u);
  EXPECT_EQ(r.unassigned, std::vector<int>{2});
  EXPECT_TRUE(schedule_missions(map, {}, domains, d, {0, 1}, 40, p).missions.empty());
}

TEST(CriticalAssign, EveryoneToTheBest) {
  const CityMap map = fais::test::line_city(8);
  const SimParams p;
  const std::map<int, double> values{{3, 1.0}, {7, 4.0}, {5, 2.0}};
  const auto r = critical_assign(map, {0, 1, 2, 3, 4}, values, 3, p);
  ASSERT_EQ(r.missions.size(), 1u);
  EXPECT_EQ(r.missions[0].target, 7);
  EXPECT_EQ(r.missions[0].brigades, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(r.advices.size(), 5u);
}

TEST(CriticalAssign, TiesAndPipelineBoundary) {
  const CityMap map = fais::test::line_city(8);
  const SimParams p;
  const std::map<int, double> values{{6, 2.0}, {4, 2.0}};
  EXPECT_EQ(critical_assign(map, {0}, values, 0, p).missions[0].target, 4);
  EXPECT_THROW(critical_assign(map, {0}, values, p.critical_end, p), std::logic_error);
  EXPECT_TRUE(critical_assign(map, {0}, {}, 0, p).missions.empty());
}
