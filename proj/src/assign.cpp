#include "fais/assign.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fais {

namespace {

// Rectangular Hungarian method, rows <= columns; returns column per row.
std::vector<int> hungarian(const CostMatrix& a, std::size_t n, std::size_t m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) col_of[p[j] - 1] = static_cast<int>(j - 1);
  }
  return col_of;
}

} // namespace

AssignmentResult min_cost_assignment(const CostMatrix& cost) {
  AssignmentResult result;
  const std::size_t rows = cost.size();
  result.slot_of.assign(rows, -1);
  if (rows == 0) return result;
  const std::size_t cols = cost[0].size();
  for (const auto& row : cost) {
    if (row.size() != cols) throw std::invalid_argument("cost matrix rows differ in length");
  }
  if (cols == 0) return result;

  // Infinite pairs get a penalty larger than any achievable finite total, so
  // the solver first maximizes the number of finite pairs.
  double largest = 0.0;
  for (const auto& row : cost) {
    for (double c : row) {
      if (std::isnan(c)) throw std::invalid_argument("cost matrix contains NaN");
      if (std::isfinite(c)) largest = std::max(largest, std::abs(c));
    }
  }
  const double penalty = 2.0 * static_cast<double>(std::min(rows, cols)) * (largest + 1.0) + 1.0;

  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;
  CostMatrix a(n, std::vector<double>(m));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double c = std::isfinite(cost[i][j]) ? cost[i][j] : penalty;
      if (transpose) {
        a[j][i] = c;
      } else {
        a[i][j] = c;
      }
    }
  }
  const std::vector<int> col_of = hungarian(a, n, m);
  for (std::size_t k = 0; k < n; ++k) {
    const int other = col_of[k];
    if (other < 0) continue;
    const std::size_t agent = transpose ? static_cast<std::size_t>(other) : k;
    const std::size_t slot = transpose ? k : static_cast<std::size_t>(other);
    if (!std::isfinite(cost[agent][slot])) continue;
    result.slot_of[agent] = static_cast<int>(slot);
    result.total += cost[agent][slot];
    ++result.matched;
  }
  return result;
}

int slot_capacity(double predicted_water, const SimParams& params) {
  const double per_agent = params.max_extinguish * params.mission_time / 2.0;
  const double c = std::ceil(std::max(0.0, predicted_water) / per_agent);
  return static_cast<int>(std::clamp(c, 1.0, static_cast<double>(params.max_slots_per_target)));
}

AssignmentProblem build_problem(const std::vector<TargetCandidate>& targets,
                                const std::map<int, std::vector<int>>& domains,
                                const DistanceTable& distances, const std::vector<int>& free_agents,
                                const SimParams& params) {
  AssignmentProblem problem;
  problem.agents = free_agents;
  for (const TargetCandidate& t : targets) {
    const int cap = slot_capacity(t.predicted_water, params) - t.already_assigned;
    for (int k = 0; k < cap; ++k) problem.slots.push_back({t.building, k});
  }
  for (int agent : free_agents) {
    std::vector<double> row;
    for (const Slot& s : problem.slots) {
      double c = kUnreachable;
      const auto dom = domains.find(s.building);
      const bool in_domain =
          dom != domains.end() &&
          std::binary_search(dom->second.begin(), dom->second.end(), agent);
      if (in_domain) {
        if (auto ai = distances.find(agent); ai != distances.end()) {
          if (auto bi = ai->second.find(s.building); bi != ai->second.end()) c = bi->second;
        }
      }
      row.push_back(c);
    }
    problem.cost.push_back(std::move(row));
  }
  return problem;
}

ScheduleResult schedule_missions(const CityMap& map, const std::vector<TargetCandidate>& targets,
                                 const std::map<int, std::vector<int>>& domains,
                                 const DistanceTable& distances,
                                 const std::vector<int>& free_agents, int cycle,
                                 const SimParams& params) {
  ScheduleResult out;
  if (targets.empty() || free_agents.empty()) {
    out.unassigned = free_agents;
    return out;
  }
  const AssignmentProblem problem = build_problem(targets, domains, distances, free_agents, params);
  const AssignmentResult solved = min_cost_assignment(problem.cost);
  out.total_cost = solved.total;

  std::map<int, Mission> by_target;
  for (std::size_t i = 0; i < problem.agents.size(); ++i) {
    const int agent = problem.agents[i];
    const int slot = solved.slot_of[i];
    if (slot < 0) {
      out.unassigned.push_back(agent);
      continue;
    }
    const int b = problem.slots[static_cast<std::size_t>(slot)].building;
    const auto t = std::find_if(targets.begin(), targets.end(),
                                [b](const TargetCandidate& c) { return c.building == b; });
    Mission& m = by_target[b];
    m.target = b;
    m.brigades.push_back(agent);
    m.issued = cycle;
    m.deadline = cycle + params.mission_time;
    m.water_budget = t->predicted_water;
    m.value = t->value;
    m.predicted = t->predicted;
  }
  for (auto& [b, m] : by_target) {
    std::sort(m.brigades.begin(), m.brigades.end());
    for (int agent : m.brigades) {
      out.advices.push_back(
          {agent, b, Position::at_node(map.building(b).entrance), m.deadline, m.value});
    }
    out.missions.push_back(std::move(m));
  }
  return out;
}

ScheduleResult critical_assign(const CityMap& map, const std::vector<int>& free_agents,
                               const std::map<int, double>& values, int cycle,
                               const SimParams& params) {
  if (cycle >= params.critical_end)
    throw std::logic_error("critical_assign called after the critical section");
  ScheduleResult out;
  if (values.empty() || free_agents.empty()) {
    out.unassigned = free_agents;
    return out;
  }
  auto best = values.begin();
  for (auto it = values.begin(); it != values.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  Mission m;
  m.target = best->first;
  m.brigades = free_agents;
  std::sort(m.brigades.begin(), m.brigades.end());
  m.issued = cycle;
  m.deadline = cycle + params.mission_time;
  m.value = best->second;
  for (int agent : m.brigades) {
    out.advices.push_back(
        {agent, m.target, Position::at_node(map.building(m.target).entrance), m.deadline, m.value});
  }
  out.missions.push_back(std::move(m));
  return out;
}

} // namespace fais
