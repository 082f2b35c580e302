// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fais/assign.hpp"
#include "fais/harness.hpp"
#include "fais/pathplan.hpp"
#include "fais/predict.hpp"
#include "fais/rng.hpp"
#include "fais/valuation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fais;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome assignment_oracle() {
  Rng rng(20030);
  const auto t0 = std::chrono::steady_clock::now();
  int bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t rows = 1 + rng.below(6), cols = 1 + rng.below(6);
    CostMatrix c(rows, std::vector<double>(cols));
    for (auto& row : c) {
      for (double& x : row) x = rng.below(6) == 0 ? kUnreachable : std::floor(rng.uniform(0, 1000));
    }
    const auto got = min_cost_assignment(c);
    const auto best = oracle::brute_force_assignment(c);
    if (got.matched != best.matched || got.total != best.total) ++bad;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 10.0, fmt("%.0f mismatches in 10000 instances, %.2f s", bad, secs)};
}

bool same_points(std::vector<Vec2> a, std::vector<Vec2> b) {
  const auto less = [](Vec2 l, Vec2 r) { return l.x != r.x ? l.x < r.x : l.y < r.y; };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  return a == b;
}

Outcome hull_oracle() {
  Rng rng(4242);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng.below(12));
    // half the sets on a small grid so duplicates and collinear runs appear
    const bool grid = t % 2 == 0;
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
      if (grid) pts.push_back({static_cast<double>(rng.below(5)), static_cast<double>(rng.below(5))});
      else pts.push_back({rng.uniform(-100, 100), rng.uniform(-100, 100)});
    }
    if (!same_points(convex_hull(pts), oracle::hull_vertices(pts))) ++bad;
  }
  return {bad == 0, fmt("%.0f mismatches in 1000 point sets", bad)};
}

CityMap buildings_at(const std::vector<Vec2>& pts) {
  std::vector<fais::test::BuildingSpec> specs;
  for (const Vec2& p : pts) specs.push_back({p, 0});
  return fais::test::make_map({{0, 0}}, {}, specs);
}

Outcome hv_oracle() {
  Rng rng(777);
  double worst = 0.0;
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng.below(15));
    std::vector<Vec2> pts;
    std::vector<int> stages;
    for (int i = 0; i < n; ++i) {
      pts.push_back({rng.uniform(0, 300), rng.uniform(0, 300)});
      stages.push_back(rng.below(4) == 0 ? 0 : 1 + static_cast<int>(rng.below(3)));
    }
    const CityMap map = buildings_at(pts);
    const FireBorder border = make_fire_border(map, stages);
    Weights w;
    w.margin = rng.uniform(0.5, 60);
    oracle::HvInput in;
    for (int f : border.fiery) in.fiery.push_back(map.building(f).pos);
    in.margin = w.margin;
    in.hv_max = w.hv_max;
    for (std::size_t k = 0; k < border.fiery.size(); ++k) {
      in.x = k;
      worst = std::max(worst, std::abs(hv(map, border.fiery[k], border, w) - oracle::hv_scan(in)));
      ++checked;
    }
  }
  return {worst <= 1e-9, fmt("max |diff| %.3g over %.0f burning buildings in 1000 configurations", worst, checked)};
}

Outcome bfs_oracle() {
  Rng rng(5150);
  int bad = 0;
  long pairs = 0;
  for (int g = 0; g < 500; ++g) {
    const int n = 1 + static_cast<int>(rng.below(50));
    std::vector<Vec2> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({rng.uniform(0, 2000), rng.uniform(0, 2000)});
    std::vector<std::pair<int, int>> roads;
    const int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(3 * n)));
    for (int e = 0; e < m; ++e) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      if (a != b) roads.push_back({a, b});
    }
    const CityMap map = fais::test::make_map(nodes, roads, {{{0, 0}, 0}});
    GraphView view(&map, 10);
    for (int r = 0; r < map.road_count(); ++r) {
      if (rng.below(8) == 0) view.mark_blocked(r, true);
      if (rng.below(8) == 0) view.suppress_until(r, static_cast<int>(rng.below(20)));
    }
    for (int from = 0; from < n; ++from) {
      const auto hops = oracle::unit_dijkstra(view, from);
      for (int to = 0; to < n; ++to) {
        const auto path = shortest_path(view, from, to);
        const int got = path ? static_cast<int>(path->size()) - 1 : -1;
        if (got != hops[static_cast<std::size_t>(to)]) ++bad;
        ++pairs;
      }
    }
  }
  return {bad == 0, fmt("%.0f mismatches over %.0f node pairs in 500 graphs", bad, static_cast<double>(pairs))};
}

Outcome gradient_check() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NetKind kind = seed % 2 ? NetKind::Ignition : NetKind::Water;
    PredictorNet net = PredictorNet::random({8, 16, 1}, kind, seed * 31);
    if (kind == NetKind::Water) net.output_scale = 1000.0;
    Rng rng(seed);
    std::vector<Sample> batch(16);
    for (auto& s : batch) {
      s.x.resize(8);
      for (double& v : s.x) v = rng.uniform();
      s.label = kind == NetKind::Ignition ? static_cast<double>(rng.below(2)) : rng.uniform(0, 2000);
    }
    const auto grad = loss_gradient(net, batch);
    auto params = net.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + 1e-5;
      net.set_parameters(params);
      const double up = mean_loss(net, batch);
      params[i] = keep - 1e-5;
      net.set_parameters(params);
      const double down = mean_loss(net, batch);
      params[i] = keep;
      net.set_parameters(params);
      const double numeric = (up - down) / 2e-5;
      const double diff = std::abs(grad[i] - numeric);
      // a dead hidden unit gives two near-zero values; compare those absolutely
      const double scale = std::max(std::abs(grad[i]), std::abs(numeric));
      const double rel = scale < 1e-8 ? diff : diff / scale;
      worst = std::max(worst, rel);
    }
  }
  return {worst <= 1e-4, fmt("max relative error %.3g over 20 nets", worst)};
}

struct Timed {
  RunReport report;
  double seconds;
};

Timed timed_run(const Scenario& s, const RunConfig& c, const Predictor* p) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r = run_scenario(s, c, p);
  return {std::move(r), seconds_since(t0)};
}

Outcome determinism(const Predictor* p, RunReport& keep) {
  Scenario s = generate_city(11, 500, 600);
  s.params.deadline = 300;
  RunConfig c;
  c.seed = 1;
  c.strategy = Strategy::Fais;
  c.stop_when_out = false;
  const Timed a = timed_run(s, c, p);
  const Timed b = timed_run(s, c, p);
  const bool same = a.report.log_sha256 == b.report.log_sha256;
  std::ostringstream d;
  d << (same ? "identical" : "different") << " SHA-256 " << a.report.log_sha256.substr(0, 16) << "..., "
    << a.report.cycles_run << " cycles on " << s.map.building_count() << " buildings, "
    << fmt("%.2f s and %.2f s", a.seconds, b.seconds);
  const bool ok = same && a.report.cycles_run == 300 && a.seconds < 10.0 && b.seconds < 10.0;
  keep = a.report;
  return {ok, d.str()};
}

// Counts delivered messages per (cycle, sender) straight from the log.
Outcome bandwidth(const std::vector<RunReport>& runs, const SimParams& params) {
  int worst_brigade = 0, worst_station = 0;
  long delivered = 0;
  for (const RunReport& r : runs) {
    const ReplayLog log = parse_replay(r.log);
    for (const auto& rec : log.records) {
      std::map<int, int> per_sender;
      for (const auto& m : rec.at("messages")) {
        ++per_sender[m.at("sender").get<int>()];
        ++delivered;
      }
      for (const auto& [sender, n] : per_sender) {
        if (sender == kStationId) worst_station = std::max(worst_station, n);
        else worst_brigade = std::max(worst_brigade, n);
      }
    }
  }
  const bool ok = worst_brigade <= params.brigade_msg_cap && worst_station <= params.station_msg_cap;
  std::ostringstream d;
  d << delivered << " deliveries in " << runs.size() << " runs; busiest brigade " << worst_brigade << "/"
    << params.brigade_msg_cap << ", station " << worst_station << "/" << params.station_msg_cap << " per cycle";
  return {ok, d.str()};
}

Outcome building_value_checks() {
  // Building 0 burns next to burning building 1 (10 m) with three unburnt
  // buildings 30 m away: three unburnt neighbors and HV = 10.
  const CityMap map = buildings_at({{0, 0}, {10, 0}, {-30, 0}, {0, 30}, {0, -30}});
  const std::vector<int> stages{1, 2, 0, 0, 0};
  const FireBorder border = make_fire_border(map, stages);
  Weights w;
  w.alpha = 1.0;
  w.beta = 2.0;
  w.gamma = 0.5;
  const std::vector<AgentDistance> agents{{0, 100.0, 100.0}, {1, 200.0, 200.0}};
  const double example = building_value(map, stages, border, 0, agents, w, 50.0);
  Weights zero = w;
  zero.alpha = zero.beta = zero.gamma = 0.0;
  const double zeroed = building_value(map, stages, border, 0, agents, zero, 50.0);
  const double empty = building_value(map, stages, border, 0, {}, w, 50.0);
  const double n = unfired_neighbors(map, stages, 0, 50.0), h = hv(map, 0, border, w);
  const bool ok = std::abs(example - (-289.0)) <= 1e-9 && std::abs(zeroed) <= 1e-9 &&
                  std::abs(empty - (w.beta * n + w.gamma * h)) <= 1e-9 && n == 3 && h == 10.0;
  return {ok, fmt("worked example %.12g, zero weights %.3g, empty domain %.12g", example, zeroed, empty)};
}

struct Ablation {
  std::map<Strategy, CompareCell> cells;
};

Ablation ablation_runs(const Scenario& s, const Predictor* p) {
  const std::vector<NamedScenario> scenarios{{"ablation", s}};
  const std::vector<Strategy> strategies{Strategy::Fais, Strategy::FaisNoCritical, Strategy::FaisNoTraffic,
                                         Strategy::GreedyNearest};
  Ablation a;
  for (CompareCell& c : compare(scenarios, strategies, 20, p)) a.cells.emplace(c.strategy, std::move(c));
  return a;
}

std::string cell_error(const Ablation& a) {
  for (const auto& [s, c] : a.cells) {
    if (!c.error.empty()) return std::string(to_string(s)) + ": " + c.error;
  }
  return "";
}

} // namespace

int main() {
  const auto predictor = default_predictor();
  const Predictor* p = predictor ? &*predictor : nullptr;
  if (!p) std::printf("note: bundled predictor not found, prediction disabled\n");

  std::vector<std::pair<std::string, std::function<Outcome()>>> checks;
  checks.emplace_back("assignment oracle", assignment_oracle);
  checks.emplace_back("hull oracle", hull_oracle);
  checks.emplace_back("hv oracle", hv_oracle);
  checks.emplace_back("bfs oracle", bfs_oracle);
  checks.emplace_back("gradient check", gradient_check);

  RunReport big;
  checks.emplace_back("determinism", [&] { return determinism(p, big); });

  // Ablation scenario: 300 buildings with six initial fires.
  CityOptions opts;
  opts.ignitions = 6;
  const Scenario ablation_city = generate_city(7, 300, 600, opts);
  Ablation ab;
  bool ablation_done = false;
  const auto ablation = [&]() -> const Ablation& {
    if (!ablation_done) {
      ab = ablation_runs(ablation_city, p);
      ablation_done = true;
    }
    return ab;
  };

  checks.emplace_back("bandwidth", [&] {
    std::vector<RunReport> runs{big};
    Scenario sample = load_scenario_file(std::string(FAIS_DATA_DIR) + "/sample_city.json");
    for (Strategy s : all_strategies()) {
      RunConfig c;
      c.seed = 3;
      c.strategy = s;
      runs.push_back(run_scenario(sample, c, p));
      runs.push_back(run_scenario(ablation_city, c, p));
    }
    return bandwidth(runs, ablation_city.params);
  });

  checks.emplace_back("critical-section ablation", [&] {
    const Ablation& a = ablation();
    if (const auto e = cell_error(a); !e.empty()) return Outcome{false, e};
    const double f = a.cells.at(Strategy::Fais).median, n = a.cells.at(Strategy::FaisNoCritical).median;
    return Outcome{f <= n, fmt("median burnt ratio fais %.4f, fais-no-critical %.4f (6 ignitions, 20 seeds)", f, n)};
  });
  checks.emplace_back("coordination ablation", [&] {
    const Ablation& a = ablation();
    if (const auto e = cell_error(a); !e.empty()) return Outcome{false, e};
    const double f = a.cells.at(Strategy::Fais).median, g = a.cells.at(Strategy::GreedyNearest).median;
    std::string d = fmt("median burnt ratio fais %.4f, greedy-nearest %.4f", f, g);
    d += f < g ? ", strict improvement" : (f == g ? ", tie (no strict improvement)" : "");
    return Outcome{f <= g, d};
  });
  checks.emplace_back("traffic ablation", [&] {
    const Ablation& a = ablation();
    if (const auto e = cell_error(a); !e.empty()) return Outcome{false, e};
    long with = 0, without = 0;
    for (int v : a.cells.at(Strategy::Fais).violations) with += v;
    for (int v : a.cells.at(Strategy::FaisNoTraffic).violations) without += v;
    return Outcome{with < without,
                   fmt("standing-cap violations over 20 seeds: fais %.0f, fais-no-traffic %.0f",
                       static_cast<double>(with), static_cast<double>(without))};
  });
  checks.emplace_back("building_value checks", building_value_checks);

  int failed = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
