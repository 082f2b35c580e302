#include "fais/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "fais/brigade.hpp"
#include "fais/rng.hpp"
#include "fais/station.hpp"

#ifndef FAIS_DATA_DIR
#define FAIS_DATA_DIR "data"
#endif

namespace fais {

namespace {

constexpr std::pair<Strategy, const char*> kStrategyNames[] = {
    {Strategy::Fais, "fais"},
    {Strategy::FaisNoCritical, "fais-no-critical"},
    {Strategy::FaisNoTraffic, "fais-no-traffic"},
    {Strategy::FaisNoPredict, "fais-no-predict"},
    {Strategy::GreedyNearest, "greedy-nearest"},
    {Strategy::Random, "random"},
};

bool uses_station(Strategy s) { return s != Strategy::GreedyNearest && s != Strategy::Random; }

StationConfig station_config(Strategy s) {
  StationConfig c;
  c.critical_section = s != Strategy::FaisNoCritical;
  c.traffic_control = s != Strategy::FaisNoTraffic;
  c.prediction = s != Strategy::FaisNoPredict;
  return c;
}

nlohmann::json brigade_json(const BrigadeState& b) {
  return {b.pos.is_node() ? 0 : 1, b.pos.id, b.health, b.water};
}

} // namespace

const char* to_string(Strategy s) {
  for (const auto& [k, name] : kStrategyNames) {
    if (k == s) return name;
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  for (const auto& [k, n] : kStrategyNames) {
    if (name == n) return k;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

std::vector<Strategy> all_strategies() {
  std::vector<Strategy> out;
  for (const auto& entry : kStrategyNames) out.push_back(entry.first);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::vector<int> seeded_spawns(const Scenario& scenario, std::uint64_t seed) {
  if (seed == 0) return scenario.brigade_spawns;
  const CityMap& map = scenario.map;
  Rng rng(seed);
  std::vector<int> out;
  for (int spawn : scenario.brigade_spawns) {
    std::vector<int> near{spawn};
    for (const Adjacent& a : map.adjacent(spawn)) {
      near.push_back(a.node);
      for (const Adjacent& b : map.adjacent(a.node)) near.push_back(b.node);
    }
    std::sort(near.begin(), near.end());
    near.erase(std::unique(near.begin(), near.end()), near.end());
    out.push_back(near[static_cast<std::size_t>(rng.below(near.size()))]);
  }
  return out;
}

std::optional<Predictor> default_predictor() {
  try {
    return load_predictor(std::string(FAIS_DATA_DIR) + "/predictor.json");
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

RunReport run(const RunConfig& config) {
  Scenario scenario;
  try {
    scenario = load_scenario_file(config.scenario_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  std::optional<Predictor> predictor;
  if (uses_station(config.strategy) && config.strategy != Strategy::FaisNoPredict) {
    if (config.predictor_path.empty()) {
      predictor = default_predictor();
    } else {
      try {
        predictor = load_predictor(config.predictor_path);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
  }
  return run_scenario(scenario, config, predictor ? &*predictor : nullptr);
}

RunReport run_scenario(const Scenario& base, const RunConfig& config, const Predictor* predictor) {
  Scenario scenario = base;
  Weights& w = scenario.params.weights;
  if (config.weights.alpha) w.alpha = *config.weights.alpha;
  if (config.weights.beta) w.beta = *config.weights.beta;
  if (config.weights.gamma) w.gamma = *config.weights.gamma;
  if (config.weights.margin) w.margin = *config.weights.margin;
  if (config.cycles) {
    if (*config.cycles <= 0) throw ConfigError("cycles must be positive");
    scenario.params.deadline = *config.cycles;
    // openings past a shortened deadline can never happen
    std::erase_if(scenario.road_open_schedule,
                  [&](const ScheduledOpening& op) { return op.cycle > scenario.params.deadline; });
  }
  try {
    scenario.params.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (config.render_every <= 0) throw ConfigError("render interval must be positive");

  const SimParams& params = scenario.params;
  const std::vector<int> spawns = seeded_spawns(scenario, config.seed);
  WorldState state = initial_state(scenario, spawns);
  const int n_brigades = static_cast<int>(spawns.size());

  MessageBus bus({params.brigade_msg_cap, params.station_msg_cap, params.max_payload_bytes});
  const bool with_station = uses_station(config.strategy);
  std::vector<FireBrigade> brigades;
  for (int i = 0; i < n_brigades; ++i) {
    BrigadeConfig bc;
    if (config.strategy == Strategy::Random) {
      bc.mode = TargetMode::Random;
      bc.seed = config.seed;
    }
    brigades.emplace_back(i, scenario, Position::at_node(spawns[static_cast<std::size_t>(i)]), bc);
  }
  std::optional<FireStation> station;
  if (with_station) {
    station.emplace(scenario, spawns, station_config(config.strategy) .prediction ? predictor : nullptr,
                    station_config(config.strategy));
  }
  const Vec2 station_at = station_location(scenario.map);

  RunReport report;
  std::string log = replay_line({{"header",
                                  {{"scenario", scenario_to_json(scenario)},
                                   {"seed", config.seed},
                                   {"strategy", to_string(config.strategy)},
                                   {"spawns", spawns},
                                   {"cycles", params.deadline}}}});

  std::size_t bus_diag_seen = 0;
  std::size_t station_diag_seen = 0;
  if (state.fiery_count() > 0 || !config.stop_when_out) {
    for (int cycle = 0; cycle < params.deadline; ++cycle) {
      nlohmann::json delivered = nlohmann::json::array();
      nlohmann::json diagnostics = nlohmann::json::array();

      if (station) {
        const std::vector<Message> inbox = bus.receive(cycle, kStationId);
        for (const Message& m : inbox) delivered.push_back(to_json(m));
        const auto out = station->step(inbox, perceive_at(state, scenario, station_at), cycle);
        for (const Message& m : out.messages) bus.submit(cycle, m);
      }

      CommandMap commands;
      for (int i = 0; i < n_brigades; ++i) {
        const std::vector<Message> inbox = bus.receive(cycle, i);
        for (const Message& m : inbox) delivered.push_back(to_json(m));
        if (state.brigades[static_cast<std::size_t>(i)].incapacitated()) continue;
        auto out = brigades[static_cast<std::size_t>(i)].step(perceive(state, scenario, i), inbox, cycle);
        commands.emplace(i, std::move(out.command));
        if (station && out.feedback) bus.submit(cycle, std::move(*out.feedback));
      }
      bus.discard_before(cycle);

      StepResult stepped = step(state, commands, scenario);
      const StepEvents& ev = stepped.events;
      for (const auto& d : ev.diagnostics) diagnostics.push_back(d);
      const auto& bus_diag = bus.diagnostics();
      for (; bus_diag_seen < bus_diag.size(); ++bus_diag_seen) diagnostics.push_back(bus_diag[bus_diag_seen]);
      if (station) {
        const auto& sd = station->model().diagnostics;
        for (; station_diag_seen < sd.size(); ++station_diag_seen) diagnostics.push_back(sd[station_diag_seen]);
      }

      nlohmann::json cmds = nlohmann::json::array();
      for (const auto& [id, cmd] : commands) cmds.push_back({id, to_json(cmd)});
      nlohmann::json changes = nlohmann::json::array();
      for (const auto& c : ev.stage_changes) changes.push_back({c.building, c.from, c.to});
      nlohmann::json water = nlohmann::json::array();
      for (const auto& a : ev.water) water.push_back({a.brigade, a.building, a.amount});
      nlohmann::json crew = nlohmann::json::array();
      for (const auto& b : stepped.state.brigades) crew.push_back(brigade_json(b));
      nlohmann::json missions = nlohmann::json::array();
      if (station) {
        for (const Mission& m : station->model().missions) missions.push_back({m.target, m.brigades});
      }

      state = std::move(stepped.state);
      const double score = burnt_ratio(state);
      report.score_trace.push_back(score);
      report.standing_violations += ev.standing_violations;
      log += replay_line({{"cycle", cycle},
                          {"commands", cmds},
                          {"diagnostics", diagnostics},
                          {"ignitions", ev.ignitions},
                          {"stage_changes", changes},
                          {"water", water},
                          {"opened_roads", ev.opened_roads},
                          {"standing_violations", ev.standing_violations},
                          {"messages", delivered},
                          {"brigades", crew},
                          {"missions", missions},
                          {"score", score}});
      ++report.cycles_run;
      if (config.stop_when_out && state.fiery_count() == 0) break;
    }
  }

  report.burnt_ratio = burnt_ratio(state);
  report.messages = bus.stats();
  report.traffic_overflow = station ? station->overflow_total() : 0;
  report.log_sha256 = sha256_hex(log);
  if (!config.log_path.empty()) {
    std::ofstream out(config.log_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write log '" + config.log_path + "'");
    out << log;
    if (!out) throw std::runtime_error("cannot write log '" + config.log_path + "'");
    report.log_path = config.log_path;
  }
  if (!config.render_dir.empty()) report.frames = render(parse_replay(log), config.render_dir, config.render_every);
  report.log = std::move(log);
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<CompareCell> compare(const std::vector<NamedScenario>& scenarios,
                                 const std::vector<Strategy>& strategies, int seeds,
                                 const Predictor* predictor, unsigned threads,
                                 std::optional<int> cycles) {
  if (scenarios.empty()) throw std::invalid_argument("compare needs at least one scenario");
  if (strategies.size() < 2) throw std::invalid_argument("compare needs at least two strategies");
  if (seeds < 1) throw std::invalid_argument("compare needs at least one seed");

  std::vector<CompareCell> cells;
  for (const auto& s : scenarios) {
    for (Strategy st : strategies) {
      CompareCell c{s.name, st, std::vector<double>(static_cast<std::size_t>(seeds)),
                    std::vector<int>(static_cast<std::size_t>(seeds)), 0.0, {}};
      cells.push_back(std::move(c));
    }
  }
  struct Job {
    std::size_t cell;
    std::size_t scenario;
    int seed;
    std::string error;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int k = 1; k <= seeds; ++k) jobs.push_back({c, c / strategies.size(), k, {}});
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      Job& job = jobs[j];
      CompareCell& cell = cells[job.cell];
      RunConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(job.seed);
      cfg.strategy = cell.strategy;
      cfg.cycles = cycles;
      try {
        const RunReport r = run_scenario(scenarios[job.scenario].scenario, cfg, predictor);
        cell.per_seed[static_cast<std::size_t>(job.seed - 1)] = r.burnt_ratio;
        cell.violations[static_cast<std::size_t>(job.seed - 1)] = r.standing_violations;
      } catch (const std::exception& e) {
        job.error = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const Job& job : jobs) {
    if (!job.error.empty() && cells[job.cell].error.empty())
      cells[job.cell].error = "seed " + std::to_string(job.seed) + ": " + job.error;
  }
  for (CompareCell& c : cells) {
    if (c.error.empty()) c.median = median(c.per_seed);
  }
  return cells;
}

std::string compare_text(const std::vector<CompareCell>& cells) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-18s %8s %10s\n", "scenario", "strategy", "median", "violations");
  out << line;
  for (const CompareCell& c : cells) {
    if (!c.error.empty()) {
      std::snprintf(line, sizeof line, "%-24s %-18s   error: ", c.scenario.c_str(), to_string(c.strategy));
      out << line << c.error << "\n";
      continue;
    }
    long total = 0;
    for (int v : c.violations) total += v;
    std::snprintf(line, sizeof line, "%-24s %-18s %8.4f %10ld\n", c.scenario.c_str(), to_string(c.strategy),
                  c.median, total);
    out << line;
  }
  return out.str();
}

nlohmann::json compare_json(const std::vector<CompareCell>& cells) {
  nlohmann::json rows = nlohmann::json::array();
  for (const CompareCell& c : cells) {
    nlohmann::json row = {{"scenario", c.scenario},
                          {"strategy", to_string(c.strategy)},
                          {"per_seed", c.per_seed},
                          {"violations", c.violations}};
    if (c.error.empty()) {
      row["median"] = c.median;
    } else {
      row["error"] = c.error;
    }
    rows.push_back(std::move(row));
  }
  return {{"cells", rows}};
}

} // namespace fais
