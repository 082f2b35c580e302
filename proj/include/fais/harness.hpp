#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fais/msgbus.hpp"
#include "fais/predict.hpp"
#include "fais/replay.hpp"
#include "fais/world.hpp"

namespace fais {

enum class Strategy { Fais, FaisNoCritical, FaisNoTraffic, FaisNoPredict, GreedyNearest, Random };

const char* to_string(Strategy s);
/// Throws std::invalid_argument for an unrecognized name.
Strategy strategy_from_string(std::string_view name);
std::vector<Strategy> all_strategies();

struct WeightOverrides {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> margin;
};

struct RunConfig {
  std::string scenario_path;
  std::uint64_t seed = 0;
  std::optional<int> cycles; // overrides the scenario deadline
  Strategy strategy = Strategy::Fais;
  WeightOverrides weights;
  std::string log_path;   // empty: keep the log in memory only
  std::string render_dir; // empty: no frames
  int render_every = 10;
  std::string predictor_path; // empty: the bundled predictor, when present
  bool stop_when_out = true;  // end the run once nothing is burning
};

struct RunReport {
  double burnt_ratio = 0.0;
  std::vector<double> score_trace; // after each simulated cycle
  BusStats messages;
  int traffic_overflow = 0;
  int standing_violations = 0;
  int cycles_run = 0;
  std::string log_path;
  std::string log;
  std::string log_sha256;
  int frames = 0;
};

/// Configuration problems (bad strategy, bad override, unreadable scenario).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Brigade start junctions for a seed: seed 0 keeps the scenario's spawns,
/// any other seed moves each one to a random junction within two hops.
std::vector<int> seeded_spawns(const Scenario& scenario, std::uint64_t seed);

/// Loads the scenario (ConfigError on failure) and runs it.
RunReport run(const RunConfig& config);
/// Runs an in-memory scenario; `predictor` may be null.
RunReport run_scenario(const Scenario& scenario, const RunConfig& config, const Predictor* predictor);

/// The predictor shipped in data/, if it can be read.
std::optional<Predictor> default_predictor();

std::string sha256_hex(std::string_view bytes);

struct CompareCell {
  std::string scenario;
  Strategy strategy;
  std::vector<double> per_seed; // burnt ratio for seeds 1..K
  std::vector<int> violations;  // standing-cap violations per seed
  double median = 0.0;
  std::string error; // non-empty when a run failed; the cell has no median
};

struct NamedScenario {
  std::string name;
  Scenario scenario;
};

/// Every (scenario, strategy, seed) combination, seeds 1..seeds, run on up
/// to `threads` workers. Throws std::invalid_argument on an empty scenario
/// list or fewer than two strategies.
std::vector<CompareCell> compare(const std::vector<NamedScenario>& scenarios,
                                 const std::vector<Strategy>& strategies, int seeds,
                                 const Predictor* predictor, unsigned threads = 0,
                                 std::optional<int> cycles = std::nullopt);

double median(std::vector<double> values);
std::string compare_text(const std::vector<CompareCell>& cells);
nlohmann::json compare_json(const std::vector<CompareCell>& cells);

/// SVG frame for every `every`-th cycle of a replay log, written as
/// frame_00000.svg and so on. Returns the frame count. Throws ReplayError
/// on a malformed log.
int render(const ReplayLog& log, const std::string& out_dir, int every = 10);
/// One frame as SVG text.
std::string render_frame(const ReplayLog& log, int cycle);

} // namespace fais
