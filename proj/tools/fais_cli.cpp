// Command-line front end: run, compare, gen-city, train-predictor, render.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fais/harness.hpp"

namespace fs = std::filesystem;
using namespace fais;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

std::vector<fs::path> files_in(const std::string& dir, const std::vector<std::string>& extensions) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::vector<Strategy> parse_strategies(const std::string& list) {
  std::vector<Strategy> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(strategy_from_string(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fire brigade coordination simulator"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  std::string strategy_name = "fais";
  int cycles = 0;
  double alpha = 0, beta = 0, gamma = 0, margin = 0;
  auto* run = app.add_subcommand("run", "Simulate one scenario and write its replay log");
  run->add_option("--scenario", run_cfg.scenario_path, "Scenario JSON file")->required();
  run->add_option("--seed", run_cfg.seed, "Seed (0 keeps the scenario's brigade spawns)");
  auto* cycles_opt = run->add_option("--cycles", cycles, "Override the simulation deadline");
  run->add_option("--strategy", strategy_name, "fais, fais-no-critical, fais-no-traffic, "
                                               "fais-no-predict, greedy-nearest or random");
  auto* alpha_opt = run->add_option("--alpha", alpha, "Distance weight");
  auto* beta_opt = run->add_option("--beta", beta, "Unburnt-neighbor weight");
  auto* gamma_opt = run->add_option("--gamma", gamma, "Fire-border weight");
  auto* margin_opt = run->add_option("--margin", margin, "Fire-border strip half-width (m)");
  run->add_option("--log", run_cfg.log_path, "Replay log output (JSON Lines)");
  run->add_option("--render", run_cfg.render_dir, "Directory for SVG frames");
  run->add_option("--render-every", run_cfg.render_every, "Cycles between frames");
  run->add_option("--predictor", run_cfg.predictor_path, "Predictor JSON (default: bundled)");

  std::string scenarios_dir, strategies_list, compare_out;
  int seeds = 20;
  unsigned threads = 0;
  int compare_cycles = 0;
  auto* cmp = app.add_subcommand("compare", "Median burnt ratio per scenario and strategy");
  cmp->add_option("--scenarios", scenarios_dir, "Directory of scenario JSON files")->required();
  cmp->add_option("--strategies", strategies_list, "Comma-separated strategies")->required();
  cmp->add_option("--seeds", seeds, "Seeds 1..K");
  cmp->add_option("--out", compare_out, "JSON table output");
  cmp->add_option("--threads", threads, "Worker threads (0: all cores)");
  auto* cmp_cycles_opt = cmp->add_option("--cycles", compare_cycles, "Override the simulation deadline");

  std::uint64_t city_seed = 1;
  int city_buildings = 50;
  double city_density = 600;
  CityOptions city_opts;
  std::string city_out;
  auto* gen = app.add_subcommand("gen-city", "Generate a random city scenario");
  gen->add_option("--seed", city_seed, "Generator seed");
  gen->add_option("--buildings", city_buildings, "Number of buildings");
  gen->add_option("--density", city_density, "Buildings per square kilometre");
  gen->add_option("--ignitions", city_opts.ignitions, "Initial fires (default: from size)");
  gen->add_option("--brigades", city_opts.brigades, "Fire brigades (default: from size)");
  gen->add_option("--min-area", city_opts.min_area, "Smallest building footprint (m²)");
  gen->add_option("--max-area", city_opts.max_area, "Largest building footprint (m²)");
  gen->add_option("--out", city_out, "Output file")->required();

  std::string logs_dir, predictor_out;
  TrainOptions train_opts;
  int window = 5;
  auto* trn = app.add_subcommand("train-predictor", "Train the ignition and water networks from replay logs");
  trn->add_option("--logs", logs_dir, "Directory of replay logs (*.jsonl)")->required();
  trn->add_option("--out", predictor_out, "Predictor output file")->required();
  trn->add_option("--epochs", train_opts.epochs, "Training epochs");
  trn->add_option("--lr", train_opts.learning_rate, "Learning rate");
  trn->add_option("--seed", train_opts.seed, "Initialization and shuffling seed");
  trn->add_option("--batch", train_opts.batch_size, "Mini-batch size");
  trn->add_option("--window", window, "Ignition look-ahead in cycles");

  std::string render_log, render_out;
  int render_every = 10;
  auto* rnd = app.add_subcommand("render", "Write SVG frames from a replay log");
  rnd->add_option("--log", render_log, "Replay log")->required();
  rnd->add_option("--out", render_out, "Output directory")->required();
  rnd->add_option("--every", render_every, "Cycles between frames");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      run_cfg.strategy = parse_strategies(strategy_name).at(0);
      if (*cycles_opt) run_cfg.cycles = cycles;
      if (*alpha_opt) run_cfg.weights.alpha = alpha;
      if (*beta_opt) run_cfg.weights.beta = beta;
      if (*gamma_opt) run_cfg.weights.gamma = gamma;
      if (*margin_opt) run_cfg.weights.margin = margin;
      const RunReport r = fais::run(run_cfg);
      nlohmann::json summary = {{"burnt_ratio", r.burnt_ratio},
                                {"cycles", r.cycles_run},
                                {"log_sha256", r.log_sha256},
                                {"messages_accepted", r.messages.accepted},
                                {"messages_dropped", r.messages.dropped_cap},
                                {"messages_oversize", r.messages.rejected_oversize},
                                {"traffic_overflow", r.traffic_overflow},
                                {"standing_violations", r.standing_violations}};
      if (!r.log_path.empty()) summary["log"] = r.log_path;
      if (r.frames > 0) summary["frames"] = r.frames;
      std::cout << summary.dump(2) << "\n";
    } else if (*cmp) {
      const auto strategies = parse_strategies(strategies_list);
      std::vector<NamedScenario> scenarios;
      for (const fs::path& p : files_in(scenarios_dir, {".json"})) {
        try {
          scenarios.push_back({p.stem().string(), load_scenario_file(p.string())});
        } catch (const std::exception& e) {
          throw ConfigError(p.string() + ": " + e.what());
        }
      }
      if (scenarios.empty()) throw ConfigError("no scenarios in " + scenarios_dir);
      if (strategies.size() < 2) throw ConfigError("compare needs at least two strategies");
      if (seeds < 1) throw ConfigError("--seeds must be at least 1");
      const auto predictor = default_predictor();
      std::optional<int> c;
      if (*cmp_cycles_opt) c = compare_cycles;
      const auto cells = compare(scenarios, strategies, seeds, predictor ? &*predictor : nullptr, threads, c);
      std::cout << compare_text(cells);
      if (!compare_out.empty()) write_text(compare_out, compare_json(cells).dump(2) + "\n");
    } else if (*gen) {
      if (city_buildings < 2) throw ConfigError("--buildings must be at least 2");
      write_text(city_out, save_scenario(generate_city(city_seed, city_buildings, city_density, city_opts)));
    } else if (*trn) {
      const auto files = files_in(logs_dir, {".jsonl", ".log"});
      if (files.empty()) throw ConfigError("no replay logs in " + logs_dir);
      std::vector<std::string> texts;
      for (const auto& f : files) texts.push_back(slurp(f));
      const TrainingData data = harvest_training_data(texts, window);
      if (data.ignition.empty()) throw ConfigError("logs contain no ignition samples");
      Predictor p;
      auto ign = train(PredictorNet::random({kFeatureCount, 16, 1}, NetKind::Ignition, train_opts.seed),
                       data.ignition, train_opts);
      p.ignition = std::move(ign.net);
      PredictorNet water = PredictorNet::random({kFeatureCount, 16, 1}, NetKind::Water, train_opts.seed + 1);
      water.output_scale = 1000.0;
      if (!data.water.empty()) {
        auto w = train(std::move(water), data.water, train_opts);
        water = std::move(w.net);
      }
      p.water = std::move(water);
      save_predictor(p, predictor_out);
      std::cout << "ignition samples " << data.ignition.size() << ", loss " << ign.loss_trace.front()
                << " -> " << ign.loss_trace.back() << "; water samples " << data.water.size() << "\n";
    } else if (*rnd) {
      if (render_every < 1) throw ConfigError("--every must be at least 1");
      const int frames = render(read_replay_file(render_log), render_out, render_every);
      std::cout << frames << " frames\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
