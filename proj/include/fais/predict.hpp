#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fais/simkernel.hpp"

namespace fais {

enum class NetKind { Ignition, Water };

/// Small fully connected network: logistic hidden layers, and either a
/// sigmoid output (ignition probability) or a linear output clamped at zero
/// (water estimate, in units of output_scale).
struct PredictorNet {
  NetKind kind = NetKind::Ignition;
  std::vector<int> sizes;
  // weights[l] is sizes[l+1] x sizes[l], row-major
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  double output_scale = 1.0;

  static PredictorNet zeros(std::vector<int> sizes, NetKind kind);
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
  static PredictorNet random(std::vector<int> sizes, NetKind kind, std::uint64_t seed);

  int input_size() const { return sizes.empty() ? 0 : sizes.front(); }
  /// Throws std::invalid_argument on an input of the wrong size.
  double forward(std::span<const double> x) const;
  /// Output before clamping and scaling (the quantity the loss sees).
  double forward_raw(std::span<const double> x) const;

  std::size_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  bool operator==(const PredictorNet&) const = default;
};

nlohmann::json to_json(const PredictorNet& net);
PredictorNet net_from_json(const nlohmann::json& j);

struct Sample {
  std::vector<double> x;
  double label = 0.0;
};

/// Mean cross-entropy (ignition) or mean half squared error (water, labels
/// divided by output_scale).
double mean_loss(const PredictorNet& net, std::span<const Sample> batch);
/// Gradient of mean_loss, flattened like parameters().
std::vector<double> loss_gradient(const PredictorNet& net, std::span<const Sample> batch);

struct TrainOptions {
  int epochs = 100;
  double learning_rate = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 1;
};

struct TrainResult {
  PredictorNet net;
  std::vector<double> loss_trace; // initial loss, then the loss after each epoch
};

/// Mini-batch gradient descent, deterministic for a fixed seed and data
/// order. Throws std::invalid_argument on an empty dataset and
/// std::runtime_error when the loss stops being finite.
TrainResult train(PredictorNet net, std::span<const Sample> data, const TrainOptions& options);

/// Ignition and water networks travel together.
struct Predictor {
  PredictorNet ignition;
  PredictorNet water;
};
nlohmann::json to_json(const Predictor& p);
Predictor predictor_from_json(const nlohmann::json& j);
Predictor load_predictor(const std::string& path);
void save_predictor(const Predictor& p, const std::string& path);

// ---------------------------------------------------------------------------
// Station-side fire knowledge and feature preparation

inline constexpr int kFeatureCount = 8;
using FeatureVector = std::array<double, kFeatureCount>;

struct FeatureScales {
  double distance_cap = 200.0;
  double area_norm = 1000.0;
  double neighbor_norm = 8.0;
  double age_cap = 20.0;
};

/// What the station believes about every building's fire state. Static map
/// attributes (area, brokenness, refuges) are known from the city map;
/// stages come only from reports and the station's own sight.
class FireKnowledge {
 public:
  FireKnowledge() = default;
  FireKnowledge(const CityMap* map, const SimParams* params);

  const CityMap& map() const { return *map_; }
  const SimParams& params() const { return *params_; }
  /// Stage last reported; 0 when never reported.
  int stage(int b) const { return at(b).stage; }
  int report_cycle(int b) const { return at(b).report_cycle; }
  bool known(int b) const { return at(b).report_cycle >= 0; }
  /// First cycle the building was known to burn, or -1.
  int fiery_since(int b) const { return at(b).fiery_since; }
  double heat_estimate(int b) const { return at(b).heat; }

  /// Newest report wins; a report older than the current knowledge is ignored.
  bool observe(int b, int stage, int cycle);
  /// Once per cycle: every known-unburnt building gains spread_power per
  /// known-burning building within spread_radius.
  void accumulate_heat();

  std::vector<int> stages() const;

 private:
  struct Entry {
    int stage = 0;
    int report_cycle = -1;
    int fiery_since = -1;
    double heat = 0.0;
  };
  const Entry& at(int b) const;

  const CityMap* map_ = nullptr;
  const SimParams* params_ = nullptr;
  std::vector<Entry> entries_;
};

/// The eight [0,1] features: burning neighbors, distance to nearest fire,
/// broken, area, heat/threshold, age of nearest neighboring fire, stage-3
/// neighbors, refuge. Throws std::out_of_range for an unknown building.
FeatureVector extract_features(const FireKnowledge& knowledge, int b, int cycle,
                               const FeatureScales& scales = {});

struct TrainingData {
  std::vector<Sample> ignition;
  std::vector<Sample> water;
};

/// Replays ground-truth logs through an all-seeing FireKnowledge. Ignition
/// label at cycle t: the building ignites within (t, t + window]. Water
/// label: total water applied to a building that ended extinguished,
/// sampled at the cycle of its first application.
TrainingData harvest_training_data(const std::vector<std::string>& log_texts, int window = 5);

} // namespace fais
