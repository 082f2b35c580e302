#include "fais/predict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fais/replay.hpp"
#include "fais/rng.hpp"

namespace fais {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_shapes(const PredictorNet& net) {
  if (net.sizes.size() < 2) throw std::invalid_argument("network needs at least two layers");
  if (net.sizes.back() != 1) throw std::invalid_argument("network output must be a single unit");
  if (net.weights.size() + 1 != net.sizes.size() || net.biases.size() + 1 != net.sizes.size())
    throw std::invalid_argument("layer count mismatch");
  for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(net.sizes[l]);
    const auto out = static_cast<std::size_t>(net.sizes[l + 1]);
    if (net.weights[l].size() != in * out || net.biases[l].size() != out)
      throw std::invalid_argument("layer " + std::to_string(l) + " shape mismatch");
  }
}

// Activations per layer; acts[0] is the input, acts.back() holds the raw output.
std::vector<std::vector<double>> activations(const PredictorNet& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_size())
    throw std::invalid_argument("input has " + std::to_string(x.size()) + " features, network expects " +
                                std::to_string(net.input_size()));
  std::vector<std::vector<double>> acts;
  acts.emplace_back(x.begin(), x.end());
  const std::size_t layers = net.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<std::size_t>(net.sizes[l]);
    const auto out = static_cast<std::size_t>(net.sizes[l + 1]);
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = net.biases[l][o];
      for (std::size_t i = 0; i < in; ++i) s += net.weights[l][o * in + i] * acts[l][i];
      z[o] = l + 1 < layers ? sigmoid(s) : s;
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

double sample_loss(const PredictorNet& net, double z, double label) {
  if (net.kind == NetKind::Ignition) return label * softplus(-z) + (1.0 - label) * softplus(z);
  const double d = z - label / net.output_scale;
  return 0.5 * d * d;
}

double output_delta(const PredictorNet& net, double z, double label) {
  if (net.kind == NetKind::Ignition) return sigmoid(z) - label;
  return z - label / net.output_scale;
}

} // namespace

PredictorNet PredictorNet::zeros(std::vector<int> sizes, NetKind kind) {
  PredictorNet net;
  net.kind = kind;
  net.sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(net.sizes[l]);
    const auto out = static_cast<std::size_t>(net.sizes[l + 1]);
    net.weights.emplace_back(in * out, 0.0);
    net.biases.emplace_back(out, 0.0);
  }
  check_shapes(net);
  return net;
}

PredictorNet PredictorNet::random(std::vector<int> sizes, NetKind kind, std::uint64_t seed) {
  PredictorNet net = zeros(std::move(sizes), kind);
  Rng rng(seed);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes[l]));
    for (double& w : net.weights[l]) w = rng.uniform(-bound, bound);
    for (double& b : net.biases[l]) b = rng.uniform(-bound, bound);
  }
  return net;
}

double PredictorNet::forward_raw(std::span<const double> x) const {
  return activations(*this, x).back()[0];
}

double PredictorNet::forward(std::span<const double> x) const {
  const double z = forward_raw(x);
  if (kind == NetKind::Ignition) return sigmoid(z);
  return std::max(0.0, z) * output_scale;
}

std::size_t PredictorNet::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

std::vector<double> PredictorNet::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].begin(), weights[l].end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

void PredictorNet::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("parameter count mismatch");
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (double& w : weights[l]) w = flat[k++];
    for (double& b : biases[l]) b = flat[k++];
  }
}

nlohmann::json to_json(const PredictorNet& net) {
  return {{"kind", net.kind == NetKind::Ignition ? "ignition" : "water"},
          {"sizes", net.sizes},
          {"weights", net.weights},
          {"biases", net.biases},
          {"scale", net.output_scale}};
}

PredictorNet net_from_json(const nlohmann::json& j) {
  PredictorNet net;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ignition") {
    net.kind = NetKind::Ignition;
  } else if (kind == "water") {
    net.kind = NetKind::Water;
  } else {
    throw std::invalid_argument("unknown network kind '" + kind + "'");
  }
  net.sizes = j.at("sizes").get<std::vector<int>>();
  net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  if (j.contains("scale")) net.output_scale = j["scale"].get<double>();
  check_shapes(net);
  for (double p : net.parameters()) {
    if (!std::isfinite(p)) throw std::invalid_argument("network parameter is not finite");
  }
  return net;
}

double mean_loss(const PredictorNet& net, std::span<const Sample> batch) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const Sample& s : batch) total += sample_loss(net, net.forward_raw(s.x), s.label);
  return total / static_cast<double>(batch.size());
}

std::vector<double> loss_gradient(const PredictorNet& net, std::span<const Sample> batch) {
  std::vector<std::vector<double>> gw, gb;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    gw.emplace_back(net.weights[l].size(), 0.0);
    gb.emplace_back(net.biases[l].size(), 0.0);
  }
  const double inv_n = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  const std::size_t layers = net.weights.size();
  for (const Sample& s : batch) {
    const auto acts = activations(net, s.x);
    std::vector<double> delta{output_delta(net, acts.back()[0], s.label) * inv_n};
    for (std::size_t l = layers; l-- > 0;) {
      const auto in = static_cast<std::size_t>(net.sizes[l]);
      const auto out = static_cast<std::size_t>(net.sizes[l + 1]);
      for (std::size_t o = 0; o < out; ++o) {
        gb[l][o] += delta[o];
        for (std::size_t i = 0; i < in; ++i) gw[l][o * in + i] += delta[o] * acts[l][i];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      for (std::size_t i = 0; i < in; ++i) {
        double s_back = 0.0;
        for (std::size_t o = 0; o < out; ++o) s_back += net.weights[l][o * in + i] * delta[o];
        const double a = acts[l][i];
        prev[i] = s_back * a * (1.0 - a);
      }
      delta = std::move(prev);
    }
  }
  std::vector<double> flat;
  for (std::size_t l = 0; l < layers; ++l) {
    flat.insert(flat.end(), gw[l].begin(), gw[l].end());
    flat.insert(flat.end(), gb[l].begin(), gb[l].end());
  }
  return flat;
}

TrainResult train(PredictorNet net, std::span<const Sample> data, const TrainOptions& options) {
  if (data.empty()) throw std::invalid_argument("training dataset is empty");
  check_shapes(net);
  TrainResult result;
  result.loss_trace.push_back(mean_loss(net, data));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  const std::size_t batch_size = static_cast<std::size_t>(std::max(1, options.batch_size));
  std::vector<Sample> batch;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      batch.clear();
      for (std::size_t k = start; k < std::min(order.size(), start + batch_size); ++k)
        batch.push_back(data[order[k]]);
      const std::vector<double> grad = loss_gradient(net, batch);
      std::vector<double> params = net.parameters();
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= options.learning_rate * grad[i];
      net.set_parameters(params);
    }
    const double loss = mean_loss(net, data);
    if (!std::isfinite(loss))
      throw std::runtime_error("training diverged: non-finite loss at epoch " + std::to_string(epoch));
    result.loss_trace.push_back(loss);
  }
  result.net = std::move(net);
  return result;
}

nlohmann::json to_json(const Predictor& p) {
  return {{"ignition", to_json(p.ignition)}, {"water", to_json(p.water)}};
}

Predictor predictor_from_json(const nlohmann::json& j) {
  Predictor p{net_from_json(j.at("ignition")), net_from_json(j.at("water"))};
  if (p.ignition.kind != NetKind::Ignition || p.water.kind != NetKind::Water)
    throw std::invalid_argument("predictor networks have the wrong kinds");
  if (p.ignition.input_size() != kFeatureCount || p.water.input_size() != kFeatureCount)
    throw std::invalid_argument("predictor networks must take 8 features");
  return p;
}

Predictor load_predictor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictor file '" + path + "'");
  return predictor_from_json(nlohmann::json::parse(in));
}

void save_predictor(const Predictor& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write predictor file '" + path + "'");
  out << to_json(p).dump(1) << "\n";
}

// ---------------------------------------------------------------------------

FireKnowledge::FireKnowledge(const CityMap* map, const SimParams* params)
    : map_(map), params_(params), entries_(static_cast<std::size_t>(map->building_count())) {}

const FireKnowledge::Entry& FireKnowledge::at(int b) const {
  if (b < 0 || b >= static_cast<int>(entries_.size()))
    throw std::out_of_range("unknown building " + std::to_string(b));
  return entries_[static_cast<std::size_t>(b)];
}

bool FireKnowledge::observe(int b, int stage, int cycle) {
  at(b);
  Entry& e = entries_[static_cast<std::size_t>(b)];
  if (cycle < e.report_cycle) return false;
  e.stage = stage;
  e.report_cycle = cycle;
  if (is_fiery(stage) && e.fiery_since < 0) e.fiery_since = cycle;
  return true;
}

void FireKnowledge::accumulate_heat() {
  for (int b = 0; b < static_cast<int>(entries_.size()); ++b) {
    if (!is_fiery(entries_[static_cast<std::size_t>(b)].stage)) continue;
    for (int other : map_->buildings_within(map_->building(b).pos, params_->spread_radius)) {
      Entry& e = entries_[static_cast<std::size_t>(other)];
      if (other != b && e.stage == 0) e.heat += params_->spread_power;
    }
  }
}

std::vector<int> FireKnowledge::stages() const {
  std::vector<int> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.push_back(e.stage);
  return out;
}

FeatureVector extract_features(const FireKnowledge& k, int b, int cycle, const FeatureScales& scales) {
  const CityMap& map = k.map();
  if (!map.has_building(b)) throw std::out_of_range("unknown building " + std::to_string(b));
  const Building& bd = map.building(b);
  const SimParams& params = k.params();
  FeatureVector f{};

  int burning = 0;
  int stage3 = 0;
  double nearest_neighbor = -1.0;
  int nearest_age = 0;
  for (int other : map.buildings_within(bd.pos, params.spread_radius)) {
    if (other == b || !is_fiery(k.stage(other))) continue;
    ++burning;
    if (k.stage(other) == 3) ++stage3;
    const double d = distance(bd.pos, map.building(other).pos);
    if (nearest_neighbor < 0 || d < nearest_neighbor) {
      nearest_neighbor = d;
      nearest_age = std::max(0, cycle - k.fiery_since(other));
    }
  }
  double nearest_fire = scales.distance_cap;
  for (int other : map.buildings_within(bd.pos, scales.distance_cap)) {
    if (other != b && is_fiery(k.stage(other)))
      nearest_fire = std::min(nearest_fire, distance(bd.pos, map.building(other).pos));
  }
  const double threshold = bd.broken ? params.ignition_threshold / 2.0 : params.ignition_threshold;

  f[0] = std::min(1.0, burning / scales.neighbor_norm);
  f[1] = std::min(1.0, nearest_fire / scales.distance_cap);
  f[2] = bd.broken ? 1.0 : 0.0;
  f[3] = std::min(1.0, bd.area / scales.area_norm);
  f[4] = std::min(1.0, k.heat_estimate(b) / threshold);
  f[5] = nearest_neighbor < 0 ? 0.0 : std::min(1.0, nearest_age / scales.age_cap);
  f[6] = std::min(1.0, stage3 / scales.neighbor_norm);
  f[7] = bd.is_refuge ? 1.0 : 0.0;
  return f;
}

TrainingData harvest_training_data(const std::vector<std::string>& log_texts, int window) {
  TrainingData data;
  for (const std::string& text : log_texts) {
    const ReplayLog log = parse_replay(text);
    Scenario scenario;
    try {
      scenario = scenario_from_json(log.header.at("scenario"), false);
    } catch (const std::exception& e) {
      throw ReplayError(std::string("replay header: ") + e.what());
    }
    const CityMap& map = scenario.map;
    const auto n = static_cast<std::size_t>(map.building_count());

    std::vector<int> ignited_at(n, -1);
    std::vector<double> water_total(n, 0.0);
    std::vector<int> first_water(n, -1);
    std::vector<char> extinguished(n, 0);
    for (int b : scenario.ignitions) ignited_at[static_cast<std::size_t>(b)] = 0;
    try {
      for (const auto& r : log.records) {
        const int t = r.at("cycle").get<int>();
        for (const auto& b : r.at("ignitions")) ignited_at.at(b.get<std::size_t>()) = t + 1;
        for (const auto& w : r.at("water")) {
          const auto b = w.at(1).get<std::size_t>();
          water_total.at(b) += w.at(2).get<double>();
          if (first_water.at(b) < 0) first_water[b] = t;
        }
        for (const auto& c : r.at("stage_changes")) {
          if (c.at(2).get<int>() == 4) extinguished.at(c.at(0).get<std::size_t>()) = 1;
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ReplayError(std::string("malformed replay record: ") + e.what());
    }

    FireKnowledge knowledge(&map, &scenario.params);
    std::vector<int> stages(n, 0);
    for (int b : scenario.ignitions) stages[static_cast<std::size_t>(b)] = 1;
    for (std::size_t s = 0; s < log.records.size(); ++s) {
      const int t = static_cast<int>(s);
      if (s > 0) {
        for (const auto& c : log.records[s - 1].at("stage_changes"))
          stages.at(c.at(0).get<std::size_t>()) = c.at(2).get<int>();
      }
      for (std::size_t b = 0; b < n; ++b) knowledge.observe(static_cast<int>(b), stages[b], t);
      knowledge.accumulate_heat();
      for (std::size_t b = 0; b < n; ++b) {
        const int id = static_cast<int>(b);
        if (stages[b] == 0) {
          const FeatureVector f = extract_features(knowledge, id, t);
          const bool soon = ignited_at[b] > t && ignited_at[b] <= t + window;
          data.ignition.push_back({{f.begin(), f.end()}, soon ? 1.0 : 0.0});
        }
        if (extinguished[b] && first_water[b] == t) {
          const FeatureVector f = extract_features(knowledge, id, t);
          data.water.push_back({{f.begin(), f.end()}, water_total[b]});
        }
      }
    }
  }
  return data;
}

} // namespace fais
