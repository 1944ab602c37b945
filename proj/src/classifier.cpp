#include "hmrs/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hmrs/errors.hpp"
#include "hmrs/random.hpp"

namespace hmrs {
namespace {

constexpr int kFormatVersion = 1;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Activations {
  std::vector<double> hidden;
  std::vector<double> probabilities;
};

void forward(const MlpModel& m, std::span<const double> x, Activations& a) {
  a.hidden.resize(m.hidden);
  a.probabilities.resize(m.outputs);
  for (std::size_t h = 0; h < m.hidden; ++h) {
    double z = m.hidden_bias[h];
    const double* w = &m.hidden_weights[h * m.inputs];
    for (std::size_t i = 0; i < m.inputs; ++i) z += w[i] * x[i];
    a.hidden[h] = logistic(z);
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < m.outputs; ++o) {
    double z = m.output_bias[o];
    const double* w = &m.output_weights[o * m.hidden];
    for (std::size_t h = 0; h < m.hidden; ++h) z += w[h] * a.hidden[h];
    a.probabilities[o] = z;
    max_logit = std::max(max_logit, z);
  }
  double total = 0.0;
  for (auto& p : a.probabilities) {
    p = std::exp(p - max_logit);
    total += p;
  }
  for (auto& p : a.probabilities) p /= total;
}

// Accumulates d(-log p[label])/dtheta into g.
void backward(const MlpModel& m, std::span<const double> x, std::size_t label,
              const Activations& a, MlpGradient& g, std::vector<double>& delta_hidden) {
  delta_hidden.assign(m.hidden, 0.0);
  for (std::size_t o = 0; o < m.outputs; ++o) {
    const double delta = a.probabilities[o] - (o == label ? 1.0 : 0.0);
    g.output_bias[o] += delta;
    double* gw = &g.output_weights[o * m.hidden];
    const double* w = &m.output_weights[o * m.hidden];
    for (std::size_t h = 0; h < m.hidden; ++h) {
      gw[h] += delta * a.hidden[h];
      delta_hidden[h] += delta * w[h];
    }
  }
  for (std::size_t h = 0; h < m.hidden; ++h) {
    const double d = delta_hidden[h] * a.hidden[h] * (1.0 - a.hidden[h]);
    g.hidden_bias[h] += d;
    double* gw = &g.hidden_weights[h * m.inputs];
    for (std::size_t i = 0; i < m.inputs; ++i) gw[i] += d * x[i];
  }
}

void zero_like(const MlpModel& m, MlpGradient& g) {
  g.hidden_weights.assign(m.hidden_weights.size(), 0.0);
  g.hidden_bias.assign(m.hidden_bias.size(), 0.0);
  g.output_weights.assign(m.output_weights.size(), 0.0);
  g.output_bias.assign(m.output_bias.size(), 0.0);
}

void check_feature(const MlpModel& m, std::span<const double> x) {
  if (x.size() != m.inputs)
    throw ConfigError("classifier: feature has " + std::to_string(x.size()) +
                      " dimensions, model expects " + std::to_string(m.inputs));
}

}  // namespace

MlpModel MlpModel::zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs) {
  MlpModel m;
  m.inputs = inputs;
  m.hidden = hidden;
  m.outputs = outputs;
  m.hidden_weights.assign(hidden * inputs, 0.0);
  m.hidden_bias.assign(hidden, 0.0);
  m.output_weights.assign(outputs * hidden, 0.0);
  m.output_bias.assign(outputs, 0.0);
  m.params.hidden = hidden;
  return m;
}

double loss_and_gradient(const MlpModel& model, std::span<const std::vector<double>> features,
                         std::span<const std::size_t> labels, MlpGradient& gradient) {
  if (features.empty() || features.size() != labels.size())
    throw ConfigError("loss_and_gradient: features and labels must be nonempty and equal length");
  zero_like(model, gradient);
  Activations a;
  std::vector<double> scratch;
  double loss = 0.0;
  for (std::size_t n = 0; n < features.size(); ++n) {
    check_feature(model, features[n]);
    forward(model, features[n], a);
    loss -= std::log(std::max(a.probabilities[labels[n]], 1e-300));
    backward(model, features[n], labels[n], a, gradient, scratch);
  }
  const double scale = 1.0 / static_cast<double>(features.size());
  for (auto* v : {&gradient.hidden_weights, &gradient.hidden_bias, &gradient.output_weights,
                  &gradient.output_bias})
    for (auto& x : *v) x *= scale;
  return loss * scale;
}

MlpModel mlp_train(std::span<const std::vector<double>> features,
                   std::span<const std::size_t> labels, std::size_t n_clusters,
                   const MlpParams& params) {
  if (features.empty()) throw ConfigError("mlp_train: empty training set");
  if (features.size() != labels.size())
    throw ConfigError("mlp_train: feature and label counts differ");
  if (n_clusters == 0) throw ConfigError("mlp_train: n_clusters must be >= 1");
  if (params.hidden == 0) throw ConfigError("mlp_train: hidden must be >= 1");
  for (const auto l : labels)
    if (l >= n_clusters)
      throw ConfigError("mlp_train: label " + std::to_string(l) + " out of range");
  const std::size_t inputs = features.front().size();
  for (const auto& f : features)
    if (f.size() != inputs) throw ConfigError("mlp_train: ragged feature dimensions");

  MlpModel m = MlpModel::zeros(inputs, params.hidden, n_clusters);
  m.params = params;
  Rng rng(params.seed);
  for (auto* v : {&m.hidden_weights, &m.hidden_bias, &m.output_weights, &m.output_bias})
    for (auto& w : *v) w = rng.uniform(-params.init_range, params.init_range);

  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Activations a;
  MlpGradient g;
  std::vector<double> scratch;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (const std::size_t n : order) {
      zero_like(m, g);
      forward(m, features[n], a);
      backward(m, features[n], labels[n], a, g, scratch);
      const double lr = params.learning_rate;
      for (std::size_t i = 0; i < g.hidden_weights.size(); ++i) m.hidden_weights[i] -= lr * g.hidden_weights[i];
      for (std::size_t i = 0; i < g.hidden_bias.size(); ++i) m.hidden_bias[i] -= lr * g.hidden_bias[i];
      for (std::size_t i = 0; i < g.output_weights.size(); ++i) m.output_weights[i] -= lr * g.output_weights[i];
      for (std::size_t i = 0; i < g.output_bias.size(); ++i) m.output_bias[i] -= lr * g.output_bias[i];
    }
  }
  return m;
}

Classification mlp_classify(const MlpModel& model, std::span<const double> feature) {
  check_feature(model, feature);
  Activations a;
  forward(model, feature, a);
  Classification c;
  c.cluster = static_cast<std::size_t>(
      std::max_element(a.probabilities.begin(), a.probabilities.end()) - a.probabilities.begin());
  c.probabilities = std::move(a.probabilities);
  return c;
}

nlohmann::json to_json(const MlpModel& m) {
  return {
      {"format", "hmrs.mlp"},
      {"version", kFormatVersion},
      {"layers", {m.inputs, m.hidden, m.outputs}},
      {"activation", {{"hidden", "logistic"}, {"output", "softmax"}}},
      {"hidden_weights", m.hidden_weights},
      {"hidden_bias", m.hidden_bias},
      {"output_weights", m.output_weights},
      {"output_bias", m.output_bias},
      {"params",
       {{"hidden", m.params.hidden},
        {"epochs", m.params.epochs},
        {"learning_rate", m.params.learning_rate},
        {"seed", m.params.seed},
        {"init_range", m.params.init_range}}},
  };
}

MlpModel mlp_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "hmrs.mlp") throw DataError("not an MLP model document");
    if (doc.at("version").get<int>() != kFormatVersion)
      throw DataError("unsupported MLP model version");
    const auto layers = doc.at("layers").get<std::vector<std::size_t>>();
    if (layers.size() != 3) throw DataError("MLP model: expected three layer sizes");
    MlpModel m = MlpModel::zeros(layers[0], layers[1], layers[2]);
    m.hidden_weights = doc.at("hidden_weights").get<std::vector<double>>();
    m.hidden_bias = doc.at("hidden_bias").get<std::vector<double>>();
    m.output_weights = doc.at("output_weights").get<std::vector<double>>();
    m.output_bias = doc.at("output_bias").get<std::vector<double>>();
    if (m.hidden_weights.size() != m.hidden * m.inputs || m.hidden_bias.size() != m.hidden ||
        m.output_weights.size() != m.outputs * m.hidden || m.output_bias.size() != m.outputs)
      throw DataError("MLP model: weight shapes do not match layers");
    const auto& p = doc.at("params");
    m.params.hidden = p.at("hidden").get<std::size_t>();
    m.params.epochs = p.at("epochs").get<std::size_t>();
    m.params.learning_rate = p.at("learning_rate").get<double>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.params.init_range = p.at("init_range").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("MLP model: ") + e.what());
  }
}

}  // namespace hmrs
