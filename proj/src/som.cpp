#include "hmrs/som.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "hmrs/errors.hpp"
#include "hmrs/random.hpp"

namespace hmrs {
namespace {

constexpr int kFormatVersion = 1;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

std::size_t best_matching_unit(const std::vector<std::vector<double>>& prototypes,
                               std::span<const double> x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    const double d = squared_distance(prototypes[j], x);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

}  // namespace

SomModel som_train(std::span<const FeatureVector> features, const SomParams& params) {
  if (features.empty()) throw ConfigError("som_train: empty feature list");
  if (params.clusters == 0) throw ConfigError("som_train: clusters must be >= 1");
  if (params.epochs == 0) throw ConfigError("som_train: epochs must be >= 1");
  const std::size_t dim = features.front().values.size();
  if (dim == 0) throw ConfigError("som_train: zero-dimensional features");
  for (const auto& f : features)
    if (f.values.size() != dim) throw ConfigError("som_train: ragged feature dimensions");

  Rng rng(params.seed);
  SomModel model;
  model.dim = dim;
  model.params = params;
  model.prototypes.assign(params.clusters, std::vector<double>(dim));
  for (auto& p : model.prototypes)
    for (auto& w : p) w = rng.uniform(params.init_low, params.init_high);

  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double epochs = static_cast<double>(params.epochs);
  const double radius0 = params.effective_radius();

  for (std::size_t t = 0; t < params.epochs; ++t) {
    const double decay = std::exp(-static_cast<double>(t) / epochs);
    const double lr = params.learning_rate * decay;
    const double sigma = radius0 * decay;
    const double two_sigma_sq = 2.0 * sigma * sigma;
    rng.shuffle(std::span<std::size_t>(order));
    for (const std::size_t idx : order) {
      const auto& x = features[idx].values;
      const std::size_t bmu = best_matching_unit(model.prototypes, x);
      for (std::size_t j = 0; j < model.prototypes.size(); ++j) {
        const double grid = static_cast<double>(j) - static_cast<double>(bmu);
        const double h = std::exp(-(grid * grid) / two_sigma_sq);
        auto& w = model.prototypes[j];
        for (std::size_t k = 0; k < dim; ++k) w[k] += lr * h * (x[k] - w[k]);
      }
    }
  }
  return model;
}

std::size_t som_assign(const SomModel& model, std::span<const double> feature) {
  if (feature.size() != model.dim)
    throw ConfigError("som_assign: feature has " + std::to_string(feature.size()) +
                      " dimensions, model expects " + std::to_string(model.dim));
  return best_matching_unit(model.prototypes, feature);
}

double quantization_error(const SomModel& model, std::span<const FeatureVector> features) {
  if (features.empty()) return 0.0;
  double total = 0.0;
  for (const auto& f : features) {
    const auto bmu = som_assign(model, f.values);
    total += std::sqrt(squared_distance(model.prototypes[bmu], f.values));
  }
  return total / static_cast<double>(features.size());
}

nlohmann::json to_json(const SomModel& model) {
  return {
      {"format", "hmrs.som"},
      {"version", kFormatVersion},
      {"grid", {1, model.prototypes.size()}},
      {"dim", model.dim},
      {"prototypes", model.prototypes},
      {"params",
       {{"clusters", model.params.clusters},
        {"epochs", model.params.epochs},
        {"learning_rate", model.params.learning_rate},
        {"radius", model.params.effective_radius()},
        {"seed", model.params.seed},
        {"init_low", model.params.init_low},
        {"init_high", model.params.init_high}}},
  };
}

SomModel som_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "hmrs.som") throw DataError("not a SOM model document");
    if (doc.at("version").get<int>() != kFormatVersion)
      throw DataError("unsupported SOM model version");
    SomModel m;
    m.dim = doc.at("dim").get<std::size_t>();
    m.prototypes = doc.at("prototypes").get<std::vector<std::vector<double>>>();
    const auto& p = doc.at("params");
    m.params.clusters = p.at("clusters").get<std::size_t>();
    m.params.epochs = p.at("epochs").get<std::size_t>();
    m.params.learning_rate = p.at("learning_rate").get<double>();
    m.params.radius = p.at("radius").get<double>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.params.init_low = p.at("init_low").get<double>();
    m.params.init_high = p.at("init_high").get<double>();
    if (m.prototypes.size() != m.params.clusters || m.prototypes.empty())
      throw DataError("SOM model: prototype count does not match grid");
    for (const auto& proto : m.prototypes)
      if (proto.size() != m.dim) throw DataError("SOM model: prototype dimension mismatch");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("SOM model: ") + e.what());
  }
}

}  // namespace hmrs
