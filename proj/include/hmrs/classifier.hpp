#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace hmrs {

struct MlpParams {
  std::size_t hidden = 10;
  std::size_t epochs = 200;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  double init_range = 0.5;  // weights start uniform in [-init_range, init_range]
};

/// input -> logistic hidden layer -> softmax output.
///
/// Weights are row-major: hidden_weights is hidden x inputs, output_weights is
/// outputs x hidden.
struct MlpModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;
  std::vector<double> hidden_weights;
  std::vector<double> hidden_bias;
  std::vector<double> output_weights;
  std::vector<double> output_bias;
  MlpParams params;

  /// All-zero weights of the given shape.
  static MlpModel zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs);

  std::size_t parameter_count() const {
    return hidden_weights.size() + hidden_bias.size() + output_weights.size() + output_bias.size();
  }
};

struct Classification {
  std::size_t cluster = 0;
  std::vector<double> probabilities;
};

/// Same layout as the model's parameter vectors.
struct MlpGradient {
  std::vector<double> hidden_weights;
  std::vector<double> hidden_bias;
  std::vector<double> output_weights;
  std::vector<double> output_bias;
};

/// Mean cross-entropy over the batch and its analytic gradient.
double loss_and_gradient(const MlpModel& model, std::span<const std::vector<double>> features,
                         std::span<const std::size_t> labels, MlpGradient& gradient);

/// Per-sample SGD on cross-entropy, with a fresh shuffle every epoch.
/// Throws ConfigError on empty or mismatched inputs, labels >= n_clusters or
/// hidden == 0.
MlpModel mlp_train(std::span<const std::vector<double>> features,
                   std::span<const std::size_t> labels, std::size_t n_clusters,
                   const MlpParams& params);

/// Argmax of the softmax output, ties to the lowest index.
Classification mlp_classify(const MlpModel& model, std::span<const double> feature);

nlohmann::json to_json(const MlpModel& model);
MlpModel mlp_from_json(const nlohmann::json& doc);

}  // namespace hmrs
