#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmrs/rating_matrix.hpp"

namespace hmrs {

struct FeatureVector {
  UserId user = 0;
  std::vector<double> values;
};

struct SomParams {
  std::size_t clusters = 2;
  std::size_t epochs = 50;
  double learning_rate = 0.5;
  /// Initial Gaussian neighbourhood width in grid units; <= 0 means clusters / 2.
  double radius = 0.0;
  std::uint64_t seed = 0;
  /// Prototypes start uniform in [init_low, init_high]^dim.
  double init_low = 0.0;
  double init_high = 5.0;

  double effective_radius() const {
    return radius > 0.0 ? radius : static_cast<double>(clusters) / 2.0;
  }
};

/// Kohonen map on a 1 x N line of prototypes.
struct SomModel {
  std::size_t dim = 0;
  std::vector<std::vector<double>> prototypes;
  SomParams params;

  std::size_t clusters() const noexcept { return prototypes.size(); }
};

/// Online training: each epoch visits the features in a fresh shuffled order
/// and pulls every prototype toward the sample, scaled by a Gaussian of its
/// grid distance to the best matching unit. Learning rate and radius decay as
/// value0 * exp(-epoch / epochs). Throws ConfigError on empty input, zero
/// clusters or epochs, or ragged feature dimensions. More clusters than
/// features is allowed.
SomModel som_train(std::span<const FeatureVector> features, const SomParams& params);

/// Nearest prototype by Euclidean distance; ties go to the lowest index.
/// Throws ConfigError on dimension mismatch.
std::size_t som_assign(const SomModel& model, std::span<const double> feature);

/// Mean Euclidean distance from each feature to its best matching unit.
double quantization_error(const SomModel& model, std::span<const FeatureVector> features);

nlohmann::json to_json(const SomModel& model);
/// Throws DataError on a malformed or wrong-version document.
SomModel som_from_json(const nlohmann::json& doc);

}  // namespace hmrs
