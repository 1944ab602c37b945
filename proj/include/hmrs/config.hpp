#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hmrs/eval.hpp"
#include "hmrs/hybrid.hpp"
#include "hmrs/ingest.hpp"

namespace hmrs {

/// Effective settings for every command. Keys in files and flags are the flat
/// dotted names listed by config_keys(); flags override the file, which
/// overrides the defaults below.
struct Config {
  std::filesystem::path data_dir = "data/ml-100k";
  std::filesystem::path ratings_path;  // empty: data_dir/u.data
  std::filesystem::path users_path;    // empty: data_dir/u.user
  std::filesystem::path movies_path;   // empty: data_dir/u.item

  std::vector<Segment> segments{std::begin(kAllSegments), std::end(kAllSegments)};
  bool strict_age = false;

  std::size_t clusters = 2;
  std::size_t som_epochs = 50;
  double som_lr0 = 0.5;
  double som_radius0 = 0.0;  // 0: clusters / 2

  std::size_t mlp_hidden = 10;
  std::size_t mlp_epochs = 200;
  double mlp_lr = 0.1;
  bool mlp_bypass = false;

  double threshold = kDefaultPreferredThreshold;
  NeighborRule neighbor_rule = NeighborRule::Half;
  RaDegreeSource ra_degrees = RaDegreeSource::Cluster;

  std::size_t top_k = 10;
  std::size_t folds = 5;
  std::size_t repeats = 10;
  std::size_t threads = 0;
  std::uint64_t seed = 20201120;
  std::filesystem::path output_dir = "out";

  std::filesystem::path ratings() const { return ratings_path.empty() ? data_dir / "u.data" : ratings_path; }
  std::filesystem::path users() const { return users_path.empty() ? data_dir / "u.user" : users_path; }
  std::filesystem::path movies() const { return movies_path.empty() ? data_dir / "u.item" : movies_path; }

  /// Throws ConfigError describing the first out-of-range field.
  void validate() const;
};

/// Every accepted flat key, in documentation order.
const std::vector<std::string>& config_keys();

nlohmann::json to_json(const Config& config);

/// Applies the keys present in a flat JSON object. Unknown keys and wrongly
/// typed values throw ConfigError.
void apply_json(Config& config, const nlohmann::json& flat);

/// Applies one key given as command-line text (lists are comma-separated).
void apply_override(Config& config, std::string_view key, std::string_view text);

Config load_config_file(const std::filesystem::path& path, Config base = {});

ExperimentConfig experiment_config(const Config& config);

/// Offline options for training a segment outside the evaluation protocol;
/// seeds come from "som/<segment>" and "mlp/<segment>".
OfflineOptions offline_options(const Config& config, Segment segment);

OnlineOptions online_options(const Config& config);

}  // namespace hmrs
