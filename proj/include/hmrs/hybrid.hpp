#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hmrs/cf.hpp"
#include "hmrs/classifier.hpp"
#include "hmrs/ingest.hpp"
#include "hmrs/profiles.hpp"
#include "hmrs/som.hpp"

namespace hmrs {

struct OfflineOptions {
  SomParams som;
  MlpParams mlp;
  /// Route active users with the SOM's nearest prototype instead of the MLP.
  bool bypass_mlp = false;
};

/// Output of the offline phase for one demographic segment.
struct SegmentModel {
  bool clustered = true;
  bool bypass_mlp = false;
  SomModel som;
  MlpModel mlp;
  std::vector<std::vector<UserId>> members;  // per cluster, ascending ids
  std::vector<GenreMatrix> cluster_genres;   // one R' matrix per cluster

  std::size_t clusters() const noexcept { return members.size(); }
};

/// Genre-profile features for every user of `segment`, ascending user id.
std::vector<FeatureVector> segment_features(const RatingMatrix& segment, const MovieCatalog& movies);

/// Clusters the segment's users with a SOM over their genre profiles, trains
/// the MLP on the SOM labels and builds each cluster's genre matrix.
SegmentModel train_segment_model(const RatingMatrix& segment, const MovieCatalog& movies,
                                 const OfflineOptions& options);

/// A single cluster holding every user, for the unclustered baselines.
SegmentModel single_cluster_model(const RatingMatrix& segment, const MovieCatalog& movies);

enum class RaDegreeSource {
  Cluster,  // k_z over the active user's cluster
  Segment,  // k_z over the whole segment
};

struct OnlineOptions {
  NeighborOptions neighbors;
  RaDegreeSource ra_degrees = RaDegreeSource::Cluster;
};

/// Online phase over one segment: classify, pick neighbours inside the
/// cluster, predict. Keeps references to `segment` and `movies`; both must
/// outlive the recommender. Safe to use from several threads.
class HybridRecommender {
 public:
  HybridRecommender(const RatingMatrix& segment, const MovieCatalog& movies,
                    std::shared_ptr<const SegmentModel> model, OnlineOptions options = {});

  struct ActiveUser {
    UserId user = 0;
    std::size_t cluster = 0;
    std::shared_ptr<const RatingMatrix> matrix;  // cluster ratings, active user included
    NeighborSet neighbors;
    const GenreMatrix* genres = nullptr;
  };

  /// Cluster for a user, from the profile of their rows in the segment matrix.
  std::size_t classify(UserId user) const;

  ActiveUser activate(UserId user) const;
  Prediction predict(const ActiveUser& active, MovieId movie) const;

  /// Top-k over every catalog movie the user has not rated.
  std::vector<Prediction> recommend(UserId user, std::size_t k) const;

  const SegmentModel& model() const noexcept { return *model_; }
  const RatingMatrix& cluster_matrix(std::size_t c) const { return *cluster_matrices_.at(c); }

 private:
  const RatingMatrix& segment_;
  const MovieCatalog& movies_;
  std::shared_ptr<const SegmentModel> model_;
  OnlineOptions options_;
  std::vector<std::shared_ptr<const RatingMatrix>> cluster_matrices_;
  std::vector<std::unique_ptr<SimilarityCache>> caches_;
};

}  // namespace hmrs
