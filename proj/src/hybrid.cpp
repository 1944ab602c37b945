#include "hmrs/hybrid.hpp"

#include <algorithm>
#include <string>

#include "hmrs/errors.hpp"

namespace hmrs {

std::vector<FeatureVector> segment_features(const RatingMatrix& segment, const MovieCatalog& movies) {
  const auto users = segment.users();
  const GenreMatrix genres = build_genre_matrix(segment, movies, users);
  std::vector<FeatureVector> out;
  out.reserve(genres.size());
  for (const auto& p : genres.rows()) out.push_back({p.user, p.feature()});
  return out;
}

namespace {

void finish_clusters(SegmentModel& model, const RatingMatrix& segment, const MovieCatalog& movies) {
  model.cluster_genres.clear();
  for (const auto& members : model.members)
    model.cluster_genres.push_back(build_genre_matrix(segment, movies, members));
}

}  // namespace

SegmentModel train_segment_model(const RatingMatrix& segment, const MovieCatalog& movies,
                                 const OfflineOptions& options) {
  const auto features = segment_features(segment, movies);
  if (features.empty()) throw DataError("segment has no rated users to cluster");

  SegmentModel model;
  model.clustered = true;
  model.bypass_mlp = options.bypass_mlp;
  model.som = som_train(features, options.som);

  std::vector<std::vector<double>> inputs;
  std::vector<std::size_t> labels;
  inputs.reserve(features.size());
  labels.reserve(features.size());
  model.members.assign(model.som.clusters(), {});
  for (const auto& f : features) {
    const auto c = som_assign(model.som, f.values);
    inputs.push_back(f.values);
    labels.push_back(c);
    model.members[c].push_back(f.user);
  }
  model.mlp = mlp_train(inputs, labels, model.som.clusters(), options.mlp);
  finish_clusters(model, segment, movies);
  return model;
}

SegmentModel single_cluster_model(const RatingMatrix& segment, const MovieCatalog& movies) {
  SegmentModel model;
  model.clustered = false;
  const auto users = segment.users();
  model.members.emplace_back(users.begin(), users.end());
  finish_clusters(model, segment, movies);
  return model;
}

// ---------------------------------------------------------------------------

HybridRecommender::HybridRecommender(const RatingMatrix& segment, const MovieCatalog& movies,
                                     std::shared_ptr<const SegmentModel> model,
                                     OnlineOptions options)
    : segment_(segment), movies_(movies), model_(std::move(model)), options_(options) {
  if (!model_ || model_->clusters() == 0) throw ConfigError("recommender needs at least one cluster");
  for (const auto& members : model_->members) {
    // Cluster rows are copies of the segment rows, so only k_z differs.
    cluster_matrices_.push_back(members.empty()
                                    ? std::make_shared<const RatingMatrix>()
                                    : std::make_shared<const RatingMatrix>(segment_.restrict(members)));
    caches_.push_back(std::make_unique<SimilarityCache>());
  }
}

std::size_t HybridRecommender::classify(UserId user) const {
  if (!model_->clustered) return 0;
  std::vector<double> feature(kPopularGenreCount, 0.0);
  if (segment_.has_user(user)) feature = genre_profile(segment_, movies_, user).feature();
  if (model_->bypass_mlp) return som_assign(model_->som, feature);
  return mlp_classify(model_->mlp, feature).cluster;
}

HybridRecommender::ActiveUser HybridRecommender::activate(UserId user) const {
  ActiveUser a;
  a.user = user;
  a.cluster = classify(user);
  const auto& members = model_->members[a.cluster];
  a.genres = &model_->cluster_genres[a.cluster];

  const bool member = std::binary_search(members.begin(), members.end(), user);
  SimilarityCache* cache = nullptr;
  if (member || !segment_.has_user(user)) {
    a.matrix = cluster_matrices_[a.cluster];
    if (member) cache = caches_[a.cluster].get();
  } else {
    // Classified into a cluster the SOM did not put them in: join it for this query.
    std::vector<UserId> joined(members);
    joined.insert(std::upper_bound(joined.begin(), joined.end(), user), user);
    a.matrix = std::make_shared<const RatingMatrix>(segment_.restrict(joined));
  }

  NeighborOptions opts = options_.neighbors;
  if (options_.ra_degrees == RaDegreeSource::Segment) {
    opts.degrees = &segment_;
    // Scores then depend only on the segment, so the pair memo is shared.
    cache = member ? caches_[a.cluster].get() : nullptr;
  }
  a.neighbors = select_neighbors(*a.matrix, members, user, opts, cache);
  return a;
}

Prediction HybridRecommender::predict(const ActiveUser& active, MovieId movie) const {
  if (!active.matrix->has_user(active.user)) {
    // No ratings in this segment at all.
    movies_.at(movie);
    const double mean = segment_.global_mean();
    return {active.user, movie, std::clamp(mean, kMinRating, kMaxRating), mean,
            Provenance::FallbackGlobalMean};
  }
  return predict_rating(*active.matrix, active.neighbors, active.user, movie, movies_, active.genres);
}

std::vector<Prediction> HybridRecommender::recommend(UserId user, std::size_t k) const {
  if (k == 0) throw ConfigError("K must be >= 1");
  const auto active = activate(user);
  std::vector<Prediction> predictions;
  for (const auto& movie : movies_.movies()) {
    if (segment_.rating(user, movie.id)) continue;
    predictions.push_back(predict(active, movie.id));
  }
  if (predictions.empty()) return predictions;
  return top_k(std::move(predictions), k);
}

}  // namespace hmrs
