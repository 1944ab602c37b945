#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hmrs/ingest.hpp"
#include "hmrs/profiles.hpp"
#include "hmrs/rating_matrix.hpp"

namespace hmrs {

enum class SimilarityKernel {
  Pearson,  // mean-centred over co-rated items, means over each user's whole row
  Cosine,   // raw ratings over co-rated items
};

struct SimilarityScore {
  UserId u = 0;
  UserId v = 0;
  double sim = 0.0;
  double ra_weight = 0.0;
  std::size_t co_rated = 0;
};

/// Pearson correlation over I_u ∩ I_v with μ taken over each user's full row.
/// 0 when nothing is co-rated or either deviation norm vanishes. Throws
/// DataError if either user is absent or u == v.
double pearson_sim(const RatingMatrix& matrix, UserId u, UserId v);

double cosine_sim(const RatingMatrix& matrix, UserId u, UserId v);

/// Resource-allocation weight: sum over co-rated movies z of 1 / k_z, where
/// k_z counts the raters of z in `matrix`.
double ra_weight(const RatingMatrix& matrix, UserId u, UserId v);

/// One merge pass computing similarity, RA weight and co-rated count.
/// `degrees` supplies k_z (defaults to `matrix`).
SimilarityScore score_pair(const RatingMatrix& matrix, UserId u, UserId v,
                           SimilarityKernel kernel = SimilarityKernel::Pearson,
                           const RatingMatrix* degrees = nullptr);

/// Memo of pair scores for one (matrix, kernel, degrees) triple. Lookups take
/// a shared lock; inserts take the exclusive lock and keep the first value.
class SimilarityCache {
 public:
  std::optional<SimilarityScore> find(UserId u, UserId v) const;
  void insert(const SimilarityScore& score);
  std::size_t size() const;

 private:
  static std::uint64_t key(UserId u, UserId v) noexcept;

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, SimilarityScore> scores_;
};

enum class NeighborRule {
  Half,  // m = ceil(|members \ {active}| / 2)
  All,   // every candidate
};

struct NeighborOptions {
  SimilarityKernel kernel = SimilarityKernel::Pearson;
  bool use_ra = true;  // false forces every weight to 1
  NeighborRule rule = NeighborRule::Half;
  const RatingMatrix* degrees = nullptr;  // k_z source; defaults to the prediction matrix
};

struct Neighbor {
  UserId user = 0;
  double sim = 0.0;
  double ra_weight = 0.0;
  std::size_t co_rated = 0;
};

struct NeighborSet {
  UserId active = 0;
  std::vector<Neighbor> neighbors;  // sim descending, then id ascending
  std::size_t m = 0;                // neighbors.size()
};

/// Candidates are members other than `active` sharing at least one rated movie.
/// They are ranked by similarity and cut to the rule's size. `cache`, when
/// given, must belong to the same matrix and options.
NeighborSet select_neighbors(const RatingMatrix& matrix, std::span<const UserId> cluster_members,
                             UserId active, const NeighborOptions& options = {},
                             SimilarityCache* cache = nullptr);

enum class Provenance { Collaborative, ColdStartGenre, FallbackUserMean, FallbackGlobalMean };

std::string_view provenance_name(Provenance p) noexcept;

struct Prediction {
  UserId user = 0;
  MovieId movie = 0;
  double value = 0.0;  // clamped to [1, 5]
  double raw = 0.0;    // before clamping
  Provenance provenance = Provenance::FallbackGlobalMean;
};

inline constexpr double kMinRating = 1.0;
inline constexpr double kMaxRating = 5.0;

/// Genre-average estimate for a movie nobody in the neighbourhood rated: the
/// mean of the user's defined averages over the movie's popular genres, or
/// `user_mean` when none apply.
Prediction cold_start_predict(const GenreProfile& profile, const MovieRecord& movie,
                              double user_mean);

/// Mean-centred weighted neighbour average, using neighbours who rated the
/// movie, each weighted by sim * ra_weight. Falls back to the cold-start
/// estimate, then the user's mean, then the matrix mean for users with no
/// ratings. `cluster_genres` supplies the user's genre profile when present.
/// Throws DataError for movies missing from the catalog.
Prediction predict_rating(const RatingMatrix& matrix, const NeighborSet& neighbors,
                          UserId active, MovieId movie, const MovieCatalog& movies,
                          const GenreMatrix* cluster_genres = nullptr);

/// Highest value first, ties by lower movie id; at most k entries. k >= 1.
std::vector<Prediction> top_k(std::vector<Prediction> predictions, std::size_t k);

}  // namespace hmrs
