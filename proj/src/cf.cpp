#include "hmrs/cf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hmrs/errors.hpp"

namespace hmrs {
namespace {

void require_pair(const RatingMatrix& m, UserId u, UserId v) {
  if (u == v) throw DataError("similarity of a user with itself is undefined");
  if (!m.has_user(u)) throw DataError("unknown user " + std::to_string(u));
  if (!m.has_user(v)) throw DataError("unknown user " + std::to_string(v));
}

// Walks the co-rated movies of two sorted rows in movie order.
template <typename Fn>
void for_each_co_rated(std::span<const RatedMovie> a, std::span<const RatedMovie> b, Fn&& fn) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->movie < j->movie) {
      ++i;
    } else if (j->movie < i->movie) {
      ++j;
    } else {
      fn(i->movie, i->rating, j->rating);
      ++i;
      ++j;
    }
  }
}

double correlation(double cross, double norm_u, double norm_v) {
  if (norm_u <= 0.0 || norm_v <= 0.0) return 0.0;
  return std::clamp(cross / (std::sqrt(norm_u) * std::sqrt(norm_v)), -1.0, 1.0);
}

}  // namespace

SimilarityScore score_pair(const RatingMatrix& matrix, UserId u, UserId v,
                           SimilarityKernel kernel, const RatingMatrix* degrees) {
  require_pair(matrix, u, v);
  const RatingMatrix& deg = degrees ? *degrees : matrix;
  const bool centred = kernel == SimilarityKernel::Pearson;
  const double mu_u = centred ? matrix.user_mean(u) : 0.0;
  const double mu_v = centred ? matrix.user_mean(v) : 0.0;

  SimilarityScore s{u, v, 0.0, 0.0, 0};
  double cross = 0.0, norm_u = 0.0, norm_v = 0.0;
  for_each_co_rated(matrix.row(u), matrix.row(v), [&](MovieId z, double ru, double rv) {
    const double du = ru - mu_u;
    const double dv = rv - mu_v;
    cross += du * dv;
    norm_u += du * du;
    norm_v += dv * dv;
    const auto k = deg.rater_count(z);
    if (k > 0) s.ra_weight += 1.0 / static_cast<double>(k);
    ++s.co_rated;
  });
  s.sim = s.co_rated == 0 ? 0.0 : correlation(cross, norm_u, norm_v);
  return s;
}

double pearson_sim(const RatingMatrix& matrix, UserId u, UserId v) {
  return score_pair(matrix, u, v, SimilarityKernel::Pearson).sim;
}

double cosine_sim(const RatingMatrix& matrix, UserId u, UserId v) {
  return score_pair(matrix, u, v, SimilarityKernel::Cosine).sim;
}

double ra_weight(const RatingMatrix& matrix, UserId u, UserId v) {
  return score_pair(matrix, u, v).ra_weight;
}

// ---------------------------------------------------------------------------

std::uint64_t SimilarityCache::key(UserId u, UserId v) noexcept {
  const auto lo = static_cast<std::uint32_t>(std::min(u, v));
  const auto hi = static_cast<std::uint32_t>(std::max(u, v));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

std::optional<SimilarityScore> SimilarityCache::find(UserId u, UserId v) const {
  std::shared_lock lock(mutex_);
  const auto it = scores_.find(key(u, v));
  if (it == scores_.end()) return std::nullopt;
  SimilarityScore s = it->second;
  if (s.u != u) std::swap(s.u, s.v);
  return s;
}

void SimilarityCache::insert(const SimilarityScore& score) {
  std::unique_lock lock(mutex_);
  scores_.try_emplace(key(score.u, score.v), score);
}

std::size_t SimilarityCache::size() const {
  std::shared_lock lock(mutex_);
  return scores_.size();
}

NeighborSet select_neighbors(const RatingMatrix& matrix, std::span<const UserId> cluster_members,
                             UserId active, const NeighborOptions& options,
                             SimilarityCache* cache) {
  NeighborSet out;
  out.active = active;
  if (!matrix.has_user(active)) return out;

  std::size_t others = 0;
  for (const UserId v : cluster_members) {
    if (v == active) continue;
    ++others;
    if (!matrix.has_user(v)) continue;
    std::optional<SimilarityScore> s = cache ? cache->find(active, v) : std::nullopt;
    if (!s) {
      s = score_pair(matrix, active, v, options.kernel, options.degrees);
      if (cache) cache->insert(*s);
    }
    if (s->co_rated == 0) continue;
    out.neighbors.push_back({v, s->sim, options.use_ra ? s->ra_weight : 1.0, s->co_rated});
  }

  std::sort(out.neighbors.begin(), out.neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.sim != b.sim ? a.sim > b.sim : a.user < b.user;
  });
  const std::size_t want = options.rule == NeighborRule::Half ? (others + 1) / 2 : others;
  if (out.neighbors.size() > want) out.neighbors.resize(want);
  out.m = out.neighbors.size();
  return out;
}

// ---------------------------------------------------------------------------

std::string_view provenance_name(Provenance p) noexcept {
  switch (p) {
    case Provenance::Collaborative: return "collaborative";
    case Provenance::ColdStartGenre: return "cold_start_genre";
    case Provenance::FallbackUserMean: return "fallback_user_mean";
    case Provenance::FallbackGlobalMean: return "fallback_global_mean";
  }
  return "?";
}

namespace {

Prediction make_prediction(UserId u, MovieId m, double raw, Provenance p) {
  return {u, m, std::clamp(raw, kMinRating, kMaxRating), raw, p};
}

}  // namespace

Prediction cold_start_predict(const GenreProfile& profile, const MovieRecord& movie,
                              double user_mean) {
  double sum = 0.0;
  std::size_t n = 0;
  for (auto g : kPopularGenres) {
    const auto& avg = profile.average(g);
    if (movie.has(g) && avg) {
      sum += *avg;
      ++n;
    }
  }
  if (n == 0) return make_prediction(profile.user, movie.id, user_mean, Provenance::FallbackUserMean);
  return make_prediction(profile.user, movie.id, sum / static_cast<double>(n),
                         Provenance::ColdStartGenre);
}

Prediction predict_rating(const RatingMatrix& matrix, const NeighborSet& neighbors,
                          UserId active, MovieId movie, const MovieCatalog& movies,
                          const GenreMatrix* cluster_genres) {
  const MovieRecord& record = movies.at(movie);
  if (!matrix.has_user(active))
    return make_prediction(active, movie, matrix.global_mean(), Provenance::FallbackGlobalMean);

  const double mu_u = matrix.user_mean(active);
  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& n : neighbors.neighbors) {
    const auto r = matrix.rating(n.user, movie);
    if (!r) continue;
    const double w = n.sim * n.ra_weight;
    numerator += (*r - matrix.user_mean(n.user)) * w;
    denominator += std::abs(w);
  }
  if (denominator > 0.0)
    return make_prediction(active, movie, mu_u + numerator / denominator, Provenance::Collaborative);

  const GenreProfile* profile = cluster_genres ? cluster_genres->find(active) : nullptr;
  if (profile) return cold_start_predict(*profile, record, mu_u);
  return cold_start_predict(genre_profile(matrix, movies, active), record, mu_u);
}

std::vector<Prediction> top_k(std::vector<Prediction> predictions, std::size_t k) {
  if (k == 0) throw ConfigError("top_k: K must be >= 1");
  std::sort(predictions.begin(), predictions.end(), [](const Prediction& a, const Prediction& b) {
    return a.value != b.value ? a.value > b.value : a.movie < b.movie;
  });
  if (predictions.size() > k) predictions.resize(k);
  return predictions;
}

}  // namespace hmrs
