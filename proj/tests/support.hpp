#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <tuple>
#include <vector>

#include "hmrs/ingest.hpp"
#include "hmrs/random.hpp"
#include "oracle.hpp"

namespace testing {

using hmrs::MovieId;
using hmrs::UserId;

inline hmrs::RatingMatrix matrix_of(std::initializer_list<std::tuple<int, int, double>> cells) {
  std::vector<hmrs::RatingRecord> records;
  for (const auto& [u, m, r] : cells) records.push_back({u, m, r, 0});
  return hmrs::RatingMatrix::from_records(std::move(records));
}

inline hmrs::MovieRecord movie(MovieId id, std::initializer_list<hmrs::PopularGenre> genres = {}) {
  hmrs::MovieRecord m;
  m.id = id;
  m.title = "Movie " + std::to_string(id);
  for (auto g : genres) m.genres.set(hmrs::kPopularCatalogIndex[hmrs::index_of(g)]);
  return m;
}

/// Catalog of movies 1..n without genres.
inline hmrs::MovieCatalog plain_catalog(int n) {
  std::vector<hmrs::MovieRecord> movies;
  for (int i = 1; i <= n; ++i) movies.push_back(movie(i));
  return hmrs::MovieCatalog(std::move(movies));
}

/// Random sparse instance: users are 1..n_users, movies 1..n_movies.
inline oracle::Instance random_instance(hmrs::Rng& rng, std::size_t n_users, std::size_t n_movies,
                                        std::size_t max_ratings) {
  oracle::Instance x;
  x.users = n_users;
  x.movies = n_movies;
  x.r.assign(n_users, std::vector<double>(n_movies, 0.0));
  x.genre.assign(n_movies, std::vector<bool>(5, false));
  for (auto& flags : x.genre)
    for (std::size_t g = 0; g < 5; ++g) flags[g] = rng.uniform() < 0.3;
  const std::size_t target = max_ratings / 2 + rng.below(max_ratings / 2 + 1);
  for (std::size_t k = 0; k < target; ++k) {
    const auto u = rng.below(n_users), i = rng.below(n_movies);
    x.r[u][i] = static_cast<double>(1 + rng.below(5));
  }
  return x;
}

inline hmrs::RatingMatrix to_matrix(const oracle::Instance& x, double shift = 0.0) {
  std::vector<hmrs::RatingRecord> records;
  for (std::size_t u = 0; u < x.users; ++u)
    for (std::size_t i = 0; i < x.movies; ++i)
      if (x.r[u][i] != 0.0)
        records.push_back({static_cast<UserId>(u + 1), static_cast<MovieId>(i + 1), x.r[u][i] + shift, 0});
  return hmrs::RatingMatrix::from_records(std::move(records));
}

inline hmrs::MovieCatalog to_catalog(const oracle::Instance& x) {
  std::vector<hmrs::MovieRecord> movies;
  for (std::size_t i = 0; i < x.movies; ++i) {
    auto m = movie(static_cast<MovieId>(i + 1));
    for (std::size_t g = 0; g < 5; ++g)
      if (x.genre[i][g]) m.genres.set(hmrs::kPopularCatalogIndex[g]);
    movies.push_back(m);
  }
  return hmrs::MovieCatalog(std::move(movies));
}

/// Two clouds of 5-d points around (1,..,1) and (5,..,5); labels 0 and 1.
struct Clouds {
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> labels;
};

inline Clouds two_clouds(std::uint64_t seed, std::size_t per_cloud = 50, double spread = 0.4) {
  hmrs::Rng rng(seed);
  Clouds c;
  for (std::size_t label = 0; label < 2; ++label)
    for (std::size_t k = 0; k < per_cloud; ++k) {
      std::vector<double> p(5);
      for (auto& v : p) v = (label ? 5.0 : 1.0) + rng.uniform(-spread, spread);
      for (auto& v : p) v = std::min(5.0, std::max(0.0, v));
      c.points.push_back(p);
      c.labels.push_back(label);
    }
  return c;
}

inline std::filesystem::path fixture_dir() { return HMRS_FIXTURE_DIR; }
inline std::filesystem::path ml100k_dir() { return HMRS_ML100K_DIR; }
inline bool have_ml100k() { return std::filesystem::exists(ml100k_dir() / "u.data"); }

}  // namespace testing
