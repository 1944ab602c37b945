#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "hmrs/genre.hpp"
#include "hmrs/ingest.hpp"
#include "hmrs/rating_matrix.hpp"

namespace hmrs {

/// A user's average rating over each popular genre.
struct GenreProfile {
  UserId user = 0;
  std::array<std::optional<double>, kPopularGenreCount> averages{};
  std::array<std::size_t, kPopularGenreCount> rated_counts{};

  const std::optional<double>& average(PopularGenre g) const { return averages[index_of(g)]; }

  /// Dense 5-vector with unrated genres encoded as 0.0.
  std::vector<double> feature() const;
};

inline constexpr double kDefaultPreferredThreshold = 4.0;

struct PreferredGenres {
  UserId user = 0;
  std::vector<PopularGenre> genres;  // fixed genre order
};

/// Throws DataError if the user has no ratings in `matrix`.
GenreProfile genre_profile(const RatingMatrix& matrix, const MovieCatalog& movies, UserId user);

/// Profiles for one group of users (one R' matrix), sorted by user id.
class GenreMatrix {
 public:
  GenreMatrix() = default;
  explicit GenreMatrix(std::vector<GenreProfile> rows);

  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<GenreProfile>& rows() const noexcept { return rows_; }
  const GenreProfile* find(UserId u) const noexcept;

 private:
  std::vector<GenreProfile> rows_;
};

/// Users without ratings in `matrix` get an all-unrated profile.
GenreMatrix build_genre_matrix(const RatingMatrix& matrix, const MovieCatalog& movies,
                               std::span<const UserId> users);

/// Genres whose average is defined and >= threshold (inclusive).
PreferredGenres preferred_genres(const GenreProfile& profile,
                                 double threshold = kDefaultPreferredThreshold);

/// CSV with a user_id column then one column per popular genre; "NA" marks unrated.
void write_genre_csv(std::ostream& out, const GenreMatrix& matrix);

}  // namespace hmrs
