#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hmrs {

using UserId = std::int32_t;
using MovieId = std::int32_t;

struct RatingRecord {
  UserId user = 0;
  MovieId movie = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

/// One cell of a user's row.
struct RatedMovie {
  MovieId movie = 0;
  double rating = 0.0;
};

/// Immutable sparse user x movie matrix in compressed-row form.
///
/// Rows are sorted by movie id, users by user id. Derived indices (per-user
/// mean, per-movie rater count) are built once at construction, so they always
/// agree with the stored ratings. Values are arbitrary finite reals here; the
/// 1..5 star scale is enforced by the loader.
class RatingMatrix {
 public:
  RatingMatrix() = default;

  /// Builds from records in any order. A repeated (user, movie) pair keeps its
  /// last occurrence; the number dropped is written to `duplicates_dropped`.
  static RatingMatrix from_records(std::vector<RatingRecord> records,
                                   std::size_t* duplicates_dropped = nullptr);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t user_count() const noexcept { return users_.size(); }
  std::size_t movie_count() const noexcept { return movie_count_; }

  /// All records ordered by (user, movie).
  std::span<const RatingRecord> records() const noexcept { return records_; }
  /// Users with at least one rating, ascending.
  std::span<const UserId> users() const noexcept { return users_; }

  bool has_user(UserId u) const noexcept { return row_index(u).has_value(); }

  /// The user's ratings sorted by movie id; empty for unknown users.
  std::span<const RatedMovie> row(UserId u) const noexcept;

  std::optional<double> rating(UserId u, MovieId m) const noexcept;

  /// Mean over the user's ratings. Throws DataError for unknown users.
  double user_mean(UserId u) const;

  /// Number of distinct users who rated `m` (k_z).
  std::size_t rater_count(MovieId m) const noexcept {
    return m >= 0 && static_cast<std::size_t>(m) < degrees_.size() ? degrees_[m] : 0;
  }

  /// Mean over every stored rating, 0 when empty.
  double global_mean() const noexcept { return global_mean_; }

  /// Ratings whose user is in `keep` (need not be sorted). Derived indices are
  /// recomputed on the result. Throws DataError when `keep` is empty.
  RatingMatrix restrict(std::span<const UserId> keep) const;

 private:
  std::optional<std::size_t> row_index(UserId u) const noexcept;

  std::vector<RatingRecord> records_;
  std::vector<UserId> users_;
  std::vector<std::size_t> offsets_;  // users_.size() + 1
  std::vector<RatedMovie> cells_;
  std::vector<double> means_;
  std::vector<std::int32_t> index_of_user_;  // by user id, -1 when absent
  std::vector<std::uint32_t> degrees_;       // by movie id
  std::size_t movie_count_ = 0;
  double global_mean_ = 0.0;
};

}  // namespace hmrs
