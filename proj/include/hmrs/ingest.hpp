#pragma once

#include <bitset>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hmrs/genre.hpp"
#include "hmrs/rating_matrix.hpp"

namespace hmrs {

enum class Gender { Male, Female };

struct UserRecord {
  UserId id = 0;
  int age = 0;
  Gender gender = Gender::Male;
  std::string occupation;
  std::string zip;
};

struct MovieRecord {
  MovieId id = 0;
  std::string title;
  std::bitset<kCatalogGenreCount> genres;

  bool has(PopularGenre g) const { return genres.test(kPopularCatalogIndex[index_of(g)]); }
  bool has_popular_genre() const {
    for (auto g : kPopularGenres)
      if (has(g)) return true;
    return false;
  }
};

/// Movies sorted by id with O(1) lookup.
class MovieCatalog {
 public:
  MovieCatalog() = default;
  /// Throws DataError on a repeated movie id.
  explicit MovieCatalog(std::vector<MovieRecord> movies);

  std::size_t size() const noexcept { return movies_.size(); }
  const std::vector<MovieRecord>& movies() const noexcept { return movies_; }
  const MovieRecord* find(MovieId id) const noexcept;
  /// Throws DataError when absent.
  const MovieRecord& at(MovieId id) const;

 private:
  std::vector<MovieRecord> movies_;
  std::vector<std::int32_t> index_;
};

struct LoadStats {
  std::size_t duplicate_ratings = 0;
  std::size_t non_ascii_titles = 0;
};

struct Dataset {
  RatingMatrix ratings;
  std::vector<UserRecord> users;  // sorted by id
  MovieCatalog movies;
  LoadStats stats;

  const UserRecord* find_user(UserId id) const noexcept;
};

// Stream parsers. `source` names the input in error messages.
std::vector<RatingRecord> parse_ratings(std::istream& in, const std::string& source = "ratings");
std::vector<UserRecord> parse_users(std::istream& in, const std::string& source = "users");
std::vector<MovieRecord> parse_movies(std::istream& in, const std::string& source = "movies",
                                      std::size_t* non_ascii_titles = nullptr);

/// Loads and cross-validates the three MovieLens-100K files. Ratings must be
/// integers in 1..5 and reference known users and movies; duplicates keep the
/// last occurrence and are counted in `stats`.
Dataset load_dataset(const std::filesystem::path& ratings_path,
                     const std::filesystem::path& users_path,
                     const std::filesystem::path& movies_path);

/// Same as load_dataset, on already-parsed parts.
Dataset assemble_dataset(std::vector<RatingRecord> ratings, std::vector<UserRecord> users,
                         std::vector<MovieRecord> movies);

// ---------------------------------------------------------------------------
// Demographic segments

enum class Segment { Male, Female, Age20To39, Age40To60 };

inline constexpr Segment kAllSegments[] = {Segment::Male, Segment::Female, Segment::Age20To39,
                                           Segment::Age40To60};

enum class SegmentAxis { Gender, Age };

struct SegmentSpec {
  SegmentAxis axis = SegmentAxis::Gender;
  Segment value = Segment::Male;

  /// Throws ConfigError when axis and value disagree.
  SegmentSpec(SegmentAxis axis, Segment value);
  explicit SegmentSpec(Segment value);
};

std::string_view segment_name(Segment s) noexcept;
std::optional<Segment> segment_from_name(std::string_view name);

/// Ages below 40 fall in the 20-39 band and the rest in 40-60. With
/// `strict_age`, users outside 20..60 belong to neither band.
std::vector<UserId> segment_users(const std::vector<UserRecord>& users, const SegmentSpec& spec,
                                  bool strict_age = false);

}  // namespace hmrs
