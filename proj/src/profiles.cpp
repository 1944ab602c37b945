#include "hmrs/profiles.hpp"

#include <algorithm>
#include <iomanip>
#include <string>

#include "hmrs/errors.hpp"

namespace hmrs {
namespace {

GenreProfile profile_from_row(std::span<const RatedMovie> row, const MovieCatalog& movies,
                              UserId user) {
  GenreProfile p;
  p.user = user;
  std::array<double, kPopularGenreCount> sums{};
  for (const auto& cell : row) {
    const auto* movie = movies.find(cell.movie);
    if (!movie) throw DataError("profile: unknown movie " + std::to_string(cell.movie));
    for (auto g : kPopularGenres) {
      if (!movie->has(g)) continue;
      sums[index_of(g)] += cell.rating;
      ++p.rated_counts[index_of(g)];
    }
  }
  for (std::size_t g = 0; g < kPopularGenreCount; ++g)
    if (p.rated_counts[g] > 0) p.averages[g] = sums[g] / static_cast<double>(p.rated_counts[g]);
  return p;
}

}  // namespace

std::vector<double> GenreProfile::feature() const {
  std::vector<double> v(kPopularGenreCount, 0.0);
  for (std::size_t g = 0; g < kPopularGenreCount; ++g) v[g] = averages[g].value_or(0.0);
  return v;
}

GenreProfile genre_profile(const RatingMatrix& matrix, const MovieCatalog& movies, UserId user) {
  if (!matrix.has_user(user))
    throw DataError("profile: user " + std::to_string(user) + " has no ratings");
  return profile_from_row(matrix.row(user), movies, user);
}

GenreMatrix::GenreMatrix(std::vector<GenreProfile> rows) : rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(), [](const auto& a, const auto& b) { return a.user < b.user; });
}

const GenreProfile* GenreMatrix::find(UserId u) const noexcept {
  const auto it = std::lower_bound(rows_.begin(), rows_.end(), u,
                                   [](const GenreProfile& p, UserId id) { return p.user < id; });
  return it != rows_.end() && it->user == u ? &*it : nullptr;
}

GenreMatrix build_genre_matrix(const RatingMatrix& matrix, const MovieCatalog& movies,
                               std::span<const UserId> users) {
  std::vector<GenreProfile> rows;
  rows.reserve(users.size());
  for (const UserId u : users) rows.push_back(profile_from_row(matrix.row(u), movies, u));
  return GenreMatrix(std::move(rows));
}

PreferredGenres preferred_genres(const GenreProfile& profile, double threshold) {
  PreferredGenres out{profile.user, {}};
  for (auto g : kPopularGenres) {
    const auto& avg = profile.average(g);
    if (avg && *avg >= threshold) out.genres.push_back(g);
  }
  return out;
}

void write_genre_csv(std::ostream& out, const GenreMatrix& matrix) {
  out << "user_id";
  for (auto name : kPopularGenreNames) out << ',' << name;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& p : matrix.rows()) {
    out << p.user;
    for (const auto& avg : p.averages) {
      out << ',';
      if (avg) {
        out << *avg;
      } else {
        out << "NA";
      }
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace hmrs
