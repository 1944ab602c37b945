#include "hmrs/rating_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hmrs/errors.hpp"

namespace hmrs {

RatingMatrix RatingMatrix::from_records(std::vector<RatingRecord> records,
                                        std::size_t* duplicates_dropped) {
  for (const auto& r : records) {
    if (r.user < 0 || r.movie < 0)
      throw DataError("negative id in rating (" + std::to_string(r.user) + ", " +
                      std::to_string(r.movie) + ")");
    if (!std::isfinite(r.rating)) throw DataError("non-finite rating value");
  }

  // Stable sort keeps file order inside equal keys, so the last one wins.
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return a.user != b.user ? a.user < b.user : a.movie < b.movie;
  });
  std::size_t dropped = 0;
  std::vector<RatingRecord> unique;
  unique.reserve(records.size());
  for (const auto& r : records) {
    if (!unique.empty() && unique.back().user == r.user && unique.back().movie == r.movie) {
      unique.back() = r;
      ++dropped;
    } else {
      unique.push_back(r);
    }
  }
  if (duplicates_dropped) *duplicates_dropped = dropped;

  RatingMatrix m;
  m.records_ = std::move(unique);
  m.cells_.reserve(m.records_.size());
  UserId max_user = -1;
  MovieId max_movie = -1;
  double total = 0.0;
  for (const auto& r : m.records_) {
    if (m.users_.empty() || m.users_.back() != r.user) {
      m.users_.push_back(r.user);
      m.offsets_.push_back(m.cells_.size());
    }
    m.cells_.push_back({r.movie, r.rating});
    max_user = std::max(max_user, r.user);
    max_movie = std::max(max_movie, r.movie);
    total += r.rating;
  }
  m.offsets_.push_back(m.cells_.size());
  m.global_mean_ = m.records_.empty() ? 0.0 : total / static_cast<double>(m.records_.size());

  m.index_of_user_.assign(static_cast<std::size_t>(max_user + 1), -1);
  m.means_.resize(m.users_.size());
  for (std::size_t i = 0; i < m.users_.size(); ++i) {
    m.index_of_user_[m.users_[i]] = static_cast<std::int32_t>(i);
    double sum = 0.0;
    for (std::size_t c = m.offsets_[i]; c < m.offsets_[i + 1]; ++c) sum += m.cells_[c].rating;
    m.means_[i] = sum / static_cast<double>(m.offsets_[i + 1] - m.offsets_[i]);
  }

  m.degrees_.assign(static_cast<std::size_t>(max_movie + 1), 0);
  for (const auto& c : m.cells_) {
    if (m.degrees_[c.movie]++ == 0) ++m.movie_count_;
  }
  return m;
}

std::optional<std::size_t> RatingMatrix::row_index(UserId u) const noexcept {
  if (u < 0 || static_cast<std::size_t>(u) >= index_of_user_.size()) return std::nullopt;
  const auto idx = index_of_user_[u];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

std::span<const RatedMovie> RatingMatrix::row(UserId u) const noexcept {
  const auto idx = row_index(u);
  if (!idx) return {};
  return std::span<const RatedMovie>(cells_).subspan(offsets_[*idx],
                                                     offsets_[*idx + 1] - offsets_[*idx]);
}

std::optional<double> RatingMatrix::rating(UserId u, MovieId m) const noexcept {
  const auto r = row(u);
  const auto it = std::lower_bound(r.begin(), r.end(), m,
                                   [](const RatedMovie& c, MovieId id) { return c.movie < id; });
  if (it == r.end() || it->movie != m) return std::nullopt;
  return it->rating;
}

double RatingMatrix::user_mean(UserId u) const {
  const auto idx = row_index(u);
  if (!idx) throw DataError("user " + std::to_string(u) + " has no ratings in this matrix");
  return means_[*idx];
}

RatingMatrix RatingMatrix::restrict(std::span<const UserId> keep) const {
  if (keep.empty()) throw DataError("restrict: empty user set");
  std::vector<RatingRecord> kept;
  for (const UserId u : keep) {
    const auto idx = row_index(u);
    if (!idx) continue;
    // records_ shares the row layout with cells_.
    kept.insert(kept.end(), records_.begin() + static_cast<std::ptrdiff_t>(offsets_[*idx]),
                records_.begin() + static_cast<std::ptrdiff_t>(offsets_[*idx + 1]));
  }
  return from_records(std::move(kept));
}

}  // namespace hmrs
