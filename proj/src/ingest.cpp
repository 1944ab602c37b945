#include "hmrs/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <system_error>
#include <unordered_set>

#include "hmrs/errors.hpp"

namespace hmrs {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
std::optional<T> to_number(std::string_view s) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

// Calls fn(line, line_number) for each non-blank line, CR stripped.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(std::string_view(line), number);
  }
}

std::ifstream open_or_throw(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  return in;
}

}  // namespace

std::vector<RatingRecord> parse_ratings(std::istream& in, const std::string& source) {
  std::vector<RatingRecord> out;
  for_each_line(in, [&](std::string_view line, std::size_t n) {
    const auto f = split(line, '\t');
    if (f.size() != 4)
      throw DataError(source, n, "expected 4 tab-separated fields, got " + std::to_string(f.size()));
    const auto user = to_number<UserId>(f[0]);
    const auto movie = to_number<MovieId>(f[1]);
    const auto rating = to_number<int>(f[2]);
    const auto ts = to_number<std::int64_t>(f[3]);
    if (!user || *user <= 0) throw DataError(source, n, "bad user id '" + std::string(f[0]) + "'");
    if (!movie || *movie <= 0) throw DataError(source, n, "bad movie id '" + std::string(f[1]) + "'");
    if (!rating) throw DataError(source, n, "bad rating '" + std::string(f[2]) + "'");
    if (*rating < 1 || *rating > 5)
      throw DataError(source, n, "rating " + std::to_string(*rating) + " outside 1..5");
    if (!ts) throw DataError(source, n, "bad timestamp '" + std::string(f[3]) + "'");
    out.push_back({*user, *movie, static_cast<double>(*rating), *ts});
  });
  return out;
}

std::vector<UserRecord> parse_users(std::istream& in, const std::string& source) {
  std::vector<UserRecord> out;
  for_each_line(in, [&](std::string_view line, std::size_t n) {
    const auto f = split(line, '|');
    if (f.size() != 5)
      throw DataError(source, n, "expected 5 pipe-separated fields, got " + std::to_string(f.size()));
    const auto id = to_number<UserId>(f[0]);
    const auto age = to_number<int>(f[1]);
    if (!id || *id <= 0) throw DataError(source, n, "bad user id '" + std::string(f[0]) + "'");
    if (!age || *age < 1) throw DataError(source, n, "bad age '" + std::string(f[1]) + "'");
    UserRecord u;
    u.id = *id;
    u.age = *age;
    if (f[2] == "M") {
      u.gender = Gender::Male;
    } else if (f[2] == "F") {
      u.gender = Gender::Female;
    } else {
      throw DataError(source, n, "gender must be M or F, got '" + std::string(f[2]) + "'");
    }
    u.occupation = f[3];
    u.zip = f[4];
    out.push_back(std::move(u));
  });
  return out;
}

std::vector<MovieRecord> parse_movies(std::istream& in, const std::string& source,
                                      std::size_t* non_ascii_titles) {
  constexpr std::size_t kFields = 5 + kCatalogGenreCount;
  std::vector<MovieRecord> out;
  std::size_t non_ascii = 0;
  for_each_line(in, [&](std::string_view line, std::size_t n) {
    const auto f = split(line, '|');
    if (f.size() != kFields)
      throw DataError(source, n,
                      "expected " + std::to_string(kFields) + " pipe-separated fields, got " +
                          std::to_string(f.size()));
    const auto id = to_number<MovieId>(f[0]);
    if (!id || *id <= 0) throw DataError(source, n, "bad movie id '" + std::string(f[0]) + "'");
    MovieRecord m;
    m.id = *id;
    // Titles are kept as raw bytes; some carry Latin-1 characters.
    m.title = f[1];
    if (std::any_of(m.title.begin(), m.title.end(),
                    [](char c) { return static_cast<unsigned char>(c) >= 0x80; }))
      ++non_ascii;
    for (std::size_t g = 0; g < kCatalogGenreCount; ++g) {
      const auto flag = f[5 + g];
      if (flag == "1") {
        m.genres.set(g);
      } else if (flag != "0") {
        throw DataError(source, n, "genre flag " + std::to_string(g) + " must be 0 or 1");
      }
    }
    out.push_back(std::move(m));
  });
  if (non_ascii_titles) *non_ascii_titles = non_ascii;
  return out;
}

MovieCatalog::MovieCatalog(std::vector<MovieRecord> movies) : movies_(std::move(movies)) {
  std::sort(movies_.begin(), movies_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  MovieId max_id = 0;
  for (const auto& m : movies_) {
    if (m.id < 0) throw DataError("negative movie id " + std::to_string(m.id));
    max_id = std::max(max_id, m.id);
  }
  index_.assign(static_cast<std::size_t>(max_id) + 1, -1);
  for (std::size_t i = 0; i < movies_.size(); ++i) {
    auto& slot = index_[movies_[i].id];
    if (slot >= 0) throw DataError("duplicate movie id " + std::to_string(movies_[i].id));
    slot = static_cast<std::int32_t>(i);
  }
}

const MovieRecord* MovieCatalog::find(MovieId id) const noexcept {
  if (id < 0 || static_cast<std::size_t>(id) >= index_.size() || index_[id] < 0) return nullptr;
  return &movies_[index_[id]];
}

const MovieRecord& MovieCatalog::at(MovieId id) const {
  if (const auto* m = find(id)) return *m;
  throw DataError("unknown movie " + std::to_string(id));
}

const UserRecord* Dataset::find_user(UserId id) const noexcept {
  const auto it = std::lower_bound(users.begin(), users.end(), id,
                                   [](const UserRecord& u, UserId v) { return u.id < v; });
  return it != users.end() && it->id == id ? &*it : nullptr;
}

Dataset assemble_dataset(std::vector<RatingRecord> ratings, std::vector<UserRecord> users,
                         std::vector<MovieRecord> movies) {
  Dataset d;
  std::sort(users.begin(), users.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < users.size(); ++i)
    if (users[i].id == users[i - 1].id)
      throw DataError("duplicate user id " + std::to_string(users[i].id));
  d.users = std::move(users);
  d.movies = MovieCatalog(std::move(movies));
  for (const auto& r : ratings) {
    if (!d.find_user(r.user))
      throw DataError("rating references unknown user " + std::to_string(r.user));
    if (!d.movies.find(r.movie))
      throw DataError("rating references unknown movie " + std::to_string(r.movie));
    if (r.rating < 1.0 || r.rating > 5.0 || r.rating != std::floor(r.rating))
      throw DataError("rating " + std::to_string(r.rating) + " is not one of 1..5");
  }
  d.ratings = RatingMatrix::from_records(std::move(ratings), &d.stats.duplicate_ratings);
  return d;
}

Dataset load_dataset(const std::filesystem::path& ratings_path,
                     const std::filesystem::path& users_path,
                     const std::filesystem::path& movies_path) {
  auto rin = open_or_throw(ratings_path);
  auto uin = open_or_throw(users_path);
  auto min = open_or_throw(movies_path);
  auto ratings = parse_ratings(rin, ratings_path.string());
  auto users = parse_users(uin, users_path.string());
  std::size_t non_ascii = 0;
  auto movies = parse_movies(min, movies_path.string(), &non_ascii);
  auto d = assemble_dataset(std::move(ratings), std::move(users), std::move(movies));
  d.stats.non_ascii_titles = non_ascii;
  return d;
}

// ---------------------------------------------------------------------------

namespace {
SegmentAxis axis_of(Segment s) {
  return s == Segment::Male || s == Segment::Female ? SegmentAxis::Gender : SegmentAxis::Age;
}
}  // namespace

SegmentSpec::SegmentSpec(SegmentAxis a, Segment v) : axis(a), value(v) {
  if (axis_of(v) != a) throw ConfigError("segment value does not belong to the given axis");
}

SegmentSpec::SegmentSpec(Segment v) : axis(axis_of(v)), value(v) {}

std::string_view segment_name(Segment s) noexcept {
  switch (s) {
    case Segment::Male: return "male";
    case Segment::Female: return "female";
    case Segment::Age20To39: return "age_20_39";
    case Segment::Age40To60: return "age_40_60";
  }
  return "?";
}

std::optional<Segment> segment_from_name(std::string_view name) {
  for (auto s : kAllSegments)
    if (segment_name(s) == name) return s;
  return std::nullopt;
}

std::vector<UserId> segment_users(const std::vector<UserRecord>& users, const SegmentSpec& spec,
                                  bool strict_age) {
  std::vector<UserId> out;
  for (const auto& u : users) {
    bool in = false;
    switch (spec.value) {
      case Segment::Male: in = u.gender == Gender::Male; break;
      case Segment::Female: in = u.gender == Gender::Female; break;
      case Segment::Age20To39: in = u.age < 40 && (!strict_age || u.age >= 20); break;
      case Segment::Age40To60: in = u.age >= 40 && (!strict_age || u.age <= 60); break;
    }
    if (in) out.push_back(u.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hmrs
