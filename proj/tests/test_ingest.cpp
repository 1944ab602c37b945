#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hmrs/errors.hpp"
#include "hmrs/ingest.hpp"
#include "support.hpp"

using namespace hmrs;

namespace {

Dataset load_fixture() {
  const auto d = testing::fixture_dir();
  return load_dataset(d / "u.data", d / "u.user", d / "u.item");
}

template <typename Fn>
std::size_t error_line(Fn&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("golden: fixture excerpt counts and first records") {
  const auto data = load_fixture();
  CHECK(data.ratings.size() == 692);
  CHECK(data.users.size() == 30);
  CHECK(data.movies.size() == 121);
  CHECK(data.stats.duplicate_ratings == 0);
  CHECK(data.stats.non_ascii_titles == 1);

  std::ifstream in(testing::fixture_dir() / "u.data");
  const auto records = parse_ratings(in);
  REQUIRE(records.size() == 692);
  CHECK(records[0] == RatingRecord{6, 86, 3.0, 883603013});

  const auto& u1 = *data.find_user(1);
  CHECK(u1.age == 24);
  CHECK(u1.gender == Gender::Male);
  CHECK(u1.occupation == "technician");
  CHECK(u1.zip == "85711");
  CHECK(data.find_user(2)->gender == Gender::Female);

  const auto& goldeneye = data.movies.at(2);
  CHECK(goldeneye.title == "GoldenEye (1995)");
  CHECK(goldeneye.has(PopularGenre::Action));
  CHECK(goldeneye.has(PopularGenre::Adventure));
  CHECK_FALSE(goldeneye.has(PopularGenre::Comedy));
  CHECK(goldeneye.genres.test(16));  // Thriller
  CHECK(goldeneye.genres.count() == 3);
  const auto& toy = data.movies.at(1);
  CHECK(toy.genres.test(3));
  CHECK(toy.genres.test(4));
  CHECK(toy.has(PopularGenre::Comedy));
  CHECK(data.movies.at(543).title.find('\xe9') != std::string::npos);
}

TEST_CASE("ratings line field order is user, movie, rating, timestamp") {
  std::istringstream in("196\t242\t3\t881250949\n");
  const auto r = parse_ratings(in);
  REQUIRE(r.size() == 1);
  CHECK(r[0].user == 196);
  CHECK(r[0].movie == 242);
  CHECK(r[0].rating == 3.0);
  CHECK(r[0].timestamp == 881250949);
}

TEST_CASE("malformed lines report their line number") {
  CHECK(error_line([] {
          std::istringstream in("1\t1\t3\t5\n1\t2\t3\n");
          parse_ratings(in);
        }) == 2);
  CHECK(error_line([] {
          std::istringstream in("1\t1\t3\t5\n\n2\tx\t3\t5\n");
          parse_ratings(in);
        }) == 3);
  CHECK(error_line([] {
          std::istringstream in("1\t1\t6\t5\n");
          parse_ratings(in);
        }) == 1);
  CHECK(error_line([] {
          std::istringstream in("1|24|M|technician|85711\n2|53|X|other|94043\n");
          parse_users(in);
        }) == 2);
  CHECK(error_line([] {
          std::istringstream in("1|0|M|technician|85711\n");
          parse_users(in);
        }) == 1);
  CHECK(error_line([] {
          std::istringstream in("1|T (1995)|01-Jan-1995|||0|0|0|1|1|1|0|0|0|0|0|0|0|0|0|0|0|0\n");
          parse_movies(in);
        }) == 1);
  CHECK(error_line([] {
          std::istringstream in("1|T (1995)|01-Jan-1995|||0|0|0|1|1|1|0|0|0|0|0|0|0|0|0|0|0|0|2\n");
          parse_movies(in);
        }) == 1);

  try {
    std::istringstream in("1\t1\t3\t5\n1\t2\n");
    parse_ratings(in, "u.data");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind("u.data:2:", 0) == 0);
  }
}

TEST_CASE("CRLF line endings are accepted") {
  std::istringstream in("1|24|M|technician|85711\r\n");
  const auto users = parse_users(in);
  REQUIRE(users.size() == 1);
  CHECK(users[0].zip == "85711");
}

TEST_CASE("assemble_dataset cross-checks references and keeps the last duplicate") {
  std::vector<UserRecord> users{{1, 30, Gender::Male, "x", "0"}};
  std::vector<MovieRecord> movies{testing::movie(1), testing::movie(2)};
  CHECK_THROWS_AS(assemble_dataset({{2, 1, 3, 0}}, users, movies), DataError);
  CHECK_THROWS_AS(assemble_dataset({{1, 3, 3, 0}}, users, movies), DataError);
  CHECK_THROWS_AS(assemble_dataset({{1, 1, 2.5, 0}}, users, movies), DataError);

  const auto d = assemble_dataset({{1, 1, 3, 0}, {1, 2, 4, 0}, {1, 1, 5, 0}}, users, movies);
  CHECK(d.stats.duplicate_ratings == 1);
  CHECK(d.ratings.size() == 2);
  CHECK(*d.ratings.rating(1, 1) == 5.0);
}

TEST_CASE("empty ratings file gives an empty matrix") {
  const auto d = assemble_dataset({}, {{1, 30, Gender::Male, "x", "0"}}, {testing::movie(1)});
  CHECK(d.ratings.size() == 0);
  CHECK(d.ratings.user_count() == 0);
}

TEST_CASE("missing file names the path") {
  try {
    load_dataset("/nonexistent/u.data", "/nonexistent/u.user", "/nonexistent/u.item");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/u.") != std::string::npos);
  }
}

TEST_CASE("rating matrix derived indices") {
  const auto m = testing::matrix_of({{1, 10, 4}, {1, 20, 2}, {2, 10, 5}, {3, 30, 1}});
  CHECK(m.user_count() == 3);
  CHECK(m.rater_count(10) == 2);
  CHECK(m.rater_count(20) == 1);
  CHECK(m.rater_count(99) == 0);
  CHECK(m.user_mean(1) == 3.0);
  CHECK(m.global_mean() == 3.0);
  CHECK_FALSE(m.rating(2, 20).has_value());
  CHECK_THROWS_AS(m.user_mean(7), DataError);
  CHECK(m.row(7).empty());
}

TEST_CASE("restrict") {
  const auto m = testing::matrix_of({{1, 10, 4}, {1, 20, 2}, {2, 10, 5}, {2, 11, 1}, {2, 12, 3},
                                     {2, 13, 3}, {2, 14, 3}, {3, 30, 1}});
  SUBCASE("to all users is the identity") {
    const std::vector<UserId> all(m.users().begin(), m.users().end());
    const auto r = m.restrict(all);
    CHECK(std::equal(r.records().begin(), r.records().end(), m.records().begin(), m.records().end()));
  }
  SUBCASE("to one user with 5 ratings") {
    const std::vector<UserId> one{2};
    const auto r = m.restrict(one);
    CHECK(r.size() == 5);
    for (const auto& c : r.row(2)) CHECK(r.rater_count(c.movie) == 1);
  }
  SUBCASE("empty set is rejected") {
    CHECK_THROWS_AS(m.restrict(std::vector<UserId>{}), DataError);
  }
}

TEST_CASE("segments") {
  std::vector<UserRecord> users{{1, 25, Gender::Male, "", ""},
                                {2, 45, Gender::Female, "", ""},
                                {3, 18, Gender::Female, "", ""},
                                {4, 61, Gender::Male, "", ""},
                                {5, 40, Gender::Male, "", ""},
                                {6, 39, Gender::Female, "", ""}};
  auto has = [](const std::vector<UserId>& v, UserId u) {
    return std::find(v.begin(), v.end(), u) != v.end();
  };
  CHECK(has(segment_users(users, SegmentSpec(Segment::Male)), 1));
  CHECK(has(segment_users(users, SegmentSpec(Segment::Age40To60)), 2));
  CHECK(has(segment_users(users, SegmentSpec(Segment::Age20To39)), 3));
  CHECK(has(segment_users(users, SegmentSpec(Segment::Age40To60)), 5));
  CHECK(has(segment_users(users, SegmentSpec(Segment::Age20To39)), 6));
  CHECK(has(segment_users(users, SegmentSpec(Segment::Age40To60)), 4));
  CHECK_FALSE(has(segment_users(users, SegmentSpec(Segment::Age20To39), true), 3));
  CHECK_FALSE(has(segment_users(users, SegmentSpec(Segment::Age40To60), true), 4));

  for (auto [a, b] : {std::pair{Segment::Male, Segment::Female},
                      std::pair{Segment::Age20To39, Segment::Age40To60}}) {
    auto x = segment_users(users, SegmentSpec(a));
    auto y = segment_users(users, SegmentSpec(b));
    std::set<UserId> both(x.begin(), x.end());
    both.insert(y.begin(), y.end());
    CHECK(both.size() == users.size());
    CHECK(x.size() + y.size() == users.size());
  }

  CHECK_THROWS_AS(SegmentSpec(SegmentAxis::Gender, Segment::Age20To39), ConfigError);
  CHECK(segment_name(Segment::Age20To39) == "age_20_39");
  CHECK(segment_from_name("female") == Segment::Female);
  CHECK_FALSE(segment_from_name("teen").has_value());
}

TEST_CASE("ML-100K: counts, segment restriction and degree recount" *
          doctest::skip(!testing::have_ml100k())) {
  const auto d = testing::ml100k_dir();
  const auto data = load_dataset(d / "u.data", d / "u.user", d / "u.item");
  CHECK(data.users.size() == 943);
  CHECK(data.movies.size() == 1682);
  CHECK(data.ratings.size() == 100000);

  // Direct scan of the raw files.
  std::map<UserId, char> gender;
  {
    std::ifstream in(d / "u.user");
    std::string line;
    while (std::getline(in, line)) {
      const auto p1 = line.find('|'), p2 = line.find('|', p1 + 1);
      gender[std::stoi(line.substr(0, p1))] = line[p2 + 1];
    }
  }
  std::size_t male_ratings = 0;
  {
    std::ifstream in(d / "u.data");
    UserId u;
    MovieId m;
    int r;
    long long t;
    while (in >> u >> m >> r >> t)
      if (gender[u] == 'M') ++male_ratings;
  }
  const auto male = data.ratings.restrict(segment_users(data.users, SegmentSpec(Segment::Male)));
  CHECK(male.size() == male_ratings);

  std::map<MovieId, std::size_t> recount;
  for (const auto& r : male.records()) ++recount[r.movie];
  bool all_match = true;
  for (const auto& [movie, k] : recount) all_match = all_match && male.rater_count(movie) == k;
  CHECK(all_match);
}
