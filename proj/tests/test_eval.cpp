#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "hmrs/errors.hpp"
#include "hmrs/eval.hpp"
#include "support.hpp"

using namespace hmrs;
using G = PopularGenre;

namespace {

RatingMatrix n_ratings(int n) {
  std::vector<RatingRecord> r;
  for (int i = 0; i < n; ++i) r.push_back({1 + i / 10, 1 + i % 10, 3.0, 0});
  return RatingMatrix::from_records(std::move(r));
}

const Dataset& fixture() {
  static const Dataset data = [] {
    const auto d = testing::fixture_dir();
    return load_dataset(d / "u.data", d / "u.user", d / "u.item");
  }();
  return data;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.repeats = 2;
  c.offline.som.epochs = 10;
  c.offline.mlp.epochs = 20;
  return c;
}

}  // namespace

TEST_CASE("fold sizes and determinism") {
  auto p = make_folds(n_ratings(100), 5, 1);
  for (std::size_t f = 0; f < 5; ++f) CHECK(p.fold_size(f) == 20);
  p = make_folds(n_ratings(101), 5, 1);
  std::multiset<std::size_t> sizes;
  for (std::size_t f = 0; f < 5; ++f) sizes.insert(p.fold_size(f));
  CHECK(sizes == std::multiset<std::size_t>{20, 20, 20, 20, 21});
  CHECK(make_folds(n_ratings(101), 5, 9).fold_of == make_folds(n_ratings(101), 5, 9).fold_of);
  CHECK(make_folds(n_ratings(101), 5, 9).fold_of != make_folds(n_ratings(101), 5, 10).fold_of);
  CHECK_THROWS_AS(make_folds(n_ratings(4), 5, 1), ConfigError);
  CHECK_THROWS_AS(make_folds(n_ratings(10), 1, 1), ConfigError);
}

TEST_CASE("folds partition the ratings and do not leak") {
  const auto& m = fixture().ratings;
  const auto plan = make_folds(m, 5, 3);
  std::map<std::pair<UserId, MovieId>, int> seen;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto split = split_fold(m, plan, f);
    CHECK(split.train.size() + split.test.size() == m.size());
    CHECK(check_no_leakage(split.train, split.test));
    for (const auto& r : split.test) ++seen[{r.user, r.movie}];
  }
  CHECK(seen.size() == m.size());
  CHECK(std::all_of(seen.begin(), seen.end(), [](const auto& kv) { return kv.second == 1; }));

  // A deliberately leaky split is caught.
  const auto split = split_fold(m, plan, 0);
  CHECK_FALSE(check_no_leakage(m, split.test));
}

TEST_CASE("mean absolute error") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(mae(a, a) == 0.0);
  CHECK(mae(std::vector<double>{2, 2, 4, 2}, a) == 1.0);
  CHECK_THROWS_AS(mae(std::vector<double>{1}, a), ConfigError);
  CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), ConfigError);
}

TEST_CASE("overall error is the product") {
  CHECK(std::abs(combine_overall_mae(0.52, 0.71) - 0.3692) <= 1e-12);
  CHECK(std::abs(combine_overall_mae(0.399, 0.60) - 0.2394) <= 1e-12);
  CHECK(combine_overall_mae(0.8, 0.0) == 0.0);
  CHECK_THROWS_AS(combine_overall_mae(-0.1, 0.5), ConfigError);

  CaseCell worst{0.52, 0.71, std::nullopt}, best{0.399, 0.60, std::nullopt};
  worst.mae = combine_overall_mae(*worst.genre_case_mae, *worst.movie_case_mae);
  best.mae = combine_overall_mae(*best.genre_case_mae, *best.movie_case_mae);
  CHECK(*worst.movie_case_mae == 0.71);
  CHECK(*best.movie_case_mae == 0.60);
  CHECK(*worst.mae > *best.mae);
}

TEST_CASE("best and worst genre") {
  const std::vector<GenreError> table{{G::Action, 0.481}, {G::Adventure, 0.399}, {G::Romance, 0.520}};
  const auto [best, worst] = pick_best_worst(table);
  CHECK(best.genre == G::Adventure);
  CHECK(worst.genre == G::Romance);

  const std::vector<GenreError> one{{G::Drama, 0.3}};
  CHECK(pick_best_worst(one).first.genre == G::Drama);
  CHECK(pick_best_worst(one).second.genre == G::Drama);

  const std::vector<GenreError> tie{{G::Comedy, 0.5}, {G::Drama, 0.5}};
  CHECK(pick_best_worst(tie).first.genre == G::Comedy);
  CHECK(pick_best_worst(tie).second.genre == G::Comedy);
}

TEST_CASE("genre case report") {
  const MovieCatalog movies({testing::movie(1, {G::Action}), testing::movie(2, {G::Action, G::Romance}),
                             testing::movie(3, {G::Comedy}), testing::movie(4, {G::Romance})});
  const std::vector<ScoredRating> tests{{1, 4, 3.5}, {2, 5, 4.0}, {3, 2, 4.0}, {4, 3, 3.0}};
  const std::vector<G> preferred{G::Action, G::Romance, G::Drama};
  const auto r = genre_case_report(preferred, tests, movies);
  REQUIRE(r.evaluated);
  REQUIRE(r.per_genre.size() == 2);
  CHECK(r.per_genre[0].mae == 0.75);
  CHECK(r.per_genre[1].mae == 0.5);
  CHECK(r.best.genre == G::Romance);
  CHECK(r.worst.genre == G::Action);

  std::vector<ScoredRating> perfect = tests;
  for (auto& t : perfect) t.predicted = t.actual;
  const auto p = genre_case_report(preferred, perfect, movies);
  CHECK(p.best.mae == 0.0);
  CHECK(p.worst.mae == 0.0);

  const std::vector<G> only_drama{G::Drama};
  CHECK_FALSE(genre_case_report(only_drama, tests, movies).evaluated);
}

TEST_CASE("configuration validation happens up front") {
  ExperimentConfig c;
  c.folds = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.repeats = 0;
  CHECK_THROWS_AS(run_experiment(fixture(), c), ConfigError);
  c = {};
  c.segments.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(variant_from_name("som_cf_no_ra") == Variant::SomCfNoRa);
  CHECK_FALSE(variant_from_name("svd").has_value());
}

TEST_CASE("experiment on the fixture: shape, arithmetic, determinism, leakage") {
  const auto cfg = small_config();
  const auto a = run_experiment(fixture(), cfg);
  const auto b = run_experiment(fixture(), cfg);
  CHECK(to_json(a).dump() == to_json(b).dump());

  REQUIRE(a.segments.size() == 4);
  CHECK(a.per_fold.size() == 5);
  CHECK(a.leakage_checks > 0);
  CHECK(a.leakage_violations == 0);
  for (const auto& s : a.segments) {
    CHECK(s.runs.size() == 5 * 2);
    for (const auto* cell : {&s.best, &s.worst})
      if (cell->mae) {
        CHECK(std::abs(*cell->mae - *cell->genre_case_mae * *cell->movie_case_mae) <= 1e-12);
        CHECK(*cell->mae >= 0.0);
      }
    if (s.filtered_mae) CHECK(*s.filtered_mae >= 0.0);
    REQUIRE(s.unfiltered_mae);
    for (const auto& run : s.runs) CHECK(run.users_evaluated + run.users_skipped > 0);
  }

  std::ostringstream csv;
  write_summary_csv(csv, a);
  const auto text = csv.str();
  CHECK(text.find("row,male,female,age_20_39,age_40_60") != std::string::npos);
  for (const char* row : {"\nbest,", "\nworst,", "\noverall,"}) CHECK(text.find(row) != std::string::npos);
  CHECK(format_summary(a).find("0.16043") != std::string::npos);

  const auto doc = to_json(a);
  CHECK(doc.at("master_seed") == cfg.master_seed);
  CHECK(doc.at("config").at("variant") == "hmrs_ra");
}

TEST_CASE("baselines share the report schema") {
  auto cfg = small_config();
  cfg.segments = {Segment::Female};
  const auto hmrs = run_experiment(fixture(), cfg);
  for (auto v : {Variant::PearsonKnn, Variant::CosineKnn, Variant::SomCfNoRa, Variant::RaNoSom}) {
    const auto r = run_baseline(fixture(), cfg, v);
    CHECK(r.variant == v);
    CHECK(r.segments.size() == 1);
    std::set<std::string> keys_a, keys_b;
    for (const auto& [k, _] : to_json(hmrs).items()) keys_a.insert(k);
    for (const auto& [k, _] : to_json(r).items()) keys_b.insert(k);
    CHECK(keys_a == keys_b);
  }
  std::ostringstream plot;
  const std::vector<EvaluationReport> reports{hmrs, run_baseline(fixture(), cfg, Variant::PearsonKnn)};
  write_plot_data(plot, reports);
  CHECK(plot.str().find("method,segment,metric,value") != std::string::npos);
  CHECK(plot.str().find("pearson_knn,female,") != std::string::npos);
}

TEST_CASE("thread count does not change results") {
  auto cfg = small_config();
  cfg.threads = 1;
  auto one = to_json(run_experiment(fixture(), cfg));
  cfg.threads = 4;
  auto four = to_json(run_experiment(fixture(), cfg));
  one.erase("config");
  four.erase("config");
  CHECK(one.dump() == four.dump());
}
