#include "hmrs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>

#include "hmrs/errors.hpp"
#include "hmrs/parallel.hpp"
#include "hmrs/random.hpp"

namespace hmrs {

// ---------------------------------------------------------------------------
// Folds

std::size_t FoldPlan::fold_size(std::size_t f) const {
  return static_cast<std::size_t>(std::count(fold_of.begin(), fold_of.end(), f));
}

FoldPlan make_folds(const RatingMatrix& matrix, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw ConfigError("make_folds: need at least 2 folds");
  if (matrix.empty()) throw ConfigError("make_folds: empty rating matrix");
  if (n_folds > matrix.size())
    throw ConfigError("make_folds: " + std::to_string(n_folds) + " folds for " +
                      std::to_string(matrix.size()) + " ratings");
  std::vector<std::size_t> order(matrix.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  FoldPlan plan;
  plan.seed = seed;
  plan.folds = n_folds;
  plan.fold_of.resize(matrix.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    plan.fold_of[order[pos]] = static_cast<std::uint32_t>(pos % n_folds);
  return plan;
}

FoldSplit split_fold(const RatingMatrix& matrix, const FoldPlan& plan, std::size_t fold) {
  if (plan.fold_of.size() != matrix.size()) throw ConfigError("fold plan does not match matrix");
  std::vector<RatingRecord> train;
  FoldSplit split;
  const auto records = matrix.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (plan.fold_of[i] == fold) {
      split.test.push_back(records[i]);
    } else {
      train.push_back(records[i]);
    }
  }
  split.train = RatingMatrix::from_records(std::move(train));
  return split;
}

bool check_no_leakage(const RatingMatrix& train, std::span<const RatingRecord> test) {
  return std::none_of(test.begin(), test.end(),
                      [&](const RatingRecord& r) { return train.rating(r.user, r.movie).has_value(); });
}

// ---------------------------------------------------------------------------

double mae(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw ConfigError("mae: length mismatch");
  if (predicted.empty()) throw ConfigError("mae: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) total += std::abs(predicted[i] - actual[i]);
  return total / static_cast<double>(predicted.size());
}

double combine_overall_mae(double genre_case_mae, double movie_case_mae) {
  if (genre_case_mae < 0.0 || movie_case_mae < 0.0)
    throw ConfigError("combine_overall_mae: errors must be non-negative");
  return genre_case_mae * movie_case_mae;
}

std::pair<GenreError, GenreError> pick_best_worst(std::span<const GenreError> per_genre) {
  if (per_genre.empty()) throw ConfigError("pick_best_worst: no genres");
  GenreError best = per_genre.front();
  GenreError worst = per_genre.front();
  for (const auto& g : per_genre.subspan(1)) {
    if (g.mae < best.mae) best = g;
    if (g.mae > worst.mae) worst = g;
  }
  return {best, worst};
}

GenreCaseResult genre_case_report(std::span<const PopularGenre> preferred,
                                  std::span<const ScoredRating> tests, const MovieCatalog& movies) {
  GenreCaseResult out;
  for (auto g : kPopularGenres) {
    if (std::find(preferred.begin(), preferred.end(), g) == preferred.end()) continue;
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& t : tests) {
      if (!movies.at(t.movie).has(g)) continue;
      total += std::abs(t.predicted - t.actual);
      ++n;
    }
    if (n > 0) out.per_genre.push_back({g, total / static_cast<double>(n)});
  }
  if (out.per_genre.empty()) return out;
  out.evaluated = true;
  std::tie(out.best, out.worst) = pick_best_worst(out.per_genre);
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::HmrsRa: return "hmrs_ra";
    case Variant::PearsonKnn: return "pearson_knn";
    case Variant::CosineKnn: return "cosine_knn";
    case Variant::SomCfNoRa: return "som_cf_no_ra";
    case Variant::RaNoSom: return "ra_no_som";
  }
  return "?";
}

std::optional<Variant> variant_from_name(std::string_view name) {
  for (auto v : kAllVariants)
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (segments.empty()) throw ConfigError("no segments selected");
  for (std::size_t i = 0; i < segments.size(); ++i)
    for (std::size_t j = i + 1; j < segments.size(); ++j)
      if (segments[i] == segments[j]) throw ConfigError("segment listed twice");
  if (folds < 2) throw ConfigError("eval.folds must be >= 2");
  if (repeats < 1) throw ConfigError("eval.repeats must be >= 1");
  if (offline.som.clusters < 1) throw ConfigError("som.clusters must be >= 1");
  if (offline.som.epochs < 1) throw ConfigError("som.epochs must be >= 1");
  if (!(offline.som.learning_rate > 0.0 && offline.som.learning_rate <= 1.0))
    throw ConfigError("som.lr0 must be in (0, 1]");
  if (offline.som.radius < 0.0) throw ConfigError("som.radius0 must be >= 0");
  if (offline.mlp.hidden < 1) throw ConfigError("mlp.hidden must be >= 1");
  if (offline.mlp.epochs < 1) throw ConfigError("mlp.epochs must be >= 1");
  if (!(offline.mlp.learning_rate > 0.0)) throw ConfigError("mlp.lr must be > 0");
  if (!(threshold >= kMinRating && threshold <= kMaxRating))
    throw ConfigError("profile.threshold must be in [1, 5]");
}

nlohmann::json to_json(const ExperimentConfig& c) {
  std::vector<std::string> segs;
  for (auto s : c.segments) segs.emplace_back(segment_name(s));
  return {
      {"segments", segs},
      {"segment.strict_age", c.strict_age},
      {"som.clusters", c.offline.som.clusters},
      {"som.epochs", c.offline.som.epochs},
      {"som.lr0", c.offline.som.learning_rate},
      {"som.radius0", c.offline.som.effective_radius()},
      {"mlp.hidden", c.offline.mlp.hidden},
      {"mlp.epochs", c.offline.mlp.epochs},
      {"mlp.lr", c.offline.mlp.learning_rate},
      {"mlp.bypass", c.offline.bypass_mlp},
      {"cf.neighbors", c.neighbor_rule == NeighborRule::Half ? "half" : "all"},
      {"cf.ra_degrees", c.ra_degrees == RaDegreeSource::Cluster ? "cluster" : "segment"},
      {"profile.threshold", c.threshold},
      {"eval.folds", c.folds},
      {"eval.repeats", c.repeats},
      {"seed", c.master_seed},
  };
}

std::optional<double> RunRecord::filtered_mae() const {
  if (filtered_count == 0) return std::nullopt;
  return filtered_abs_error / static_cast<double>(filtered_count);
}

std::optional<double> RunRecord::unfiltered_mae() const {
  if (unfiltered_count == 0) return std::nullopt;
  return unfiltered_abs_error / static_cast<double>(unfiltered_count);
}

const SegmentReport* EvaluationReport::find(Segment s) const noexcept {
  for (const auto& r : segments)
    if (r.segment == s) return &r;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Protocol

namespace {

struct VariantTraits {
  bool clustered;
  OnlineOptions online;
};

VariantTraits traits_of(Variant v, const ExperimentConfig& c) {
  VariantTraits t{};
  t.online.neighbors.rule = c.neighbor_rule;
  t.online.ra_degrees = c.ra_degrees;
  t.online.neighbors.kernel = v == Variant::CosineKnn ? SimilarityKernel::Cosine
                                                      : SimilarityKernel::Pearson;
  t.online.neighbors.use_ra = v == Variant::HmrsRa || v == Variant::RaNoSom;
  t.clustered = v == Variant::HmrsRa || v == Variant::SomCfNoRa;
  return t;
}

// [begin, end) of each user's records in a (user, movie)-ordered test list.
struct UserSlice {
  UserId user;
  std::size_t begin;
  std::size_t end;
};

std::vector<UserSlice> slice_by_user(std::span<const RatingRecord> test) {
  std::vector<UserSlice> out;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (out.empty() || out.back().user != test[i].user) out.push_back({test[i].user, i, i});
    out.back().end = i + 1;
  }
  return out;
}

struct FoldData {
  FoldSplit split;
  std::vector<UserSlice> users;
  std::vector<double> movie_case;  // aligned with split.test
};

std::optional<double> mean_of(const std::vector<std::optional<double>>& xs) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& x : xs)
    if (x) {
      total += *x;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return total / static_cast<double>(n);
}

std::optional<double> product(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return combine_overall_mae(*a, *b);
}

double slice_mae(std::span<const RatingRecord> test, std::span<const double> predicted,
                 const UserSlice& slice, const MovieCatalog& movies, PopularGenre g) {
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = slice.begin; i < slice.end; ++i) {
    if (!movies.at(test[i].movie).has(g)) continue;
    total += std::abs(predicted[i] - test[i].rating);
    ++n;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

RunRecord evaluate_run(const Dataset& data, const ExperimentConfig& config, const FoldData& fold,
                       const RatingMatrix& segment_train, const std::vector<UserId>& segment_members,
                       const HybridRecommender& recommender) {
  RunRecord run;
  const auto& test = fold.split.test;
  const auto& movies = data.movies;
  std::vector<ScoredRating> scored;
  for (const auto& slice : fold.users) {
    if (!std::binary_search(segment_members.begin(), segment_members.end(), slice.user)) continue;
    const auto active = recommender.activate(slice.user);
    scored.clear();
    for (std::size_t i = slice.begin; i < slice.end; ++i) {
      const auto p = recommender.predict(active, test[i].movie);
      ++run.provenance_counts[static_cast<std::size_t>(p.provenance)];
      scored.push_back({test[i].movie, test[i].rating, p.value});
      run.unfiltered_abs_error += std::abs(p.value - test[i].rating);
      ++run.unfiltered_count;
    }

    std::vector<PopularGenre> preferred;
    if (segment_train.has_user(slice.user))
      preferred = preferred_genres(genre_profile(segment_train, movies, slice.user), config.threshold).genres;

    for (const auto& s : scored) {
      const auto& movie = movies.at(s.movie);
      bool in_preferred = false;
      for (auto g : preferred) {
        if (!movie.has(g)) continue;
        in_preferred = true;
        run.genre_abs_error[index_of(g)] += std::abs(s.predicted - s.actual);
        ++run.genre_count[index_of(g)];
      }
      if (in_preferred) {
        run.filtered_abs_error += std::abs(s.predicted - s.actual);
        ++run.filtered_count;
      }
    }

    const auto gc = genre_case_report(preferred, scored, movies);
    if (!gc.evaluated) {
      ++run.users_skipped;
      continue;
    }
    ++run.users_evaluated;
    run.best_genre_case = run.best_genre_case.value_or(0.0) + gc.best.mae;
    run.worst_genre_case = run.worst_genre_case.value_or(0.0) + gc.worst.mae;
    run.best_movie_case = run.best_movie_case.value_or(0.0) +
                          slice_mae(test, fold.movie_case, slice, movies, gc.best.genre);
    run.worst_movie_case = run.worst_movie_case.value_or(0.0) +
                           slice_mae(test, fold.movie_case, slice, movies, gc.worst.genre);
  }
  if (run.users_evaluated > 0) {
    const double n = static_cast<double>(run.users_evaluated);
    *run.best_genre_case /= n;
    *run.worst_genre_case /= n;
    *run.best_movie_case /= n;
    *run.worst_movie_case /= n;
  }
  return run;
}

std::string run_component(std::string_view kind, Segment s, std::size_t fold, std::size_t repeat) {
  return std::string(kind) + "/" + std::string(segment_name(s)) + "/fold" + std::to_string(fold) +
         "/rep" + std::to_string(repeat);
}

SegmentReport aggregate(Segment s, std::size_t users, std::vector<RunRecord> runs) {
  SegmentReport r;
  r.segment = s;
  r.users = users;
  std::vector<std::optional<double>> bg, bm, wg, wm, filt, unfilt;
  std::array<double, kPopularGenreCount> genre_err{};
  std::array<std::size_t, kPopularGenreCount> genre_n{};
  for (const auto& run : runs) {
    bg.push_back(run.best_genre_case);
    bm.push_back(run.best_movie_case);
    wg.push_back(run.worst_genre_case);
    wm.push_back(run.worst_movie_case);
    filt.push_back(run.filtered_mae());
    unfilt.push_back(run.unfiltered_mae());
    for (std::size_t g = 0; g < kPopularGenreCount; ++g) {
      genre_err[g] += run.genre_abs_error[g];
      genre_n[g] += run.genre_count[g];
    }
    r.users_evaluated += run.users_evaluated;
    r.users_skipped += run.users_skipped;
  }
  r.best = {mean_of(bg), mean_of(bm), std::nullopt};
  r.best.mae = product(r.best.genre_case_mae, r.best.movie_case_mae);
  r.worst = {mean_of(wg), mean_of(wm), std::nullopt};
  r.worst.mae = product(r.worst.genre_case_mae, r.worst.movie_case_mae);
  if (r.best.mae && r.worst.mae) r.overall = (*r.best.mae + *r.worst.mae) / 2.0;
  r.filtered_mae = mean_of(filt);
  r.unfiltered_mae = mean_of(unfilt);
  for (std::size_t g = 0; g < kPopularGenreCount; ++g)
    if (genre_n[g] > 0) r.per_genre_mae[g] = genre_err[g] / static_cast<double>(genre_n[g]);
  r.runs = std::move(runs);
  return r;
}

EvaluationReport run_protocol(const Dataset& data, const ExperimentConfig& config, Variant variant) {
  config.validate();
  const auto traits = traits_of(variant, config);
  const std::size_t folds = config.folds;
  const auto plan = make_folds(data.ratings, folds, derive_seed(config.master_seed, "folds"));

  // Per fold: split, then movie-case predictions from the unsegmented,
  // unclustered predictor over the whole training matrix.
  std::vector<FoldData> fold_data(folds);
  OnlineOptions movie_case_online = traits.online;
  movie_case_online.ra_degrees = RaDegreeSource::Cluster;
  parallel_for(folds, config.threads, [&](std::size_t f) {
    auto& fd = fold_data[f];
    fd.split = split_fold(data.ratings, plan, f);
    fd.users = slice_by_user(fd.split.test);
    auto model = std::make_shared<const SegmentModel>(single_cluster_model(fd.split.train, data.movies));
    const HybridRecommender full(fd.split.train, data.movies, model, movie_case_online);
    fd.movie_case.resize(fd.split.test.size());
    for (const auto& slice : fd.users) {
      const auto active = full.activate(slice.user);
      for (std::size_t i = slice.begin; i < slice.end; ++i)
        fd.movie_case[i] = full.predict(active, fd.split.test[i].movie).value;
    }
  });

  EvaluationReport report;
  report.variant = variant;
  report.folds = folds;
  report.repeats = config.repeats;
  report.master_seed = config.master_seed;
  report.config = to_json(config);
  report.config["variant"] = std::string(variant_name(variant));

  std::size_t checks = 0, violations = 0;
  auto leak_check = [&](const RatingMatrix& m, const FoldData& fd) {
    ++checks;
    if (!check_no_leakage(m, fd.split.test)) ++violations;
  };
  if (config.check_leakage)
    for (const auto& fd : fold_data) leak_check(fd.split.train, fd);

  const std::size_t n_seg = config.segments.size();
  std::vector<std::vector<UserId>> members(n_seg);
  for (std::size_t s = 0; s < n_seg; ++s)
    members[s] = segment_users(data.users, SegmentSpec(config.segments[s]), config.strict_age);

  std::vector<RatingMatrix> segment_train(n_seg * folds);
  parallel_for(n_seg * folds, config.threads, [&](std::size_t i) {
    const auto s = i / folds, f = i % folds;
    if (members[s].empty())
      throw DataError("segment " + std::string(segment_name(config.segments[s])) + " has no users");
    segment_train[i] = fold_data[f].split.train.restrict(members[s]);
  });
  if (config.check_leakage)
    for (std::size_t i = 0; i < segment_train.size(); ++i) leak_check(segment_train[i], fold_data[i % folds]);

  // Unclustered predictors have no random state, so one repeat stands for all.
  const std::size_t distinct_repeats = traits.clustered ? config.repeats : 1;
  const std::size_t tasks = n_seg * folds * distinct_repeats;
  std::vector<RunRecord> runs(tasks);
  std::vector<std::size_t> task_checks(tasks, 0), task_violations(tasks, 0);
  parallel_for(tasks, config.threads, [&](std::size_t t) {
    const std::size_t s = t / (folds * distinct_repeats);
    const std::size_t f = (t / distinct_repeats) % folds;
    const std::size_t r = t % distinct_repeats;
    const Segment seg = config.segments[s];
    const auto& seg_train = segment_train[s * folds + f];

    std::shared_ptr<const SegmentModel> model;
    if (traits.clustered) {
      OfflineOptions offline = config.offline;
      offline.som.seed = derive_seed(config.master_seed, run_component("som", seg, f, r));
      offline.mlp.seed = derive_seed(config.master_seed, run_component("mlp", seg, f, r));
      model = std::make_shared<const SegmentModel>(train_segment_model(seg_train, data.movies, offline));
    } else {
      model = std::make_shared<const SegmentModel>(single_cluster_model(seg_train, data.movies));
    }
    const HybridRecommender recommender(seg_train, data.movies, model, traits.online);
    if (config.check_leakage) {
      for (std::size_t c = 0; c < model->clusters(); ++c) {
        ++task_checks[t];
        if (!check_no_leakage(recommender.cluster_matrix(c), fold_data[f].split.test)) ++task_violations[t];
      }
    }
    runs[t] = evaluate_run(data, config, fold_data[f], seg_train, members[s], recommender);
    runs[t].fold = f;
    runs[t].repeat = r;
  });
  checks += std::accumulate(task_checks.begin(), task_checks.end(), std::size_t{0});
  violations += std::accumulate(task_violations.begin(), task_violations.end(), std::size_t{0});
  report.leakage_checks = checks;
  report.leakage_violations = violations;

  for (std::size_t s = 0; s < n_seg; ++s) {
    std::vector<RunRecord> seg_runs;
    for (std::size_t f = 0; f < folds; ++f)
      for (std::size_t r = 0; r < config.repeats; ++r) {
        RunRecord run = runs[(s * folds + f) * distinct_repeats + std::min(r, distinct_repeats - 1)];
        run.repeat = r;
        seg_runs.push_back(std::move(run));
      }
    report.segments.push_back(aggregate(config.segments[s], members[s].size(), std::move(seg_runs)));
  }

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::optional<double>> filt, unfilt;
    for (const auto& seg : report.segments) {
      std::vector<std::optional<double>> rf, ru;
      for (const auto& run : seg.runs)
        if (run.fold == f) {
          rf.push_back(run.filtered_mae());
          ru.push_back(run.unfiltered_mae());
        }
      filt.push_back(mean_of(rf));
      unfilt.push_back(mean_of(ru));
    }
    report.per_fold.push_back({f, mean_of(filt), mean_of(unfilt)});
  }
  return report;
}

}  // namespace

EvaluationReport run_experiment(const Dataset& data, const ExperimentConfig& config) {
  return run_protocol(data, config, Variant::HmrsRa);
}

EvaluationReport run_baseline(const Dataset& data, const ExperimentConfig& config, Variant variant) {
  return run_protocol(data, config, variant);
}

// ---------------------------------------------------------------------------
// Output

namespace {

nlohmann::json opt(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

nlohmann::json cell_json(const CaseCell& c) {
  return {{"genre_case_mae", opt(c.genre_case_mae)},
          {"movie_case_mae", opt(c.movie_case_mae)},
          {"mae", opt(c.mae)}};
}

const PublishedSummary* published(Segment s) {
  for (const auto& p : kPublishedSummary)
    if (p.segment == s) return &p;
  return nullptr;
}

std::string fmt(const std::optional<double>& x, int precision = 5) {
  if (!x) return "NA";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *x;
  return os.str();
}

}  // namespace

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : report.segments) {
    nlohmann::json per_genre = nlohmann::json::object();
    for (auto g : kPopularGenres) per_genre[std::string(name_of(g))] = opt(s.per_genre_mae[index_of(g)]);
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : s.runs) {
      nlohmann::json prov = nlohmann::json::object();
      for (std::size_t p = 0; p < r.provenance_counts.size(); ++p)
        prov[std::string(provenance_name(static_cast<Provenance>(p)))] = r.provenance_counts[p];
      runs.push_back({{"fold", r.fold},
                      {"repeat", r.repeat},
                      {"best_genre_case_mae", opt(r.best_genre_case)},
                      {"best_movie_case_mae", opt(r.best_movie_case)},
                      {"worst_genre_case_mae", opt(r.worst_genre_case)},
                      {"worst_movie_case_mae", opt(r.worst_movie_case)},
                      {"filtered_mae", opt(r.filtered_mae())},
                      {"filtered_count", r.filtered_count},
                      {"unfiltered_mae", opt(r.unfiltered_mae())},
                      {"unfiltered_count", r.unfiltered_count},
                      {"users_evaluated", r.users_evaluated},
                      {"users_skipped", r.users_skipped},
                      {"provenance", prov}});
    }
    nlohmann::json entry = {{"segment", std::string(segment_name(s.segment))},
                            {"users", s.users},
                            {"best", cell_json(s.best)},
                            {"worst", cell_json(s.worst)},
                            {"overall", opt(s.overall)},
                            {"filtered_mae", opt(s.filtered_mae)},
                            {"unfiltered_mae", opt(s.unfiltered_mae)},
                            {"per_genre_mae", per_genre},
                            {"users_evaluated", s.users_evaluated},
                            {"users_skipped", s.users_skipped},
                            {"runs", runs}};
    if (const auto* p = published(s.segment))
      entry["published"] = {{"best", p->best}, {"worst", p->worst}, {"overall", p->overall}};
    segs.push_back(std::move(entry));
  }
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.per_fold)
    folds.push_back({{"fold", f.fold},
                     {"filtered_mae", opt(f.filtered_mae)},
                     {"unfiltered_mae", opt(f.unfiltered_mae)}});
  return {{"format", "hmrs.report"},
          {"version", 1},
          {"variant", std::string(variant_name(report.variant))},
          {"folds", report.folds},
          {"repeats", report.repeats},
          {"master_seed", report.master_seed},
          {"config", report.config},
          {"segments", segs},
          {"per_fold", folds},
          {"leakage", {{"checks", report.leakage_checks}, {"violations", report.leakage_violations}}}};
}

void write_summary_csv(std::ostream& out, const EvaluationReport& report) {
  out << "# variant=" << variant_name(report.variant) << " seed=" << report.master_seed
      << " config=" << report.config.dump() << '\n';
  out << "row";
  for (const auto& s : report.segments) out << ',' << segment_name(s.segment);
  out << '\n';
  auto row = [&](std::string_view name, auto&& get) {
    out << name;
    for (const auto& s : report.segments) out << ',' << fmt(get(s), 6);
    out << '\n';
  };
  row("best", [](const SegmentReport& s) { return s.best.mae; });
  row("worst", [](const SegmentReport& s) { return s.worst.mae; });
  row("overall", [](const SegmentReport& s) { return s.overall; });
  row("best_genre_case", [](const SegmentReport& s) { return s.best.genre_case_mae; });
  row("best_movie_case", [](const SegmentReport& s) { return s.best.movie_case_mae; });
  row("worst_genre_case", [](const SegmentReport& s) { return s.worst.genre_case_mae; });
  row("worst_movie_case", [](const SegmentReport& s) { return s.worst.movie_case_mae; });
  row("filtered_mae", [](const SegmentReport& s) { return s.filtered_mae; });
  row("unfiltered_mae", [](const SegmentReport& s) { return s.unfiltered_mae; });
  auto published_row = [&](std::string_view name, double PublishedSummary::*field) {
    row(name, [field](const SegmentReport& s) -> std::optional<double> {
      if (const auto* p = published(s.segment)) return p->*field;
      return std::nullopt;
    });
  };
  published_row("published_best", &PublishedSummary::best);
  published_row("published_worst", &PublishedSummary::worst);
  published_row("published_overall", &PublishedSummary::overall);
}

void write_plot_data(std::ostream& out, std::span<const EvaluationReport> reports) {
  out << "method,segment,metric,value\n";
  for (const auto& r : reports) {
    for (const auto& s : r.segments) {
      const auto method = variant_name(r.variant);
      const auto seg = segment_name(s.segment);
      auto line = [&](std::string_view metric, const std::optional<double>& v) {
        out << method << ',' << seg << ',' << metric << ',' << fmt(v, 6) << '\n';
      };
      line("best", s.best.mae);
      line("worst", s.worst.mae);
      line("overall", s.overall);
      line("filtered_mae", s.filtered_mae);
      line("unfiltered_mae", s.unfiltered_mae);
    }
  }
}

std::string format_summary(const EvaluationReport& report) {
  std::ostringstream os;
  os << "MAE by segment (" << variant_name(report.variant) << ", " << report.folds << " folds x "
     << report.repeats << " repeats, seed " << report.master_seed << ")\n";
  os << std::left << std::setw(16) << "";
  for (const auto& s : report.segments) os << std::setw(22) << segment_name(s.segment);
  os << '\n';
  auto row = [&](std::string_view name, auto&& measured, double PublishedSummary::*field) {
    os << std::left << std::setw(16) << name;
    for (const auto& s : report.segments) {
      std::string cell = fmt(measured(s));
      if (field && report.variant == Variant::HmrsRa)
        if (const auto* p = published(s.segment)) cell += " (pub " + fmt(p->*field) + ")";
      os << std::setw(22) << cell;
    }
    os << '\n';
  };
  row("best case", [](const SegmentReport& s) { return s.best.mae; }, &PublishedSummary::best);
  row("worst case", [](const SegmentReport& s) { return s.worst.mae; }, &PublishedSummary::worst);
  row("overall", [](const SegmentReport& s) { return s.overall; }, &PublishedSummary::overall);
  row("filtered MAE", [](const SegmentReport& s) { return s.filtered_mae; }, nullptr);
  row("unfiltered MAE", [](const SegmentReport& s) { return s.unfiltered_mae; }, nullptr);
  os << std::left << std::setw(16) << "users eval/skip";
  for (const auto& s : report.segments)
    os << std::setw(22) << (std::to_string(s.users_evaluated) + "/" + std::to_string(s.users_skipped));
  os << '\n';
  return os.str();
}

}  // namespace hmrs
