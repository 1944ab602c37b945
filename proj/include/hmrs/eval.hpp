#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hmrs/genre.hpp"
#include "hmrs/hybrid.hpp"
#include "hmrs/ingest.hpp"

namespace hmrs {

// ---------------------------------------------------------------------------
// Folds

/// Assignment of every record of a matrix (in records() order) to a fold.
struct FoldPlan {
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  std::vector<std::uint32_t> fold_of;

  std::size_t fold_size(std::size_t f) const;
};

/// Uniform random partition with fold sizes differing by at most one.
/// Throws ConfigError when n_folds < 2 or exceeds the rating count.
FoldPlan make_folds(const RatingMatrix& matrix, std::size_t n_folds, std::uint64_t seed);

struct FoldSplit {
  RatingMatrix train;
  std::vector<RatingRecord> test;  // ordered by (user, movie)
};

FoldSplit split_fold(const RatingMatrix& matrix, const FoldPlan& plan, std::size_t fold);

/// True when no test (user, movie) pair is present in `train`.
bool check_no_leakage(const RatingMatrix& train, std::span<const RatingRecord> test);

// ---------------------------------------------------------------------------
// Error arithmetic

/// Mean absolute error. Throws ConfigError on empty or unequal inputs.
double mae(std::span<const double> predicted, std::span<const double> actual);

/// Overall case error as the product of the genre-case and movie-case errors.
double combine_overall_mae(double genre_case_mae, double movie_case_mae);

// ---------------------------------------------------------------------------
// Genre-case pipeline for one active user

struct ScoredRating {
  MovieId movie = 0;
  double actual = 0.0;
  double predicted = 0.0;
};

struct GenreError {
  PopularGenre genre = PopularGenre::Action;
  double mae = 0.0;
};

struct GenreCaseResult {
  bool evaluated = false;        // false: no preferred genre had test ratings
  std::vector<GenreError> per_genre;  // preferred genres with test data, genre order
  GenreError best;   // lowest MAE
  GenreError worst;  // highest MAE
};

/// Lowest and highest error entries; ties keep the earlier genre. Input must
/// be nonempty and in genre order.
std::pair<GenreError, GenreError> pick_best_worst(std::span<const GenreError> per_genre);

/// Per preferred genre, the MAE over the user's test ratings of movies in
/// that genre; then the best and worst genres.
GenreCaseResult genre_case_report(std::span<const PopularGenre> preferred,
                                  std::span<const ScoredRating> tests, const MovieCatalog& movies);

// ---------------------------------------------------------------------------
// Experiments

enum class Variant { HmrsRa, PearsonKnn, CosineKnn, SomCfNoRa, RaNoSom };

inline constexpr Variant kAllVariants[] = {Variant::HmrsRa, Variant::PearsonKnn, Variant::CosineKnn,
                                           Variant::SomCfNoRa, Variant::RaNoSom};

std::string_view variant_name(Variant v) noexcept;
std::optional<Variant> variant_from_name(std::string_view name);

struct ExperimentConfig {
  std::vector<Segment> segments{std::begin(kAllSegments), std::end(kAllSegments)};
  bool strict_age = false;
  OfflineOptions offline;  // seeds inside are ignored; derived from master_seed
  NeighborRule neighbor_rule = NeighborRule::Half;
  RaDegreeSource ra_degrees = RaDegreeSource::Cluster;
  double threshold = kDefaultPreferredThreshold;
  std::size_t folds = 5;
  std::size_t repeats = 10;
  std::uint64_t master_seed = 20201120;
  std::size_t threads = 0;
  bool check_leakage = true;

  /// Throws ConfigError describing the first invalid field.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);

/// Raw numbers of one (segment, fold, repeat) run.
struct RunRecord {
  std::size_t fold = 0;
  std::size_t repeat = 0;
  std::optional<double> best_genre_case;  // means over evaluated users
  std::optional<double> best_movie_case;
  std::optional<double> worst_genre_case;
  std::optional<double> worst_movie_case;
  double filtered_abs_error = 0.0;
  std::size_t filtered_count = 0;
  double unfiltered_abs_error = 0.0;
  std::size_t unfiltered_count = 0;
  std::array<double, kPopularGenreCount> genre_abs_error{};
  std::array<std::size_t, kPopularGenreCount> genre_count{};
  std::size_t users_evaluated = 0;
  std::size_t users_skipped = 0;
  std::array<std::size_t, 4> provenance_counts{};  // by Provenance

  std::optional<double> filtered_mae() const;
  std::optional<double> unfiltered_mae() const;
};

struct CaseCell {
  std::optional<double> genre_case_mae;
  std::optional<double> movie_case_mae;
  std::optional<double> mae;  // genre_case_mae * movie_case_mae
};

struct SegmentReport {
  Segment segment = Segment::Male;
  std::size_t users = 0;
  CaseCell best;
  CaseCell worst;
  std::optional<double> overall;  // mean of the best and worst cells
  std::optional<double> filtered_mae;
  std::optional<double> unfiltered_mae;
  std::array<std::optional<double>, kPopularGenreCount> per_genre_mae{};
  std::size_t users_evaluated = 0;  // summed over runs
  std::size_t users_skipped = 0;
  std::vector<RunRecord> runs;
};

struct FoldSummary {
  std::size_t fold = 0;
  std::optional<double> filtered_mae;    // mean over segments of the repeat means
  std::optional<double> unfiltered_mae;
};

struct EvaluationReport {
  Variant variant = Variant::HmrsRa;
  std::size_t folds = 0;
  std::size_t repeats = 0;
  std::uint64_t master_seed = 0;
  nlohmann::json config;  // effective configuration snapshot
  std::vector<SegmentReport> segments;
  std::vector<FoldSummary> per_fold;
  std::size_t leakage_checks = 0;
  std::size_t leakage_violations = 0;

  const SegmentReport* find(Segment s) const noexcept;
};

/// Full protocol: folds over the whole rating matrix, then per segment and
/// repeat the offline phase on the training part and predictions for the
/// held-out part. The movie-case errors come from the same predictor run
/// without segments or clusters on the whole training matrix.
EvaluationReport run_experiment(const Dataset& data, const ExperimentConfig& config);

/// Same protocol with an ablated or baseline predictor.
EvaluationReport run_baseline(const Dataset& data, const ExperimentConfig& config, Variant variant);

// ---------------------------------------------------------------------------
// Report output

/// Published per-segment values for the HMRS-RA row layout (best, worst, overall).
struct PublishedSummary {
  Segment segment;
  double best;
  double worst;
  double overall;
};
inline constexpr PublishedSummary kPublishedSummary[] = {
    {Segment::Male, 0.16043, 0.30656, 0.233495},
    {Segment::Female, 0.23653, 0.45268, 0.344605},
    {Segment::Age20To39, 0.16881, 0.29701, 0.23291},
    {Segment::Age40To60, 0.23584, 0.44450, 0.34017},
};

nlohmann::json to_json(const EvaluationReport& report);

/// Rows best/worst/overall plus filtered and unfiltered MAE; one column per segment.
void write_summary_csv(std::ostream& out, const EvaluationReport& report);

/// Long-form series: method,segment,metric,value.
void write_plot_data(std::ostream& out, std::span<const EvaluationReport> reports);

/// Human-readable table with measured values next to the published ones.
std::string format_summary(const EvaluationReport& report);

}  // namespace hmrs
