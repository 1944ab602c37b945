#include "hmrs/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "hmrs/errors.hpp"
#include "hmrs/eval.hpp"

namespace hmrs {
namespace fs = std::filesystem;

namespace {

std::string config_comment(const Config& config) {
  return "# config: " + to_json(config).dump() + "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing model file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Dataset load(const Config& c) { return load_dataset(c.ratings(), c.users(), c.movies()); }

RatingMatrix segment_matrix(const Dataset& data, const Config& c, Segment s) {
  const auto members = segment_users(data.users, SegmentSpec(s), c.strict_age);
  if (members.empty()) throw DataError("segment " + std::string(segment_name(s)) + " has no users");
  return data.ratings.restrict(members);
}

// --- inspect ---------------------------------------------------------------

int cmd_inspect(const Config& c, std::ostream& out) {
  const auto data = load(c);
  out << data.users.size() << " users, " << data.movies.size() << " movies, " << data.ratings.size()
      << " ratings\n";
  if (data.stats.duplicate_ratings > 0)
    out << "warning: " << data.stats.duplicate_ratings
        << " duplicate (user, movie) ratings, kept the last occurrence\n";
  if (data.stats.non_ascii_titles > 0)
    out << data.stats.non_ascii_titles << " titles contain non-ASCII bytes\n";
  out << "segments:\n";
  for (auto s : kAllSegments) {
    const auto members = segment_users(data.users, SegmentSpec(s), c.strict_age);
    std::size_t ratings = 0;
    for (const auto u : members) ratings += data.ratings.row(u).size();
    out << "  " << std::left << std::setw(10) << segment_name(s) << std::right << std::setw(5)
        << members.size() << " users " << std::setw(7) << ratings << " ratings\n";
  }
  out << "genre coverage (movies / ratings):\n";
  for (auto g : kPopularGenres) {
    std::size_t movies = 0, ratings = 0;
    for (const auto& m : data.movies.movies())
      if (m.has(g)) {
        ++movies;
        ratings += data.ratings.rater_count(m.id);
      }
    out << "  " << std::left << std::setw(10) << name_of(g) << std::right << std::setw(5) << movies
        << " movies " << std::setw(7) << ratings << " ratings\n";
  }
  return kExitOk;
}

// --- train -----------------------------------------------------------------

int cmd_train(const Config& c, std::ostream& out) {
  const auto data = load(c);
  fs::create_directories(c.output_dir / "models");
  write_json(c.output_dir / "models" / "config.json", to_json(c));
  for (auto s : c.segments) {
    const auto matrix = segment_matrix(data, c, s);
    const auto model = train_segment_model(matrix, data.movies, offline_options(c, s));
    const auto dir = model_dir(c.output_dir, s);
    save_segment_model(dir, model, c);
    out << segment_name(s) << ": " << matrix.user_count() << " users in " << model.clusters()
        << " clusters (";
    for (std::size_t k = 0; k < model.clusters(); ++k)
      out << (k ? ", " : "") << model.members[k].size();
    out << ") -> " << dir.string() << "\n";
  }
  return kExitOk;
}

// --- recommend -------------------------------------------------------------

int cmd_recommend(const Config& c, long long user_arg, const std::string& segment_arg,
                  std::ostream& out) {
  if (user_arg <= 0) throw ConfigError("--user must be a positive user id");
  const auto user = static_cast<UserId>(user_arg);
  const auto data = load(c);
  const auto* record = data.find_user(user);
  if (!record) throw DataError("unknown user id " + std::to_string(user));

  Segment segment = record->gender == Gender::Male ? Segment::Male : Segment::Female;
  if (!segment_arg.empty()) {
    const auto s = segment_from_name(segment_arg);
    if (!s) throw ConfigError("unknown segment '" + segment_arg + "'");
    segment = *s;
  }
  const auto members = segment_users(data.users, SegmentSpec(segment), c.strict_age);
  if (!std::binary_search(members.begin(), members.end(), user))
    throw ConfigError("user " + std::to_string(user) + " is not in segment " +
                      std::string(segment_name(segment)));

  const auto matrix = data.ratings.restrict(members);
  auto model = std::make_shared<const SegmentModel>(
      load_segment_model(model_dir(c.output_dir, segment), matrix, data.movies));
  const HybridRecommender recommender(matrix, data.movies, model, online_options(c));
  const auto list = recommender.recommend(user, c.top_k);

  std::ostringstream csv;
  csv << config_comment(c) << "rank,movie_id,title,predicted,provenance\n";
  if (list.empty()) {
    out << "user " << user << " has rated every movie in the catalog; nothing to recommend\n";
  } else {
    out << "top " << list.size() << " for user " << user << " (" << segment_name(segment)
        << ", cluster " << recommender.classify(user) << ")\n";
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& p = list[i];
    const auto& title = data.movies.at(p.movie).title;
    out << std::setw(3) << i + 1 << "  " << std::setw(5) << p.movie << "  " << std::fixed
        << std::setprecision(4) << p.value << "  " << std::left << std::setw(18)
        << provenance_name(p.provenance) << std::right << "  " << title << "\n";
    std::string quoted = title;
    for (std::size_t pos = 0; (pos = quoted.find('"', pos)) != std::string::npos; pos += 2)
      quoted.insert(pos, 1, '"');
    csv << i + 1 << ',' << p.movie << ",\"" << quoted << "\"," << std::setprecision(17)
        << std::defaultfloat << p.value << ',' << provenance_name(p.provenance) << '\n';
  }
  const auto path = c.output_dir / "recommend" / ("user" + std::to_string(user) + ".csv");
  write_text(path, csv.str());
  out << "written to " << path.string() << "\n";
  return kExitOk;
}

// --- evaluate --------------------------------------------------------------

std::string timestamp_name() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "run-%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

int cmd_evaluate(const Config& c, const std::string& variant_arg, std::string run_name,
                 std::ostream& out) {
  std::vector<Variant> variants;
  if (variant_arg == "all") {
    variants.assign(std::begin(kAllVariants), std::end(kAllVariants));
  } else {
    const auto v = variant_from_name(variant_arg);
    if (!v) throw ConfigError("unknown variant '" + variant_arg + "'");
    variants.push_back(*v);
  }
  const auto exp = experiment_config(c);
  exp.validate();
  const auto data = load(c);

  if (run_name.empty()) run_name = timestamp_name();
  const auto dir = c.output_dir / "evaluate" / run_name;
  std::vector<EvaluationReport> reports;
  for (const auto v : variants) {
    auto report = run_baseline(data, exp, v);
    report.config = to_json(c);
    report.config["variant"] = std::string(variant_name(v));
    const std::string name(variant_name(v));
    write_json(dir / ("report_" + name + ".json"), to_json(report));
    std::ostringstream table;
    write_summary_csv(table, report);
    write_text(dir / ("summary_" + name + ".csv"), table.str());
    out << format_summary(report) << "\n";
    reports.push_back(std::move(report));
  }
  std::ostringstream plot;
  plot << config_comment(c);
  write_plot_data(plot, reports);
  write_text(dir / "plot_data.csv", plot.str());
  out << "reports written to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

fs::path model_dir(const fs::path& output_dir, Segment segment) {
  return output_dir / "models" / std::string(segment_name(segment));
}

void save_segment_model(const fs::path& dir, const SegmentModel& model, const Config& config) {
  const auto cfg = to_json(config);
  auto som = to_json(model.som);
  som["config"] = cfg;
  write_json(dir / "som.json", som);
  auto mlp = to_json(model.mlp);
  mlp["config"] = cfg;
  write_json(dir / "mlp.json", mlp);
  write_json(dir / "clusters.json", {{"format", "hmrs.clusters"},
                                     {"version", 1},
                                     {"bypass_mlp", model.bypass_mlp},
                                     {"members", model.members},
                                     {"config", cfg}});
  for (std::size_t k = 0; k < model.clusters(); ++k) {
    std::ostringstream csv;
    csv << config_comment(config);
    write_genre_csv(csv, model.cluster_genres[k]);
    write_text(dir / ("genres_c" + std::to_string(k) + ".csv"), csv.str());
  }
}

SegmentModel load_segment_model(const fs::path& dir, const RatingMatrix& segment,
                                const MovieCatalog& movies) {
  SegmentModel m;
  m.clustered = true;
  m.som = som_from_json(read_json(dir / "som.json"));
  m.mlp = mlp_from_json(read_json(dir / "mlp.json"));
  const auto clusters = read_json(dir / "clusters.json");
  try {
    if (clusters.at("format") != "hmrs.clusters") throw DataError("not a cluster membership file");
    m.bypass_mlp = clusters.at("bypass_mlp").get<bool>();
    m.members = clusters.at("members").get<std::vector<std::vector<UserId>>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError((dir / "clusters.json").string() + ": " + e.what());
  }
  if (m.members.size() != m.som.clusters() || m.mlp.outputs != m.som.clusters())
    throw DataError("model files in " + dir.string() + " disagree on the cluster count");
  for (const auto& members : m.members) m.cluster_genres.push_back(build_genre_matrix(segment, movies, members));
  return m;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid movie recommender: demographic segments, SOM clusters and "
               "resource-allocation weighted collaborative filtering"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "JSON file of flat dotted keys");
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> flag_values(config_keys().size());
  for (std::size_t i = 0; i < config_keys().size(); ++i) {
    const auto& key = config_keys()[i];
    app.add_option("--" + key, flag_values[i], "config key " + key);
  }

  auto* inspect = app.add_subcommand("inspect", "Summarise the dataset");
  auto* train = app.add_subcommand("train", "Run the offline phase and write models");
  auto* recommend = app.add_subcommand("recommend", "Top-K movies for one user");
  long long user = 0;
  std::string segment;
  long long k_flag = -1;
  recommend->add_option("--user", user, "user id")->required();
  recommend->add_option("--segment", segment, "segment whose models to use (default: by gender)");
  recommend->add_option("-k,--k", k_flag, "list length (overrides recommend.k)");
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated MAE report");
  std::string variant = "hmrs_ra";
  std::string run_name;
  evaluate->add_option("--variant", variant,
                       "hmrs_ra, pearson_knn, cosine_knn, som_cf_no_ra, ra_no_som or all");
  evaluate->add_option("--run-name", run_name, "output subdirectory (default: UTC timestamp)");

  std::vector<std::string> argv_store(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_store.begin(), argv_store.end());
  try {
    app.parse(argv_store);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    Config config = config_file.empty() ? Config{} : load_config_file(config_file);
    for (std::size_t i = 0; i < config_keys().size(); ++i) {
      const auto* opt = app.get_option("--" + config_keys()[i]);
      if (opt->count() > 0) apply_override(config, config_keys()[i], flag_values[i]);
    }
    if (recommend->parsed() && k_flag >= 0) {
      if (k_flag == 0) throw ConfigError("K must be >= 1");
      config.top_k = static_cast<std::size_t>(k_flag);
    }
    config.validate();

    if (inspect->parsed()) return cmd_inspect(config, out);
    if (train->parsed()) return cmd_train(config, out);
    if (recommend->parsed()) return cmd_recommend(config, user, segment, out);
    if (evaluate->parsed()) return cmd_evaluate(config, variant, run_name, out);
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace hmrs
