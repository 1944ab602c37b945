#include "hmrs/config.hpp"

#include <charconv>
#include <fstream>

#include "hmrs/errors.hpp"
#include "hmrs/random.hpp"

namespace hmrs {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "data.dir",      "data.ratings",   "data.users",        "data.movies",
      "segments",      "segment.strict_age", "som.clusters",  "som.epochs",
      "som.lr0",       "som.radius0",    "mlp.hidden",        "mlp.epochs",
      "mlp.lr",        "mlp.bypass",     "profile.threshold", "cf.neighbors",
      "cf.ra_degrees", "recommend.k",    "eval.folds",        "eval.repeats",
      "eval.threads",  "seed",           "output.dir"};
  return keys;
}

nlohmann::json to_json(const Config& c) {
  std::vector<std::string> segs;
  for (auto s : c.segments) segs.emplace_back(segment_name(s));
  return {
      {"data.dir", c.data_dir.string()},
      {"data.ratings", c.ratings().string()},
      {"data.users", c.users().string()},
      {"data.movies", c.movies().string()},
      {"segments", segs},
      {"segment.strict_age", c.strict_age},
      {"som.clusters", c.clusters},
      {"som.epochs", c.som_epochs},
      {"som.lr0", c.som_lr0},
      {"som.radius0", c.som_radius0 > 0.0 ? c.som_radius0 : static_cast<double>(c.clusters) / 2.0},
      {"mlp.hidden", c.mlp_hidden},
      {"mlp.epochs", c.mlp_epochs},
      {"mlp.lr", c.mlp_lr},
      {"mlp.bypass", c.mlp_bypass},
      {"profile.threshold", c.threshold},
      {"cf.neighbors", c.neighbor_rule == NeighborRule::Half ? "half" : "all"},
      {"cf.ra_degrees", c.ra_degrees == RaDegreeSource::Cluster ? "cluster" : "segment"},
      {"recommend.k", c.top_k},
      {"eval.folds", c.folds},
      {"eval.repeats", c.repeats},
      {"eval.threads", c.threads},
      {"seed", c.seed},
      {"output.dir", c.output_dir.string()},
  };
}

namespace {

template <typename T>
T get_as(const nlohmann::json& v, std::string_view key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("");
    } else {
      if (!v.is_string()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type: " + v.dump());
  }
}

std::vector<Segment> parse_segments(const nlohmann::json& v) {
  std::vector<std::string> names;
  if (v.is_string()) {
    std::string_view s = v.get_ref<const std::string&>();
    while (!s.empty()) {
      const auto comma = s.find(',');
      names.emplace_back(s.substr(0, comma));
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
    }
  } else if (v.is_array()) {
    for (const auto& x : v) names.push_back(get_as<std::string>(x, "segments"));
  } else {
    throw ConfigError("config key 'segments' must be a list or comma-separated string");
  }
  std::vector<Segment> out;
  for (const auto& n : names) {
    if (n == "all") {
      out.assign(std::begin(kAllSegments), std::end(kAllSegments));
      continue;
    }
    const auto s = segment_from_name(n);
    if (!s) throw ConfigError("unknown segment '" + n + "' (male, female, age_20_39, age_40_60, all)");
    out.push_back(*s);
  }
  return out;
}

}  // namespace

void apply_json(Config& c, const nlohmann::json& flat) {
  if (!flat.is_object()) throw ConfigError("config must be a JSON object of flat dotted keys");
  for (const auto& [key, v] : flat.items()) {
    if (key == "data.dir") c.data_dir = get_as<std::string>(v, key);
    else if (key == "data.ratings") c.ratings_path = get_as<std::string>(v, key);
    else if (key == "data.users") c.users_path = get_as<std::string>(v, key);
    else if (key == "data.movies") c.movies_path = get_as<std::string>(v, key);
    else if (key == "segments") c.segments = parse_segments(v);
    else if (key == "segment.strict_age") c.strict_age = get_as<bool>(v, key);
    else if (key == "som.clusters") c.clusters = get_as<std::size_t>(v, key);
    else if (key == "som.epochs") c.som_epochs = get_as<std::size_t>(v, key);
    else if (key == "som.lr0") c.som_lr0 = get_as<double>(v, key);
    else if (key == "som.radius0") c.som_radius0 = get_as<double>(v, key);
    else if (key == "mlp.hidden") c.mlp_hidden = get_as<std::size_t>(v, key);
    else if (key == "mlp.epochs") c.mlp_epochs = get_as<std::size_t>(v, key);
    else if (key == "mlp.lr") c.mlp_lr = get_as<double>(v, key);
    else if (key == "mlp.bypass") c.mlp_bypass = get_as<bool>(v, key);
    else if (key == "profile.threshold") c.threshold = get_as<double>(v, key);
    else if (key == "cf.neighbors") {
      const auto s = get_as<std::string>(v, key);
      if (s == "half") c.neighbor_rule = NeighborRule::Half;
      else if (s == "all") c.neighbor_rule = NeighborRule::All;
      else throw ConfigError("cf.neighbors must be 'half' or 'all'");
    } else if (key == "cf.ra_degrees") {
      const auto s = get_as<std::string>(v, key);
      if (s == "cluster") c.ra_degrees = RaDegreeSource::Cluster;
      else if (s == "segment") c.ra_degrees = RaDegreeSource::Segment;
      else throw ConfigError("cf.ra_degrees must be 'cluster' or 'segment'");
    } else if (key == "recommend.k") c.top_k = get_as<std::size_t>(v, key);
    else if (key == "eval.folds") c.folds = get_as<std::size_t>(v, key);
    else if (key == "eval.repeats") c.repeats = get_as<std::size_t>(v, key);
    else if (key == "eval.threads") c.threads = get_as<std::size_t>(v, key);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "output.dir") c.output_dir = get_as<std::string>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_override(Config& c, std::string_view key, std::string_view text) {
  const auto defaults = to_json(Config{});
  const auto it = defaults.find(std::string(key));
  if (it == defaults.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  nlohmann::json value;
  const std::string s(text);
  auto bad = [&] { return ConfigError("cannot parse '" + s + "' for " + std::string(key)); };
  if (it->is_boolean()) {
    if (s == "true" || s == "1") value = true;
    else if (s == "false" || s == "0") value = false;
    else throw bad();
  } else if (it->is_number_unsigned()) {
    std::uint64_t n = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || p != s.data() + s.size()) throw bad();
    value = n;
  } else if (it->is_number_float()) {
    try {
      std::size_t used = 0;
      value = std::stod(s, &used);
      if (used != s.size()) throw bad();
    } catch (const std::logic_error&) {
      throw bad();
    }
  } else {
    value = s;
  }
  apply_json(c, nlohmann::json{{std::string(key), value}});
}

Config load_config_file(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  apply_json(base, doc);
  return base;
}

void Config::validate() const {
  if (top_k < 1) throw ConfigError("recommend.k must be >= 1");
  experiment_config(*this).validate();
}

ExperimentConfig experiment_config(const Config& c) {
  ExperimentConfig e;
  e.segments = c.segments;
  e.strict_age = c.strict_age;
  e.offline.som.clusters = c.clusters;
  e.offline.som.epochs = c.som_epochs;
  e.offline.som.learning_rate = c.som_lr0;
  e.offline.som.radius = c.som_radius0;
  e.offline.mlp.hidden = c.mlp_hidden;
  e.offline.mlp.epochs = c.mlp_epochs;
  e.offline.mlp.learning_rate = c.mlp_lr;
  e.offline.bypass_mlp = c.mlp_bypass;
  e.neighbor_rule = c.neighbor_rule;
  e.ra_degrees = c.ra_degrees;
  e.threshold = c.threshold;
  e.folds = c.folds;
  e.repeats = c.repeats;
  e.master_seed = c.seed;
  e.threads = c.threads;
  return e;
}

OfflineOptions offline_options(const Config& c, Segment segment) {
  auto o = experiment_config(c).offline;
  o.som.seed = derive_seed(c.seed, "som/" + std::string(segment_name(segment)));
  o.mlp.seed = derive_seed(c.seed, "mlp/" + std::string(segment_name(segment)));
  return o;
}

OnlineOptions online_options(const Config& c) {
  OnlineOptions o;
  o.neighbors.rule = c.neighbor_rule;
  o.ra_degrees = c.ra_degrees;
  return o;
}

}  // namespace hmrs
