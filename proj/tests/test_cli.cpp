#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "hmrs/cli.hpp"
#include "hmrs/errors.hpp"
#include "support.hpp"

using namespace hmrs;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hmrs");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("hmrs_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

std::vector<std::string> fixture_args(const TempDir& out) {
  return {"--data.dir", testing::fixture_dir().string(), "--output.dir", out.str()};
}

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> more) {
  base.insert(base.begin(), more.begin(), more.end());
  return base;
}

}  // namespace

TEST_CASE("inspect") {
  TempDir out("inspect");
  auto r = cli(with(fixture_args(out), {"inspect"}));
  CHECK(r.code == 0);
  CHECK(r.out.find("30 users, 121 movies, 692 ratings") != std::string::npos);
  CHECK(r.out.find("age_40_60") != std::string::npos);
  CHECK(r.out.find("Romance") != std::string::npos);

  r = cli({"inspect", "--data.dir", "/no/such/dir"});
  CHECK(r.code == 2);
  CHECK(r.err.find("/no/such/dir/u.data") != std::string::npos);

  TempDir empty("empty");
  std::ofstream(empty.path() / "u.data").close();
  fs::copy_file(testing::fixture_dir() / "u.user", empty.path() / "u.user");
  fs::copy_file(testing::fixture_dir() / "u.item", empty.path() / "u.item");
  r = cli({"inspect", "--data.dir", empty.str()});
  CHECK(r.code == 0);
  CHECK(r.out.find("30 users, 121 movies, 0 ratings") != std::string::npos);

  TempDir bad("bad");
  {
    std::ofstream(bad.path() / "u.data") << "1\t1\t3\t0\n1\t2\tx\t0\n";
  }
  fs::copy_file(testing::fixture_dir() / "u.user", bad.path() / "u.user");
  fs::copy_file(testing::fixture_dir() / "u.item", bad.path() / "u.item");
  r = cli({"inspect", "--data.dir", bad.str()});
  CHECK(r.code == 2);
  CHECK(r.err.find("u.data:2:") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"inspect", "--som.epochs", "many"}).code == 1);
  CHECK(cli({"inspect", "--no-such-flag", "1"}).code == 1);
  CHECK(cli({"inspect", "--som.clusters", "0"}).code == 1);
  CHECK(cli({"inspect", "--config", "/no/such/config.json"}).code == 1);
  const auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--som.epochs") != std::string::npos);
  CHECK(help.out.find("evaluate") != std::string::npos);
}

TEST_CASE("config file with flag override") {
  TempDir out("config");
  const auto cfg = out.path() / "c.json";
  {
    std::ofstream(cfg) << R"({"som.clusters": 3, "segments": "female", "seed": 11})";
  }
  auto r = cli(with(fixture_args(out), {"train", "--config", cfg.string(), "--seed", "12"}));
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(out.path() / "models" / "config.json"));
  CHECK(doc.at("som.clusters") == 3);
  CHECK(doc.at("seed") == 12);
  CHECK(fs::exists(out.path() / "models" / "female" / "genres_c2.csv"));
  CHECK_FALSE(fs::exists(out.path() / "models" / "male"));
}

TEST_CASE("train is deterministic and embeds the config") {
  TempDir out("train");
  REQUIRE(cli(with(fixture_args(out), {"train"})).code == 0);
  const auto first = snapshot(out.path());
  REQUIRE(cli(with(fixture_args(out), {"train"})).code == 0);
  CHECK(snapshot(out.path()) == first);

  for (auto s : kAllSegments) {
    const auto dir = out.path() / "models" / std::string(segment_name(s));
    for (const char* f : {"som.json", "mlp.json", "clusters.json", "genres_c0.csv", "genres_c1.csv"})
      CHECK(fs::exists(dir / f));
    const auto som = nlohmann::json::parse(slurp(dir / "som.json"));
    CHECK(som.at("config").at("seed") == 20201120);
    CHECK(slurp(dir / "genres_c0.csv").rfind("# config: ", 0) == 0);
  }

  TempDir other("train_seed");
  REQUIRE(cli(with(fixture_args(other), {"train", "--seed", "1"})).code == 0);
  CHECK(slurp(other.path() / "models/male/som.json") != first.at("models/male/som.json"));
}

TEST_CASE("one cluster") {
  TempDir out("one");
  REQUIRE(cli(with(fixture_args(out), {"train", "--som.clusters", "1"})).code == 0);
  const auto dir = out.path() / "models" / "male";
  CHECK(fs::exists(dir / "genres_c0.csv"));
  CHECK_FALSE(fs::exists(dir / "genres_c1.csv"));
  const auto r = cli(with(fixture_args(out), {"recommend", "--user", "1", "--som.clusters", "1"}));
  CHECK(r.code == 0);
  CHECK(r.out.find("cluster 0") != std::string::npos);
}

TEST_CASE("recommend") {
  TempDir out("recommend");
  REQUIRE(cli(with(fixture_args(out), {"train"})).code == 0);

  auto r = cli(with(fixture_args(out), {"recommend", "--user", "2", "-k", "5"}));
  REQUIRE(r.code == 0);
  const auto csv = slurp(out.path() / "recommend" / "user2.csv");
  CHECK(csv.rfind("# config: ", 0) == 0);

  // Same list straight from the library.
  const auto d = testing::fixture_dir();
  const auto data = load_dataset(d / "u.data", d / "u.user", d / "u.item");
  const auto seg = data.ratings.restrict(segment_users(data.users, SegmentSpec(Segment::Female)));
  auto model = std::make_shared<const SegmentModel>(
      load_segment_model(out.path() / "models" / "female", seg, data.movies));
  const HybridRecommender rec(seg, data.movies, model);
  const auto expected = rec.recommend(2, 5);
  REQUIRE(expected.size() == 5);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line == "rank,movie_id,title,predicted,provenance");
  for (const auto& p : expected) {
    REQUIRE(std::getline(lines, line));
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    CHECK(std::stoi(line.substr(c1 + 1, c2 - c1 - 1)) == p.movie);
    CHECK(std::stod(line.substr(line.rfind(',', line.rfind(',') - 1) + 1)) == p.value);
    CHECK(r.out.find(data.movies.at(p.movie).title) != std::string::npos);
  }

  CHECK(cli(with(fixture_args(out), {"recommend", "--user", "1", "-k", "0"})).code == 1);
  CHECK(cli(with(fixture_args(out), {"recommend", "--user", "1", "--recommend.k", "0"})).code == 1);
  CHECK(cli(with(fixture_args(out), {"recommend", "--user", "999"})).code == 2);
  CHECK(cli(with(fixture_args(out), {"recommend", "--user", "1", "--segment", "teens"})).code == 1);
  CHECK(cli(with(fixture_args(out), {"recommend", "--user", "1", "--segment", "age_20_39"})).code == 0);

  TempDir empty("recommend_none");
  r = cli({"recommend", "--user", "1", "--data.dir", testing::fixture_dir().string(), "--output.dir", empty.str()});
  CHECK(r.code == 2);
  CHECK(r.err.find("som.json") != std::string::npos);
}

TEST_CASE("user who rated everything") {
  TempDir data("everything");
  {
    std::ofstream users(data.path() / "u.user");
    users << "1|30|M|x|0\n2|31|M|x|0\n3|45|F|x|0\n4|25|F|x|0\n";
    std::ofstream items(data.path() / "u.item");
    for (int m = 1; m <= 4; ++m) items << m << "|M" << m << " (1990)|01-Jan-1990|||0|1|0|0|0|0|0|0|0|0|0|0|0|0|0|0|0|0|0\n";
    std::ofstream ratings(data.path() / "u.data");
    for (int m = 1; m <= 4; ++m) ratings << "1\t" << m << "\t" << 1 + m % 5 << "\t0\n";
    ratings << "2\t1\t3\t0\n3\t2\t4\t0\n4\t3\t2\t0\n";
  }
  TempDir out("everything_out");
  const std::vector<std::string> base{"--data.dir", data.str(), "--output.dir", out.str()};
  REQUIRE(cli(with(base, {"train"})).code == 0);
  const auto r = cli(with(base, {"recommend", "--user", "1"}));
  CHECK(r.code == 0);
  CHECK(r.out.find("nothing to recommend") != std::string::npos);
}

TEST_CASE("evaluate") {
  TempDir out("evaluate");
  auto args = with(fixture_args(out), {"evaluate", "--eval.repeats", "1", "--som.epochs", "5", "--mlp.epochs", "10"});
  auto a = args, b = args, c = args;
  a.insert(a.end(), {"--variant", "pearson_knn", "--run-name", "a"});
  b.insert(b.end(), {"--variant", "pearson_knn", "--run-name", "b"});
  c.insert(c.end(), {"--run-name", "c"});
  auto r = cli(a);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("best") != std::string::npos);
  REQUIRE(cli(b).code == 0);
  CHECK(snapshot(out.path() / "evaluate" / "a") == snapshot(out.path() / "evaluate" / "b"));
  REQUIRE(cli(c).code == 0);

  const auto dir = out.path() / "evaluate";
  for (const char* f : {"a/report_pearson_knn.json", "a/summary_pearson_knn.csv", "a/plot_data.csv",
                        "c/report_hmrs_ra.json", "c/summary_hmrs_ra.csv"})
    CHECK(fs::exists(dir / f));
  const auto base = nlohmann::json::parse(slurp(dir / "a/report_pearson_knn.json"));
  const auto hmrs = nlohmann::json::parse(slurp(dir / "c/report_hmrs_ra.json"));
  for (const auto& [k, _] : hmrs.items()) CHECK(base.contains(k));
  CHECK(base.at("config").at("seed") == 20201120);
  CHECK(base.at("config").at("variant") == "pearson_knn");
  CHECK(slurp(dir / "a/summary_pearson_knn.csv").find("seed=20201120") != std::string::npos);

  CHECK(cli(with(fixture_args(out), {"evaluate", "--variant", "svd"})).code == 1);
}

TEST_CASE("default training on ML-100K writes every segment" * doctest::skip(!testing::have_ml100k())) {
  TempDir out("ml100k");
  const auto r = cli({"train", "--data.dir", testing::ml100k_dir().string(), "--output.dir", out.str()});
  REQUIRE(r.code == 0);
  for (auto s : kAllSegments)
    for (const char* f : {"som.json", "mlp.json", "clusters.json", "genres_c0.csv", "genres_c1.csv"})
      CHECK(fs::exists(out.path() / "models" / std::string(segment_name(s)) / f));
  CHECK(fs::exists(out.path() / "models" / "config.json"));
}
