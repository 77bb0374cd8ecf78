#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli/commands.hpp"
#include "skylink/table.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using skylink::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path workdir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("skylink_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const auto path = dir / "run.json";
  std::ofstream(path) << body;
  return path;
}

std::string sweep_config() {
  return R"({
  "environment_file": ")" SKYLINK_DATA_DIR R"(/environments.json",
  "environment": "urban",
  "rbf": {"hidden": 6, "epochs": 150, "seed": 2},
  "scenario": {"type": "distance_sweep", "name": "small", "altitude_m": 100,
               "distance_grid": {"start": 100, "stop": 1500, "count": 30}},
  "curves": {"r_points": 41}
})";
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"generate"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"--version"}).out.find("0.3.0") != std::string::npos);
}

TEST_CASE("config errors exit 2 with a location") {
  const auto dir = workdir("badcfg");
  auto cfg = write_config(dir, "{\n  \"environment\": \"urban\",\n  \"colour\": 3\n}\n");
  const Result r = invoke({"generate", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("run.json:3") != std::string::npos);

  cfg = write_config(dir, "{ not json");
  CHECK(invoke({"generate", "--config", cfg.string(), "--out", dir.string()}).code == 2);
  CHECK(invoke({"generate", "--config", (dir / "absent.json").string(), "--out", dir.string()}).code == 2);

  cfg = write_config(dir, R"({"environment_file": ")" SKYLINK_DATA_DIR R"(/environments.json", "environment": "rural"})");
  CHECK(invoke({"generate", "--config", cfg.string(), "--out", dir.string()}).code == 2);
}

TEST_CASE("domain failures exit 1") {
  const auto dir = workdir("domain");
  const auto cfg = write_config(dir, R"({"environment_file": ")" SKYLINK_DATA_DIR R"(/environments.json",
    "environment": "urban",
    "scenario": {"type": "distance_sweep", "altitude_m": 1.0, "distances_m": [300, 400]}})");
  const Result r = invoke({"generate", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("row 0") != std::string::npos);
}

TEST_CASE("full pipeline") {
  const auto dir = workdir("pipeline");
  const auto cfg = write_config(dir, sweep_config());
  const auto data = dir / "data";
  const auto model = dir / "model";

  Result r = invoke({"generate", "--config", cfg.string(), "--out", data.string()});
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(data / "small.csv"));
  CHECK(fs::exists(data / "small.json"));
  const auto table = skylink::parse_table(slurp(data / "small.csv"));
  CHECK(table.rows.size() == 30);

  r = invoke({"train", "--config", cfg.string(), "--data", (data / "small.csv").string(), "--out", model.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(model / "model.json"));
  CHECK(skylink::parse_table(slurp(model / "train_report.csv")).rows.size() == 150);
  const auto summary = nlohmann::json::parse(slurp(model / "train_report.json"));
  CHECK(summary.contains("validation_rmse_db"));

  r = invoke({"predict", "--model", (model / "model.json").string(), "--row", "500,100,2000,110", "--row",
              "900,100,2000,118"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  double a = 0.0;
  double b = 0.0;
  lines >> a >> b;
  CHECK(a > b);

  r = invoke({"predict", "--model", (model / "model.json").string(), "--input", (data / "small.csv").string(), "--out",
              dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "predictions.txt"));

  CHECK(invoke({"predict", "--model", (model / "model.json").string(), "--row", "1,2,3"}).code == 2);
  CHECK(invoke({"predict", "--model", (model / "model.json").string()}).code == 2);
  CHECK(invoke({"predict", "--model", (dir / "nope.json").string(), "--row", "1,2,3,4"}).code == 2);

  r = invoke({"eval", "--model", (model / "model.json").string(), "--data", (data / "small.csv").string(), "--out",
              dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("rmse_db") != std::string::npos);
  const auto metrics = nlohmann::json::parse(slurp(dir / "eval.json"));
  CHECK(metrics["rows"] == 30);
  CHECK(metrics["max_abs_error_db"].get<double>() >= metrics["rmse_db"].get<double>());
}

TEST_CASE("curves") {
  const auto dir = workdir("curves");
  const auto cfg = write_config(dir, sweep_config());
  for (const std::string which : {"rician", "plos_angle", "plos_fit", "rss_distance"}) {
    CAPTURE(which);
    const Result r = invoke({"curves", "--config", cfg.string(), "--which", which, "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto t = skylink::parse_table(slurp(dir / ("curve_" + which + ".csv")));
    REQUIRE_FALSE(t.comments.empty());
    CHECK(t.comments[0].find("config_hash=") != std::string::npos);
    CHECK_FALSE(t.rows.empty());
  }
  const auto rician = skylink::parse_table(slurp(dir / "curve_rician.csv"));
  CHECK(rician.header == std::vector<std::string>{"r", "K=0", "K=50", "K=100"});
  CHECK(rician.rows.size() == 41);

  const auto angle = skylink::parse_table(slurp(dir / "curve_plos_angle.csv"));
  for (const char* col : {"plos_product", "plos_sigmoid"}) {
    for (double v : angle.numbers(col)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(invoke({"curves", "--config", cfg.string(), "--which", "fig99", "--out", dir.string()}).code == 2);
  CHECK(invoke({"curves", "--config", cfg.string(), "--which", "rician", "--k-db", "--out", dir.string()}).code == 0);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto first = workdir("det1");
  const auto second = workdir("det2");
  for (const auto& dir : {first, second}) {
    const auto cfg = write_config(dir, sweep_config());
    REQUIRE(invoke({"generate", "--config", cfg.string(), "--out", dir.string()}).code == 0);
    REQUIRE(invoke({"train", "--config", cfg.string(), "--data", (dir / "small.csv").string(), "--out",
                    dir.string()})
                .code == 0);
    REQUIRE(invoke({"curves", "--config", cfg.string(), "--which", "rss_distance", "--out", dir.string()}).code == 0);
  }
  for (const char* name :
       {"small.csv", "small.json", "model.json", "train_report.csv", "train_report.json", "curve_rss_distance.csv"}) {
    CAPTURE(name);
    CHECK(slurp(first / name) == slurp(second / name));
  }
}

TEST_CASE("seed override changes the data") {
  const auto dir = workdir("seed");
  auto body = sweep_config();
  body.replace(body.find("\"curves\""), 0, R"("link_budget": {"fading": {"type": "gaussian_shadow", "sigma_db": 3}}, )");
  const auto cfg = write_config(dir, body);
  REQUIRE(invoke({"generate", "--config", cfg.string(), "--out", (dir / "a").string()}).code == 0);
  REQUIRE(invoke({"generate", "--config", cfg.string(), "--out", (dir / "b").string(), "--seed", "5"}).code == 0);
  CHECK(slurp(dir / "a" / "small.csv") != slurp(dir / "b" / "small.csv"));
}
