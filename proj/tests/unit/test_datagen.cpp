#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "skylink/datagen.hpp"
#include "skylink/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

using namespace skylink;
using namespace skylink::datagen;
using doctest::Approx;

namespace {

std::vector<double> hundreds() {
  std::vector<double> d;
  for (double v = 100.0; v <= 1000.0; v += 100.0) d.push_back(v);
  return d;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("skylink_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("received signal strength") {
  const LinkBudget budget{};
  CHECK(rss_from_path_loss(budget, 100.0) == -70.0);
  CHECK(rss_from_path_loss(budget, 100.0) - rss_from_path_loss(budget, 106.02) == Approx(6.02).epsilon(1e-12));
  LinkBudget gains = budget;
  gains.tx_gain_dbi = 3.0;
  gains.rx_gain_dbi = 2.0;
  CHECK(rss_from_path_loss(gains, 100.0, 4.0) == -65.0);  // fading off ignores the draw
  gains.fading.kind = FadingKind::gaussian_shadow;
  gains.fading.sigma_db = 1.0;
  CHECK(rss_from_path_loss(gains, 100.0, 4.0) == -69.0);
  CHECK_THROWS_AS(rss_from_path_loss(budget, std::nan("")), DomainError);
  CHECK(fading_draw_db(budget, 17) == 0.0);
}

TEST_CASE("shadowing draws average out") {
  LinkBudget budget{};
  budget.fading.kind = FadingKind::gaussian_shadow;
  budget.fading.sigma_db = 8.0;
  const std::size_t n = 100000;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += rss_from_path_loss(budget, 100.0, fading_draw_db(budget, i));
  CHECK(std::abs(total / static_cast<double>(n) - (-70.0)) < 3.0 * 8.0 / std::sqrt(static_cast<double>(n)));
  CHECK(fading_draw_db(budget, 5) == fading_draw_db(budget, 5));
  CHECK(fading_draw_db(budget, 5) != fading_draw_db(budget, 6));
}

TEST_CASE("rician fading term has unit mean power") {
  LinkBudget budget{};
  budget.fading.kind = FadingKind::rician;
  budget.fading.rician = fading::RicianParams::from_k_factor(3.0, 4.0);
  double power = 0.0;
  const std::size_t n = 50000;
  for (std::size_t i = 0; i < n; ++i) power += std::pow(10.0, -fading_draw_db(budget, i) / 10.0);
  CHECK(power / static_cast<double>(n) == Approx(1.0).epsilon(0.02));
}

TEST_CASE("distance sweep") {
  const Environment env = testing::urban();
  const auto distances = hundreds();
  const Dataset ds = gen_distance_sweep(env, 100.0, distances, 2000.0, LinkBudget{});
  REQUIRE(ds.samples.size() == distances.size());
  const channel::A2GParams params{2e9, env};
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    CHECK(s.index == i);
    CHECK(s.distance_m == distances[i]);
    CHECK(s.altitude_m == 100.0);
    CHECK(s.frequency_mhz == 2000.0);
    CHECK(s.path_loss_db == channel::mean_path_loss(params, {100.0, distances[i]}, {}));
    CHECK(s.plos == channel::plos_product(env, 100.0, 1.5, distances[i]));
    CHECK(s.rss_dbm + s.path_loss_db == Approx(30.0).epsilon(1e-12));
    if (i > 0) CHECK(s.rss_dbm < ds.samples[i - 1].rss_dbm);
  }
  // Frozen 40-digit oracle at the 500 m row.
  CHECK(ds.samples[4].path_loss_db == Approx(109.86702452488884).epsilon(1e-12));

  const std::vector<double> bad = {100.0, 100.0};
  CHECK_THROWS_AS(gen_distance_sweep(env, 100.0, bad, 2000.0, LinkBudget{}), DomainError);
  CHECK_THROWS_AS(gen_distance_sweep(env, 0.0, distances, 2000.0, LinkBudget{}), DomainError);
  CHECK_THROWS_AS(gen_distance_sweep(env, 100.0, std::vector<double>{}, 2000.0, LinkBudget{}), DomainError);
}

TEST_CASE("hata sweep") {
  GeneratorOptions opts;
  opts.path_loss = PathLossModel::hata;
  const auto distances = hundreds();
  const Dataset ds = gen_distance_sweep(testing::suburban(), 60.0, distances, 900.0, LinkBudget{}, opts);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const double slant_km = channel::slant_distance({60.0, distances[i]}) / 1000.0;
    CHECK(ds.samples[i].path_loss_db == Approx(channel::hata_path_loss({900.0, 60.0, 1.5}, slant_km)).epsilon(1e-14));
    CHECK(ds.samples[i].path_loss_db >= 0.0);
  }
}

TEST_CASE("altitude waypoints") {
  const auto altitudes = default_waypoint_altitudes();
  REQUIRE(altitudes.size() == 10);
  CHECK(altitudes.front() == 20.0);
  CHECK(altitudes.back() == 200.0);
  const Environment env = testing::dense_urban();
  const Dataset ds = gen_altitude_waypoints(env, altitudes, 500.0, 2000.0, LinkBudget{});
  REQUIRE(ds.samples.size() == 10);
  const channel::A2GParams params{2e9, env};
  double prev_theta = -1.0;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    CHECK(s.distance_m == 500.0);
    CHECK(s.path_loss_db == channel::mean_path_loss(params, {altitudes[i], 500.0}, {}));
    const double theta = channel::elevation_angle({s.altitude_m, s.distance_m});
    CHECK(theta > prev_theta);
    prev_theta = theta;
    CHECK(s.plos >= 0.0);
    CHECK(s.plos <= 1.0);
  }
  CHECK_THROWS_AS(gen_altitude_waypoints(env, std::vector<double>{20.0, -5.0}, 500.0, 2000.0, LinkBudget{}),
                  DomainError);
}

TEST_CASE("invariants under every model combination") {
  const auto distances = hundreds();
  for (const auto& env : {testing::suburban(), testing::urban(), testing::dense_urban()}) {
    for (auto model : {channel::PlosModel::product, channel::PlosModel::holis, channel::PlosModel::sigmoid}) {
      for (auto pl : {PathLossModel::a2g_mean, PathLossModel::hata}) {
        GeneratorOptions opts;
        opts.path_loss = pl;
        opts.plos.model = model;
        const Dataset ds = gen_distance_sweep(env, 120.0, distances, 1500.0, LinkBudget{}, opts);
        for (const Sample& s : ds.samples) {
          CHECK(s.plos >= 0.0);
          CHECK(s.plos <= 1.0);
          CHECK(s.path_loss_db >= 0.0);
          CHECK(s.rss_dbm + s.path_loss_db == Approx(30.0).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("regeneration from metadata is bit-identical") {
  LinkBudget budget{};
  budget.fading.kind = FadingKind::rician;
  budget.fading.rician = fading::RicianParams::from_k_factor(5.0);
  budget.seed = 99;
  GeneratorOptions opts;
  opts.plos.model = channel::PlosModel::sigmoid;
  const Dataset sweep = gen_distance_sweep(testing::urban(), 80.0, hundreds(), 2400.0, budget, opts);
  CHECK(to_csv(regenerate(sweep.metadata)) == to_csv(sweep));
  const Dataset way = gen_altitude_waypoints(testing::suburban(), default_waypoint_altitudes(), 300.0, 900.0, budget);
  CHECK(to_csv(regenerate(way.metadata)) == to_csv(way));

  LinkBudget other = budget;
  other.seed = 100;
  CHECK(to_csv(gen_distance_sweep(testing::urban(), 80.0, hundreds(), 2400.0, other, opts)) != to_csv(sweep));
}

TEST_CASE("split") {
  const Dataset ds = gen_altitude_waypoints(testing::urban(), default_waypoint_altitudes(), 500.0, 2000.0, LinkBudget{});
  const auto [train, test] = split(ds, 0.8, 4);
  CHECK(train.samples.size() == 8);
  CHECK(test.samples.size() == 2);
  const auto [train2, test2] = split(ds, 0.8, 4);
  CHECK(to_csv(train) == to_csv(train2));
  CHECK(to_csv(test) == to_csv(test2));

  std::multiset<std::uint64_t> all;
  for (const auto& s : train.samples) all.insert(s.index);
  for (const auto& s : test.samples) all.insert(s.index);
  std::multiset<std::uint64_t> original;
  for (const auto& s : ds.samples) original.insert(s.index);
  CHECK(all == original);
  CHECK(std::is_sorted(train.samples.begin(), train.samples.end(),
                       [](const Sample& a, const Sample& b) { return a.index < b.index; }));

  CHECK_THROWS_AS(split(ds, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(split(ds, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(split(ds, 0.01, 1), ConfigError);
}

TEST_CASE("csv round trip") {
  const Dataset ds = gen_distance_sweep(testing::urban(), 100.0, hundreds(), 2000.0, LinkBudget{});
  const std::string csv = to_csv(ds);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  const auto samples = samples_from_csv(csv);
  REQUIRE(samples.size() == ds.samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].path_loss_db == ds.samples[i].path_loss_db);
    CHECK(samples[i].rss_dbm == ds.samples[i].rss_dbm);
    CHECK(samples[i].plos == ds.samples[i].plos);
    CHECK(samples[i].scenario == ds.samples[i].scenario);
  }

  const auto dir = scratch_dir("csv");
  write_dataset(ds, dir / "sweep.csv");
  CHECK(std::filesystem::exists(dir / "sweep.json"));
  const Dataset back = read_dataset(dir / "sweep.csv");
  CHECK(to_csv(back) == csv);
  CHECK(back.metadata == ds.metadata);
}

TEST_CASE("csv parse errors carry line numbers") {
  const std::string header = std::string(kCsvHeader) + "\n";
  auto message = [](const std::string& text) {
    try {
      samples_from_csv(text);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("") .find("line 1") != std::string::npos);
  CHECK(message("a,b\n").find("line 1") != std::string::npos);
  CHECK(message(header + "0,s,1,2,3,4,0.5,5\n1,s,1,2,x,4,0.5,5\n").find("line 3") != std::string::npos);
  CHECK(message(header + "0,s,1,2,3,4,0.5\n").find("line 2") != std::string::npos);
  CHECK(message(header + "0,s,1,2,3,4,1.5,5\n").find("line 2") != std::string::npos);
  CHECK(message(header + "0,s,1,2,3,4,0.5,5\n0,s,1,2,3,4,0.5,5\n").find("duplicate") != std::string::npos);
  CHECK(message(header).find("no rows") != std::string::npos);
}

TEST_CASE("budget json") {
  LinkBudget b{};
  b.tx_power_dbm = 20.0;
  b.fading.kind = FadingKind::gaussian_shadow;
  b.fading.sigma_db = 4.0;
  const LinkBudget back = budget_from_json(budget_to_json(b));
  CHECK(back.tx_power_dbm == 20.0);
  CHECK(back.fading.kind == FadingKind::gaussian_shadow);
  CHECK(back.fading.sigma_db == 4.0);

  const LinkBudget k = budget_from_json(nlohmann::json::parse(R"({"fading": {"type": "rician", "k": 10}})"));
  CHECK(fading::k_factor(k.fading.rician) == Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(budget_from_json(nlohmann::json::parse(R"({"fading": {"type": "nakagami"}})")), ConfigError);
  CHECK_THROWS_AS(budget_from_json(nlohmann::json::parse(R"({"fading": {"type": "gaussian_shadow", "sigma_db": -1}})")),
                  ConfigError);
  CHECK_THROWS_AS(budget_from_json(nlohmann::json::parse(R"({"power": 3})")), ConfigError);
}
