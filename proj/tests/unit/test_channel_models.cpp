#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "skylink/channel_models.hpp"
#include "skylink/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace skylink;
using namespace skylink::channel;
using doctest::Approx;

TEST_CASE("slant distance") {
  CHECK(slant_distance({0.0, 50.0}) == 50.0);
  CHECK(slant_distance({3.0, 4.0}) == Approx(5.0).epsilon(1e-15));
  CHECK(slant_distance({100.0, 100.0}) == Approx(141.42135623730951).epsilon(1e-15));
  CHECK_THROWS_AS(slant_distance({0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(slant_distance({-1.0, 5.0}), DomainError);

  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 5000.0);
  for (int i = 0; i < 1000; ++i) {
    const LinkGeometry g{u(gen), u(gen)};
    CHECK(slant_distance(g) >= std::max(g.altitude_m, g.ground_distance_m));
  }
  CHECK(slant_distance({0.0, 7.0}) == 7.0);
  CHECK(slant_distance({7.0, 0.0}) == 7.0);
  CHECK(slant_distance({1.0, 7.0}) > 7.0);
}

TEST_CASE("elevation angle") {
  CHECK(elevation_angle({100.0, 100.0}) == Approx(45.0).epsilon(1e-14));
  CHECK(elevation_angle({0.0, 10.0}) == 0.0);
  CHECK(elevation_angle({10.0, 0.0}) == 90.0);
  CHECK_THROWS_AS(elevation_angle({0.0, 0.0}), DomainError);

  double prev = -1.0;
  for (double h = 1.0; h <= 1000.0; h += 7.0) {
    const double theta = elevation_angle({h, 250.0});
    CHECK(theta > prev);
    prev = theta;
  }
  prev = 91.0;
  for (double r = 1.0; r <= 5000.0; r += 13.0) {
    const double theta = elevation_angle({120.0, r});
    CHECK(theta < prev);
    prev = theta;
  }
}

TEST_CASE("ground distance from elevation inverts the elevation angle") {
  for (double theta = 1.0; theta < 90.0; theta += 3.5) {
    const double r = ground_distance_from_elevation(150.0, theta);
    CHECK(elevation_angle({150.0, r}) == Approx(theta).epsilon(1e-12));
  }
  CHECK(std::isinf(ground_distance_from_elevation(100.0, 0.0)));
  CHECK(ground_distance_from_elevation(100.0, 90.0) == 0.0);
}

TEST_CASE("hata correction factor") {
  // Oracle: 40-digit evaluation of [1.1 log f - 0.7] h_m - [1.56 log f - 0.8].
  CHECK(hata_correction({900.0, 30.0, 1.5}) == Approx(0.01588182584953924).epsilon(1e-12));
  CHECK(hata_correction({1000.0, 30.0, 1.5}) == Approx(0.02).epsilon(1e-12));
  CHECK_THROWS_AS(hata_correction({900.0, 30.0, 0.0}), DomainError);
  CHECK_THROWS_AS(hata_correction({0.0, 30.0, 1.5}), DomainError);
  // linear term vanishes as h_m -> 0
  CHECK(hata_correction({900.0, 30.0, 1e-12}) == Approx(-(1.56 * std::log10(900.0) - 0.8)).epsilon(1e-9));
}

TEST_CASE("hata path loss") {
  const HataParams p{900.0, 30.0, 1.5};
  const double at_1km = hata_path_loss(p, 1.0);
  CHECK(at_1km == Approx(126.40328648085746).epsilon(1e-12));
  CHECK(at_1km == hata_coefficients(p).fixed_loss_db);
  const double slope = hata_coefficients(p).slope_db;
  CHECK(slope == Approx(35.22485578158621).epsilon(1e-12));
  CHECK(hata_path_loss(p, 2.0) - at_1km == Approx(slope * std::log10(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(hata_path_loss(p, 0.0), DomainError);
  CHECK_THROWS_AS(hata_path_loss(p, -1.0), DomainError);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> d(0.01, 50.0);
  std::uniform_real_distribution<double> hb(30.0, 200.0);
  for (int i = 0; i < 500; ++i) {
    const HataParams q{900.0, hb(gen), 1.5};
    double d1 = d(gen);
    double d2 = d(gen);
    if (d1 > d2) std::swap(d1, d2);
    const double diff = hata_path_loss(q, d2) - hata_path_loss(q, d1);
    CHECK(std::abs(diff - hata_coefficients(q).slope_db * std::log10(d2 / d1)) < 1e-9);
    CHECK(hata_coefficients(q).slope_db > 0.0);
  }
}

TEST_CASE("free-space path loss") {
  const double fc = 2.4e9;
  const double unit = kSpeedOfLight / (4.0 * std::numbers::pi * fc);
  CHECK(std::abs(free_space_path_loss(fc, unit)) < 1e-12);
  CHECK(free_space_path_loss(fc, 2000.0) - free_space_path_loss(fc, 1000.0) ==
        Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK(free_space_path_loss(2e9, 1000.0) == Approx(98.468383135163).epsilon(1e-12));
  CHECK_THROWS_AS(free_space_path_loss(0.0, 10.0), DomainError);
  CHECK_THROWS_AS(free_space_path_loss(1e9, -10.0), DomainError);

  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> d(1.0, 1e5);
  for (int i = 0; i < 500; ++i) {
    const double d1 = d(gen);
    const double d2 = d(gen);
    CHECK(std::abs((free_space_path_loss(fc, d2) - free_space_path_loss(fc, d1)) - 20.0 * std::log10(d2 / d1)) < 1e-9);
  }
}

TEST_CASE("air-to-ground path loss") {
  const Environment env = testing::urban();
  const double fc = 2e9;
  const double unit = kSpeedOfLight / (4.0 * std::numbers::pi * fc);
  const A2GParams params{fc, env};
  CHECK(a2g_path_loss(params, {unit, 0.0}, LinkState::los) == Approx(env.eps_los_db).epsilon(1e-12));
  const LinkGeometry g{100.0, 500.0};
  CHECK(a2g_path_loss(params, g, LinkState::nlos) - a2g_path_loss(params, g, LinkState::los) ==
        Approx(env.eps_nlos_db - env.eps_los_db).epsilon(1e-12));
  CHECK(a2g_path_loss(params, g, LinkState::los) == Approx(93.61811661487118).epsilon(1e-12));
}

TEST_CASE("product LoS probability") {
  const Environment env = testing::bare(0.3, 300.0, 20.0);
  CHECK(buildings_crossed(env, 500.0) == 3);
  // r sqrt(alpha beta) < 1 -> empty product
  CHECK(plos_product(env, 100.0, 1.5, 100.0) == 1.0);
  CHECK(plos_product(env, 100.0, 1.5, 0.0) == 1.0);
  // gamma -> 0+: each factor -> 1
  CHECK(plos_product(testing::bare(0.3, 300.0, 1e-3), 100.0, 1.5, 5000.0) == 1.0);
  // Oracle: 40-digit term-by-term product.
  CHECK(plos_product(env, 100.0, 1.5, 500.0) == Approx(0.1774564453653154).epsilon(1e-12));
  CHECK(plos_product(env, 100.0, 1.5, 500.0, ProductMode::paper_literal) ==
        Approx(0.9044955402020377).epsilon(1e-12));
  CHECK(plos_product(env, 100.0, 1.5, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(plos_product(env, 1.0, 1.5, 10.0), DomainError);
  CHECK_THROWS_AS(plos_product(testing::bare(0.0, 300.0, 20.0), 100.0, 1.5, 10.0), ConfigError);
}

TEST_CASE("product LoS probability is bounded and nonincreasing in distance") {
  for (const auto& env : {testing::suburban(), testing::urban(), testing::dense_urban()}) {
    for (double ht : {30.0, 100.0, 300.0, 1000.0}) {
      double prev = 1.0;
      for (double r = 0.0; r <= 20000.0; r += 10.0) {
        const double p = plos_product(env, ht, 1.5, r);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p <= prev + 1e-12);
        prev = p;
      }
    }
  }
}

TEST_CASE("elevation-curve LoS probability") {
  Environment env = testing::bare(0.3, 300.0, 20.0);
  CHECK_THROWS_AS(plos_holis(env, 30.0), ConfigError);

  env.holis = std::array<double, 5>{0.9, 0.3, 20.0, 10.0, 2.0};
  CHECK(plos_holis(env, 20.0) == 0.3);
  env.holis = std::array<double, 5>{1.0, 0.0, 20.0, 10.0, 2.0};
  CHECK(plos_holis(env, 30.0) == Approx(0.5).epsilon(1e-15));
  env.holis = std::array<double, 5>{0.95, 0.1, 20.0, 10.0, 60.0};
  CHECK(plos_holis(env, 90.0) == Approx(0.95).epsilon(1e-12));
  env.holis = std::array<double, 5>{0.95, 0.1, 20.0, 10.0, 1000.0};
  CHECK(plos_holis(env, 90.0) == 0.95);

  // C2 < 0 pushes the curve below zero near C3: clamped
  env.holis = std::array<double, 5>{1.0, -0.5, 20.0, 10.0, 2.0};
  CHECK(plos_holis(env, 20.0) == 0.0);
  // negative base with fractional exponent
  env.holis = std::array<double, 5>{1.0, 0.0, 20.0, 10.0, 2.5};
  CHECK_THROWS_AS(plos_holis(env, 10.0), DomainError);
  CHECK_THROWS_AS(plos_holis(env, 0.0), DomainError);
}

TEST_CASE("sigmoid LoS probability") {
  const SigmoidParams p{9.61, 0.16};
  CHECK(plos_sigmoid(p, 9.61) == Approx(1.0 / (1.0 + 9.61)).epsilon(1e-15));
  CHECK(plos_sigmoid(SigmoidParams{9.61, 50.0}, 60.0) == Approx(1.0).epsilon(1e-15));
  // Oracle: 40-digit evaluation.
  CHECK(plos_sigmoid(p, 45.0) == Approx(0.9676918999472423).epsilon(1e-13));
  CHECK_THROWS_AS(plos_sigmoid(SigmoidParams{0.0, 0.1}, 10.0), ConfigError);
  CHECK_THROWS_AS(plos_sigmoid(SigmoidParams{1.0, -0.1}, 10.0), ConfigError);
  CHECK_THROWS_AS(plos_sigmoid(testing::bare(0.3, 300.0, 20.0), 10.0), ConfigError);

  double prev = 0.0;
  for (double theta = 0.0; theta <= 90.0; theta += 0.25) {
    const double v = plos_sigmoid(p, theta);
    CHECK(v > prev);
    CHECK(v < 1.0);
    prev = v;
  }
}

TEST_CASE("sigmoid fit") {
  SUBCASE("recovers planted parameters") {
    for (const SigmoidParams planted : {SigmoidParams{9.61, 0.16}, SigmoidParams{4.88, 0.43}, SigmoidParams{12.08, 0.11}}) {
      std::vector<AnglePoint> pts;
      for (double theta = 5.0; theta <= 90.0; theta += 5.0) pts.push_back({theta, plos_sigmoid(planted, theta)});
      const auto fit = fit_sigmoid(pts);
      CHECK(std::abs(fit.a - planted.a) / planted.a < 1e-3);
      CHECK(std::abs(fit.b - planted.b) / planted.b < 1e-3);
    }
  }
  SUBCASE("degenerate inputs") {
    CHECK_THROWS_AS(fit_sigmoid(std::vector<AnglePoint>{{10.0, 0.2}, {20.0, 0.5}}), FitError);
    CHECK_THROWS_AS(fit_sigmoid(std::vector<AnglePoint>{{10.0, 0.2}, {10.0, 0.5}, {30.0, 0.9}}), FitError);
    CHECK_THROWS_AS(fit_sigmoid(std::vector<AnglePoint>{{10.0, 0.5}, {20.0, 0.5}, {30.0, 0.5}}), FitError);
    CHECK_THROWS_AS(fit_sigmoid(std::vector<AnglePoint>{{10.0, 0.5}, {20.0, 1.5}, {30.0, 0.5}}), FitError);
  }
  SUBCASE("approximates the product model") {
    const Environment env = testing::suburban();
    std::vector<AnglePoint> pts;
    for (double theta = 10.0; theta <= 90.0; theta += 1.0) {
      pts.push_back({theta, plos_product_at_elevation(env, 1000.0, 1.5, theta)});
    }
    const auto fit = fit_sigmoid(pts);
    CHECK(sigmoid_rmse(fit, pts) < 0.05);
  }
}

TEST_CASE("mean path loss") {
  const Environment env = testing::urban();
  const A2GParams params{2e9, env};

  // Short link: empty product, P_los = 1.
  const LinkGeometry close{100.0, 10.0};
  CHECK(mean_path_loss(params, close, {}) == a2g_path_loss(params, close, LinkState::los));

  Environment blocked = env;
  blocked.holis = std::array<double, 5>{0.0, 0.0, 0.0, 10.0, 2.0};
  const A2GParams blocked_params{2e9, blocked};
  const LinkGeometry g{100.0, 500.0};
  CHECK(mean_path_loss(blocked_params, g, {PlosModel::holis}) == a2g_path_loss(blocked_params, g, LinkState::nlos));

  // Oracle: P_los, PL_los and PL_nlos evaluated separately at 40 digits.
  CHECK(mean_path_loss(params, g, {}) == Approx(109.86702452488884).epsilon(1e-12));
  CHECK(mean_path_loss(params, g, {PlosModel::sigmoid}) == Approx(110.33487401343929).epsilon(1e-12));

  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> h(2.0, 500.0);
  std::uniform_real_distribution<double> r(0.0, 5000.0);
  for (int i = 0; i < 500; ++i) {
    const LinkGeometry geom{h(gen), r(gen)};
    for (const PlosModel model : {PlosModel::product, PlosModel::sigmoid, PlosModel::holis}) {
      const double mean = mean_path_loss(params, geom, {model});
      CHECK(mean >= a2g_path_loss(params, geom, LinkState::los) - 1e-9);
      CHECK(mean <= a2g_path_loss(params, geom, LinkState::nlos) + 1e-9);
    }
  }
}

TEST_CASE("received power falls with distance for a fixed budget") {
  const double budget = 30.0;
  double prev_fs = std::numeric_limits<double>::infinity();
  double prev_hata = std::numeric_limits<double>::infinity();
  for (double d = 100.0; d <= 20000.0; d *= 1.1) {
    const double fs = budget - free_space_path_loss(9e8, d);
    const double hata = budget - hata_path_loss({900.0, 30.0, 1.5}, d / 1000.0);
    CHECK(fs < prev_fs);
    CHECK(hata < prev_hata);
    prev_fs = fs;
    prev_hata = hata;
  }
}

TEST_CASE("model selectors parse") {
  CHECK(plos_model_from_string("sigmoid") == PlosModel::sigmoid);
  CHECK(product_mode_from_string("paper_literal") == ProductMode::paper_literal);
  CHECK_THROWS_AS(plos_model_from_string("itu"), ConfigError);
}
