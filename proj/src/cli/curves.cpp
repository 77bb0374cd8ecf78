#include "commands.hpp"

#include "skylink/error.hpp"
#include "skylink/fading.hpp"
#include "skylink/log.hpp"
#include "skylink/version.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

namespace skylink::cli {
namespace {

std::string header_line(const RunConfig& cfg, const std::string& which) {
  return fmt::format("# skylink {} curve={} config_hash={} environment={}\n", kVersion, which, cfg.hash(),
                     cfg.environment.name);
}

std::string cell(double value) { return std::isfinite(value) ? fmt::format("{}", value) : std::string(); }

std::vector<double> angle_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

std::string rician_curve(const RunConfig& cfg, bool k_in_db) {
  const auto& c = cfg.curves;
  std::string body = header_line(cfg, "rician");
  body += fmt::format("# mean power 1; K list interpreted as {}\n", k_in_db ? "dB" : "linear");
  body += "r";
  std::vector<fading::RicianParams> series;
  for (double k : c.k_list) {
    const double linear = k_in_db ? fading::k_factor_from_db(k) : k;
    series.push_back(fading::RicianParams::from_k_factor(linear));
    body += fmt::format(",K={}{}", k, k_in_db ? "dB" : "");
  }
  body += "\n";
  for (std::size_t i = 0; i < c.r_points; ++i) {
    const double r = c.r_max * static_cast<double>(i) / static_cast<double>(c.r_points - 1);
    body += fmt::format("{}", r);
    for (const auto& p : series) body += "," + cell(fading::rician_pdf(p, r));
    body += "\n";
  }
  return body;
}

double safe_holis(const Environment& env, double theta) {
  if (!env.holis || theta <= 0.0) return std::nan("");
  try {
    return channel::plos_holis(env, theta);
  } catch (const DomainError&) {
    return std::nan("");
  }
}

std::string plos_angle_curve(const RunConfig& cfg) {
  const auto& c = cfg.curves;
  std::string body = header_line(cfg, "plos_angle");
  body += fmt::format("# product model tx_height_m={} rx_height_m={} mode={}\n", c.tx_height_m,
                      cfg.generator.plos.rx_height_m, channel::to_string(cfg.generator.plos.product_mode));
  body += "environment,theta_deg,plos_product,plos_holis,plos_sigmoid\n";
  for (const auto& env : cfg.environments) {
    for (double theta : angle_grid(0.0, 90.0, c.theta_step_deg)) {
      const double product = channel::plos_product_at_elevation(env, c.tx_height_m, cfg.generator.plos.rx_height_m,
                                                                 theta, cfg.generator.plos.product_mode);
      const double sigmoid = env.sigmoid ? channel::plos_sigmoid(env, theta) : std::nan("");
      body += fmt::format("{},{},{},{},{}\n", env.name, theta, cell(product), cell(safe_holis(env, theta)),
                          cell(sigmoid));
    }
  }
  return body;
}

std::string plos_fit_curve(const RunConfig& cfg) {
  const auto& c = cfg.curves;
  std::string head = header_line(cfg, "plos_fit");
  std::string rows = "environment,theta_deg,plos_product,plos_sigmoid_fit\n";
  for (const auto& env : cfg.environments) {
    std::vector<channel::AnglePoint> samples;
    for (double theta : angle_grid(c.fit_theta_min_deg, c.fit_theta_max_deg, c.theta_step_deg)) {
      samples.push_back({theta, channel::plos_product_at_elevation(env, c.tx_height_m, cfg.generator.plos.rx_height_m,
                                                                  theta, cfg.generator.plos.product_mode)});
    }
    const auto params = channel::fit_sigmoid(samples);
    const double rmse = channel::sigmoid_rmse(params, samples);
    head += fmt::format("# fit environment={} a={} b={} rmse={}\n", env.name, params.a, params.b, rmse);
    if (rmse >= 0.05) logger().warn("sigmoid fit for '{}' has residual RMSE {}", env.name, rmse);
    for (const auto& s : samples) {
      rows += fmt::format("{},{},{},{}\n", env.name, s.elevation_deg, s.plos,
                          channel::plos_sigmoid(params, s.elevation_deg));
    }
  }
  return head + rows;
}

std::string rss_curve(const RunConfig& cfg, const CurveRequest& request, bool by_distance) {
  const datagen::Dataset dataset =
      build_dataset(cfg, by_distance ? datagen::kDistanceSweep : datagen::kAltitudeWaypoints);
  std::string head = header_line(cfg, request.which);

  rbf::RbfNetwork net;
  if (request.model) {
    std::ifstream in(*request.model);
    if (!in) throw FormatError(fmt::format("cannot open model '{}'", request.model->string()));
    try {
      net = rbf::network_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(fmt::format("malformed model file: {}", e.what()));
    }
    head += "# predictions from supplied model\n";
  } else {
    const auto [train, test] = datagen::split(dataset, cfg.scenario.train_fraction, cfg.scenario.split_seed);
    const auto train_set = train.training_set();
    const auto test_set = test.training_set();
    auto result = rbf::fit(cfg.rbf, train_set, &test_set);
    head += fmt::format("# trained in-process: rows={} epochs={} validation_rmse_db={}\n", train.samples.size(),
                        cfg.rbf.epochs, result.report.validation_rmse_db);
    net = std::move(result.network);
  }

  std::string rows = by_distance ? "D_m,RSS_empirical_dBm,RSS_predicted_dBm\n" : "H_m,RSS_empirical_dBm,RSS_predicted_dBm\n";
  const auto set = dataset.training_set();
  for (std::size_t n = 0; n < dataset.samples.size(); ++n) {
    const auto& s = dataset.samples[n];
    const double predicted = rbf::predict(net, set.features.row(static_cast<Eigen::Index>(n)).transpose())(0);
    rows += fmt::format("{},{},{}\n", by_distance ? s.distance_m : s.altitude_m, s.rss_dbm, predicted);
  }
  return head + rows;
}

}  // namespace

std::filesystem::path emit_curve(const RunConfig& cfg, const CurveRequest& request) {
  std::string body;
  if (request.which == "rician") {
    body = rician_curve(cfg, request.k_in_db || cfg.curves.k_in_db);
  } else if (request.which == "plos_angle") {
    body = plos_angle_curve(cfg);
  } else if (request.which == "plos_fit") {
    body = plos_fit_curve(cfg);
  } else if (request.which == "rss_distance") {
    body = rss_curve(cfg, request, true);
  } else if (request.which == "rss_altitude") {
    body = rss_curve(cfg, request, false);
  } else {
    throw UsageError(fmt::format("unknown curve '{}'", request.which));
  }
  std::filesystem::create_directories(request.out_dir);
  const auto path = request.out_dir / fmt::format("curve_{}.csv", request.which);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", path.string()));
  out << body;
  return path;
}

}  // namespace skylink::cli
