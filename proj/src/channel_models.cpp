#include "skylink/channel_models.hpp"

#include "skylink/error.hpp"
#include "skylink/log.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace skylink::channel {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(fmt::format("{} must be positive and finite (got {})", what, value));
  }
}

void require_angle(double elevation_deg, double lo, bool lo_inclusive) {
  const bool lower_ok = lo_inclusive ? elevation_deg >= lo : elevation_deg > lo;
  if (!lower_ok || !(elevation_deg <= 90.0)) {
    throw DomainError(fmt::format("elevation angle {} deg outside the valid range", elevation_deg));
  }
}

}  // namespace

void LinkGeometry::validate() const {
  if (!std::isfinite(altitude_m) || !std::isfinite(ground_distance_m)) {
    throw DomainError("link geometry must be finite");
  }
  if (altitude_m < 0.0 || ground_distance_m < 0.0) {
    throw DomainError(fmt::format("link geometry must be non-negative (h={}, R={})", altitude_m, ground_distance_m));
  }
  if (altitude_m + ground_distance_m <= 0.0) throw DomainError("link geometry has zero slant range");
}

double slant_distance(const LinkGeometry& geom) {
  geom.validate();
  return std::hypot(geom.ground_distance_m, geom.altitude_m);
}

double elevation_angle(const LinkGeometry& geom) {
  geom.validate();
  if (geom.ground_distance_m == 0.0) return 90.0;
  return std::atan(geom.altitude_m / geom.ground_distance_m) * kRadToDeg;
}

double ground_distance_from_elevation(double height_m, double elevation_deg) {
  if (!(height_m >= 0.0)) throw DomainError("height must be non-negative");
  require_angle(elevation_deg, 0.0, true);
  if (elevation_deg == 0.0) return std::numeric_limits<double>::infinity();
  if (elevation_deg == 90.0) return 0.0;
  return height_m / std::tan(elevation_deg * kDegToRad);
}

void HataParams::validate() const {
  require_positive(frequency_mhz, "Hata frequency");
  require_positive(base_height_m, "Hata base antenna height");
  require_positive(mobile_height_m, "Hata mobile antenna height");
  if (frequency_mhz < 150.0 || frequency_mhz > 1500.0) {
    logger().warn("Hata frequency {} MHz outside the nominal 150-1500 MHz range", frequency_mhz);
  }
  if (base_height_m < 30.0 || base_height_m > 200.0) {
    logger().warn("Hata base height {} m outside the nominal 30-200 m range", base_height_m);
  }
  if (mobile_height_m < 1.0 || mobile_height_m > 10.0) {
    logger().warn("Hata mobile height {} m outside the nominal 1-10 m range", mobile_height_m);
  }
}

double hata_correction(const HataParams& params) {
  require_positive(params.frequency_mhz, "Hata frequency");
  require_positive(params.mobile_height_m, "Hata mobile antenna height");
  const double log_f = std::log10(params.frequency_mhz);
  return (1.1 * log_f - 0.7) * params.mobile_height_m - (1.56 * log_f - 0.8);
}

HataCoefficients hata_coefficients(const HataParams& params) {
  params.validate();
  const double log_hb = std::log10(params.base_height_m);
  HataCoefficients out;
  out.fixed_loss_db = 69.55 + 26.16 * std::log10(params.frequency_mhz) - 13.82 * log_hb - hata_correction(params);
  out.slope_db = 44.9 - 6.55 * log_hb;
  return out;
}

double hata_path_loss(const HataParams& params, double distance_km) {
  require_positive(distance_km, "Hata distance");
  const auto [fixed, slope] = hata_coefficients(params);
  return fixed + slope * std::log10(distance_km);
}

double free_space_path_loss(double carrier_hz, double distance_m) {
  require_positive(carrier_hz, "carrier frequency");
  require_positive(distance_m, "distance");
  return 20.0 * std::log10(4.0 * std::numbers::pi * carrier_hz * distance_m / kSpeedOfLight);
}

double a2g_path_loss(const A2GParams& params, const LinkGeometry& geom, LinkState state) {
  const double fspl = free_space_path_loss(params.carrier_hz, slant_distance(geom));
  return fspl + (state == LinkState::los ? params.env.eps_los_db : params.env.eps_nlos_db);
}

long buildings_crossed(const Environment& env, double ground_distance_m) {
  // beta is per square kilometre, so the distance enters in kilometres.
  const double crossed = ground_distance_m / 1000.0 * std::sqrt(env.alpha * env.beta) - 1.0;
  const double m = std::floor(crossed);
  if (m > 1.0e9) throw DomainError(fmt::format("ground distance {} m crosses too many buildings", ground_distance_m));
  return static_cast<long>(m);
}

double plos_product(const Environment& env, double tx_height_m, double rx_height_m, double ground_distance_m,
                    ProductMode mode) {
  env.validate();
  if (!(rx_height_m >= 0.0) || !(tx_height_m > rx_height_m) || !std::isfinite(tx_height_m)) {
    throw DomainError(fmt::format("product LoS model needs h_t > h_r >= 0 (h_t={}, h_r={})", tx_height_m, rx_height_m));
  }
  if (!(ground_distance_m >= 0.0)) throw DomainError("ground distance must be non-negative");
  if (std::isinf(ground_distance_m)) return 0.0;

  const long m = buildings_crossed(env, ground_distance_m);
  if (m < 0) return 1.0;

  const double drop = tx_height_m - rx_height_m;
  const double spacing = mode == ProductMode::canonical ? drop / static_cast<double>(m + 1) : drop;
  const double two_gamma_sq = 2.0 * env.gamma * env.gamma;
  double p = 1.0;
  for (long n = 0; n <= m && p > 0.0; ++n) {
    const double height = tx_height_m - (static_cast<double>(n) + 0.5) * spacing;
    p *= 1.0 - std::exp(-(height * height) / two_gamma_sq);
  }
  return std::clamp(p, 0.0, 1.0);
}

double plos_product_at_elevation(const Environment& env, double tx_height_m, double rx_height_m,
                                 double elevation_deg, ProductMode mode) {
  return plos_product(env, tx_height_m, rx_height_m, ground_distance_from_elevation(tx_height_m, elevation_deg), mode);
}

double plos_holis(const Environment& env, double elevation_deg) {
  if (!env.holis) throw ConfigError(fmt::format("environment '{}' has no elevation-curve coefficients", env.name));
  env.validate();
  require_angle(elevation_deg, 0.0, false);
  const auto& c = *env.holis;
  const double base = (elevation_deg - c[2]) / c[3];
  if (base < 0.0 && c[4] != std::floor(c[4])) {
    throw DomainError(fmt::format("elevation curve undefined at {} deg (theta < C3 with non-integer C5)", elevation_deg));
  }
  // C1 - (C1 - C2) / (1 + t) rearranged so that theta = C3 returns C2 exactly
  const double t = std::pow(base, c[4]);
  const double rise = t == std::numeric_limits<double>::infinity() ? 1.0 : t / (1.0 + t);
  const double p = c[1] + (c[0] - c[1]) * rise;
  if (std::isnan(p)) throw DomainError(fmt::format("elevation curve undefined at {} deg", elevation_deg));
  if (p < 0.0 || p > 1.0) {
    logger().warn("elevation-curve LoS probability {} at {} deg clamped to [0, 1] for '{}'", p, elevation_deg,
                  env.name);
    return std::clamp(p, 0.0, 1.0);
  }
  return p;
}

double plos_sigmoid(const SigmoidParams& params, double elevation_deg) {
  if (!(params.a > 0.0) || !(params.b > 0.0)) throw ConfigError("sigmoid parameters a and b must be positive");
  require_angle(elevation_deg, 0.0, true);
  return 1.0 / (1.0 + params.a * std::exp(-params.b * (elevation_deg - params.a)));
}

double plos_sigmoid(const Environment& env, double elevation_deg) {
  if (!env.sigmoid) throw ConfigError(fmt::format("environment '{}' has no sigmoid parameters", env.name));
  return plos_sigmoid(*env.sigmoid, elevation_deg);
}

double sigmoid_rmse(const SigmoidParams& params, std::span<const AnglePoint> samples) {
  if (samples.empty()) throw FitError("no samples");
  double sse = 0.0;
  for (const auto& s : samples) {
    const double r = 1.0 / (1.0 + params.a * std::exp(-params.b * (s.elevation_deg - params.a))) - s.plos;
    sse += r * r;
  }
  return std::sqrt(sse / static_cast<double>(samples.size()));
}

SigmoidParams fit_sigmoid(std::span<const AnglePoint> samples) {
  if (samples.size() < 3) throw FitError("sigmoid fit needs at least three samples");
  std::set<double> angles;
  double lo = samples.front().plos;
  double hi = lo;
  for (const auto& s : samples) {
    if (!std::isfinite(s.elevation_deg) || !std::isfinite(s.plos) || s.plos < 0.0 || s.plos > 1.0) {
      throw FitError("sigmoid fit samples must be finite with probabilities in [0, 1]");
    }
    if (!angles.insert(s.elevation_deg).second) {
      throw FitError(fmt::format("duplicate elevation angle {} in sigmoid fit samples", s.elevation_deg));
    }
    lo = std::min(lo, s.plos);
    hi = std::max(hi, s.plos);
  }
  if (hi - lo < 1e-12) throw FitError("sigmoid fit samples have constant probability");

  auto sse = [&](double log_a, double log_b) {
    const double a = std::exp(log_a);
    const double b = std::exp(log_b);
    double total = 0.0;
    for (const auto& s : samples) {
      const double r = 1.0 / (1.0 + a * std::exp(-b * (s.elevation_deg - a))) - s.plos;
      total += r * r;
    }
    return std::isfinite(total) ? total : std::numeric_limits<double>::infinity();
  };

  // Coarse scan over a in [1e-3, 1e3], b in [1e-4, 10], then repeated zooms
  // around the incumbent with a shrinking window.
  double center_a = 0.5 * (std::log(1e-3) + std::log(1e3));
  double center_b = 0.5 * (std::log(1e-4) + std::log(1e1));
  double half_a = 0.5 * (std::log(1e3) - std::log(1e-3));
  double half_b = 0.5 * (std::log(1e1) - std::log(1e-4));
  int points = 81;
  double best = std::numeric_limits<double>::infinity();
  double best_a = center_a;
  double best_b = center_b;

  for (int iter = 0; iter < 200; ++iter) {
    const double step_a = 2.0 * half_a / (points - 1);
    const double step_b = 2.0 * half_b / (points - 1);
    for (int i = 0; i < points; ++i) {
      const double ua = center_a - half_a + i * step_a;
      for (int j = 0; j < points; ++j) {
        const double ub = center_b - half_b + j * step_b;
        const double value = sse(ua, ub);
        if (value < best) {
          best = value;
          best_a = ua;
          best_b = ub;
        }
      }
    }
    if (step_a < 1e-13 && step_b < 1e-13) break;
    center_a = best_a;
    center_b = best_b;
    half_a = 2.0 * step_a;
    half_b = 2.0 * step_b;
    points = 21;
  }
  if (!std::isfinite(best)) throw FitError("sigmoid fit did not find a finite residual");
  return SigmoidParams{std::exp(best_a), std::exp(best_b)};
}

double los_probability(const Environment& env, const LinkGeometry& geom, const PlosSelector& selector) {
  switch (selector.model) {
    case PlosModel::product:
      geom.validate();
      return plos_product(env, geom.altitude_m, selector.rx_height_m, geom.ground_distance_m, selector.product_mode);
    case PlosModel::holis:
      return plos_holis(env, elevation_angle(geom));
    case PlosModel::sigmoid:
      return plos_sigmoid(env, elevation_angle(geom));
  }
  throw ConfigError("unknown LoS probability model");
}

double mean_path_loss(const A2GParams& params, const LinkGeometry& geom, const PlosSelector& selector) {
  const double p = los_probability(params.env, geom, selector);
  const double los = a2g_path_loss(params, geom, LinkState::los);
  const double nlos = a2g_path_loss(params, geom, LinkState::nlos);
  return p * los + (1.0 - p) * nlos;
}

const char* to_string(PlosModel model) {
  switch (model) {
    case PlosModel::product: return "product";
    case PlosModel::holis: return "holis";
    case PlosModel::sigmoid: return "sigmoid";
  }
  return "?";
}

const char* to_string(ProductMode mode) {
  return mode == ProductMode::canonical ? "canonical" : "paper_literal";
}

PlosModel plos_model_from_string(const std::string& name) {
  if (name == "product") return PlosModel::product;
  if (name == "holis") return PlosModel::holis;
  if (name == "sigmoid") return PlosModel::sigmoid;
  throw ConfigError(fmt::format("unknown LoS probability model '{}'", name));
}

ProductMode product_mode_from_string(const std::string& name) {
  if (name == "canonical") return ProductMode::canonical;
  if (name == "paper_literal") return ProductMode::paper_literal;
  throw ConfigError(fmt::format("unknown product mode '{}'", name));
}

}  // namespace skylink::channel
