#pragma once

#include "skylink/environment.hpp"

#include <span>

// Closed-form air-to-ground propagation: link geometry, Hata and free-space
// path loss, and line-of-sight probability models. Angles are in degrees at
// every public entry point.
namespace skylink::channel {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

/// UAV altitude above ground and horizontal distance from the UAV nadir to the
/// ground receiver, both in metres.
struct LinkGeometry {
  double altitude_m = 0.0;
  double ground_distance_m = 0.0;

  void validate() const;
};

double slant_distance(const LinkGeometry& geom);

/// Elevation of the UAV seen from the receiver, in [0, 90] degrees.
double elevation_angle(const LinkGeometry& geom);

/// Ground distance at which a transmitter at `height_m` is seen under
/// `elevation_deg`: r = h / tan(theta). Returns +inf at theta = 0.
double ground_distance_from_elevation(double height_m, double elevation_deg);

struct HataParams {
  double frequency_mhz = 0.0;
  double base_height_m = 0.0;
  double mobile_height_m = 0.0;

  /// Throws on non-positive values; logs a warning outside 150-1500 MHz,
  /// 30-200 m base height or 1-10 m mobile height.
  void validate() const;
};

struct HataCoefficients {
  double fixed_loss_db = 0.0;  // A
  double slope_db = 0.0;       // B, dB per decade of distance
};

/// Mobile antenna height correction a(h_m), dB.
double hata_correction(const HataParams& params);
HataCoefficients hata_coefficients(const HataParams& params);
double hata_path_loss(const HataParams& params, double distance_km);

double free_space_path_loss(double carrier_hz, double distance_m);

struct A2GParams {
  double carrier_hz = 0.0;
  Environment env;
};

enum class LinkState { los, nlos };

double a2g_path_loss(const A2GParams& params, const LinkGeometry& geom, LinkState state);

/// canonical spaces the building-height samples over (m + 1) intervals;
/// paper_literal evaluates the printed exponent without that division.
enum class ProductMode { canonical, paper_literal };

/// Number of buildings crossed, m = floor(r_km * sqrt(alpha * beta) - 1).
/// Negative values denote an empty product.
long buildings_crossed(const Environment& env, double ground_distance_m);

/// Product-form LoS probability for a link between a transmitter at `tx_height_m`
/// and a receiver at `rx_height_m` separated horizontally by `ground_distance_m`.
double plos_product(const Environment& env, double tx_height_m, double rx_height_m, double ground_distance_m,
                    ProductMode mode = ProductMode::canonical);

/// plos_product with the ground distance derived from the elevation angle of
/// the transmitter (r = h_t / tan(theta)). theta = 0 yields 0.
double plos_product_at_elevation(const Environment& env, double tx_height_m, double rx_height_m,
                                 double elevation_deg, ProductMode mode = ProductMode::canonical);

/// Elevation-curve model C1 - (C1 - C2) / (1 + ((theta - C3) / C4)^C5), clamped
/// to [0, 1] with a logged diagnostic when clamping occurs.
double plos_holis(const Environment& env, double elevation_deg);

/// 1 / (1 + a exp(-b (theta - a))).
double plos_sigmoid(const SigmoidParams& params, double elevation_deg);
double plos_sigmoid(const Environment& env, double elevation_deg);

struct AnglePoint {
  double elevation_deg = 0.0;
  double plos = 0.0;
};

/// Least-squares fit of the sigmoid S-curve parameters by grid refinement in
/// log-parameter space. Requires at least three samples with distinct angles,
/// probabilities in [0, 1], and non-constant probabilities.
SigmoidParams fit_sigmoid(std::span<const AnglePoint> samples);

/// Root-mean-square residual of a sigmoid against the samples.
double sigmoid_rmse(const SigmoidParams& params, std::span<const AnglePoint> samples);

enum class PlosModel { product, holis, sigmoid };

struct PlosSelector {
  PlosModel model = PlosModel::product;
  ProductMode product_mode = ProductMode::canonical;
  double rx_height_m = 1.5;  // receiver height for the product model
};

/// LoS probability of a UAV link under the selected model.
double los_probability(const Environment& env, const LinkGeometry& geom, const PlosSelector& selector);

/// P_los * PL_los + (1 - P_los) * PL_nlos.
double mean_path_loss(const A2GParams& params, const LinkGeometry& geom, const PlosSelector& selector);

const char* to_string(PlosModel model);
const char* to_string(ProductMode mode);
PlosModel plos_model_from_string(const std::string& name);
ProductMode product_mode_from_string(const std::string& name);

}  // namespace skylink::channel
