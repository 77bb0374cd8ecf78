#pragma once

#include "skylink/channel_models.hpp"
#include "skylink/environment.hpp"
#include "skylink/fading.hpp"
#include "skylink/rbf_net.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

// Synthetic RSS datasets for the altitude-waypoint and distance-sweep
// scenarios, plus their CSV/JSON serialization.
namespace skylink::datagen {

enum class FadingKind { off, rician, gaussian_shadow };

struct FadingSpec {
  FadingKind kind = FadingKind::off;
  fading::RicianParams rician{};  // used when kind == rician
  double sigma_db = 0.0;          // used when kind == gaussian_shadow
};

/// RSS = tx_power + tx_gain + rx_gain - path_loss - fading_term.
struct LinkBudget {
  double tx_power_dbm = 30.0;
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 0.0;
  FadingSpec fading{};
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json budget_to_json(const LinkBudget& budget);
LinkBudget budget_from_json(const nlohmann::json& object);

/// Fading loss in dB for row `index`, drawn from a per-index substream of the
/// budget seed so rows can be generated in any order. Rician draws are
/// normalized to unit mean power: term = -20 log10(r / sqrt(s^2 + 2 delta^2)).
double fading_draw_db(const LinkBudget& budget, std::uint64_t index);

double rss_from_path_loss(const LinkBudget& budget, double path_loss_db,
                          std::optional<double> fading_term_db = std::nullopt);

enum class PathLossModel { hata, a2g_mean };

const char* to_string(PathLossModel model);
PathLossModel path_loss_model_from_string(const std::string& name);

struct GeneratorOptions {
  PathLossModel path_loss = PathLossModel::a2g_mean;
  channel::PlosSelector plos{};
  double rx_height_m = 1.5;  // Hata mobile antenna height
};

struct Sample {
  std::uint64_t index = 0;
  std::string scenario;
  double distance_m = 0.0;  // D
  double altitude_m = 0.0;  // H
  double frequency_mhz = 0.0;  // F
  double path_loss_db = 0.0;  // P
  double plos = 0.0;
  double rss_dbm = 0.0;
};

struct Dataset {
  std::vector<Sample> samples;
  nlohmann::json metadata;

  /// Features D, H, F, P and the RSS target, one row per sample.
  rbf::TrainingSet training_set() const;
};

inline constexpr const char* kDistanceSweep = "distance_sweep";
inline constexpr const char* kAltitudeWaypoints = "altitude_waypoints";

/// Path loss of one link under the selected model. Hata uses the UAV altitude
/// as base height and the slant distance.
double link_path_loss(const Environment& env, const channel::LinkGeometry& geom, double frequency_mhz,
                      const GeneratorOptions& options);

Dataset gen_distance_sweep(const Environment& env, double altitude_m, std::span<const double> distances_m,
                           double frequency_mhz, const LinkBudget& budget, const GeneratorOptions& options = {});

/// 20, 40, ..., 200 m.
std::vector<double> default_waypoint_altitudes();
inline constexpr double kDefaultWaypointGroundDistance = 500.0;
inline constexpr double kDefaultFrequencyMhz = 2000.0;

Dataset gen_altitude_waypoints(const Environment& env, std::span<const double> altitudes_m, double ground_distance_m,
                               double frequency_mhz, const LinkBudget& budget, const GeneratorOptions& options = {});

/// Rebuilds a dataset from its metadata document.
Dataset regenerate(const nlohmann::json& metadata);

/// Seeded shuffle, then the first round(fraction * n) rows go to the training
/// side. Both sides keep their rows in index order.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

inline constexpr const char* kCsvHeader = "index,scenario,D_m,H_m,F_MHz,PL_dB,PLOS,RSS_dBm";

std::string to_csv(const Dataset& dataset);
std::vector<Sample> samples_from_csv(const std::string& text);

/// Writes `<path>` and the sidecar metadata `<path with .json extension>`.
void write_dataset(const Dataset& dataset, const std::filesystem::path& csv_path);

/// Reads the CSV and, when present, the sidecar metadata.
Dataset read_dataset(const std::filesystem::path& csv_path);

std::filesystem::path metadata_path(const std::filesystem::path& csv_path);

}  // namespace skylink::datagen
