#pragma once

#include "skylink/channel_models.hpp"
#include "skylink/datagen.hpp"
#include "skylink/environment.hpp"
#include "skylink/rbf_net.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skylink::cli {

/// Config problem reported as `<file>:<line>: <message>`; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string type = datagen::kAltitudeWaypoints;
  std::string name = "dataset";
  double altitude_m = 100.0;  // distance sweep
  std::vector<double> distances_m;
  std::vector<double> altitudes_m = datagen::default_waypoint_altitudes();
  double ground_distance_m = datagen::kDefaultWaypointGroundDistance;
  double frequency_mhz = datagen::kDefaultFrequencyMhz;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 1;
};

struct CurveConfig {
  std::vector<double> k_list = {0.0, 50.0, 100.0};
  bool k_in_db = false;
  double r_max = 3.0;
  std::size_t r_points = 301;
  double theta_step_deg = 1.0;
  double tx_height_m = 1000.0;  // product model height for angle curves and fits
  double fit_theta_min_deg = 10.0;
  double fit_theta_max_deg = 90.0;
};

struct RunConfig {
  std::filesystem::path path;
  std::string raw_text;
  nlohmann::json document;

  std::filesystem::path environment_file;
  std::vector<Environment> environments;
  Environment environment;
  datagen::GeneratorOptions generator;
  rbf::RbfConfig rbf;
  datagen::LinkBudget budget;
  ScenarioConfig scenario;
  CurveConfig curves;

  /// FNV-1a 64 of the raw config bytes, hex.
  std::string hash() const;
};

/// Default distance grid: 200 points from 50 m to 2000 m.
std::vector<double> default_sweep_distances();

/// Parses and validates the config file. `seed_override` replaces the rbf,
/// link-budget and split seeds. Throws UsageError.
RunConfig load_run_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace skylink::cli
