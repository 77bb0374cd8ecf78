#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace skylink {

/// S-curve parameters of the elevation-angle sigmoid LoS model.
struct SigmoidParams {
  double a = 0.0;
  double b = 0.0;
};

/// Propagation parameters describing one built-up environment.
///
/// alpha, beta and gamma are the building statistics used by the product-form
/// LoS model: alpha is the fraction of land covered by buildings, beta the
/// mean number of buildings per square kilometre and gamma the scale (metres)
/// of the Rayleigh-distributed building heights. The excess losses are added
/// on top of free-space loss for LoS and NLoS links. The elevation-curve
/// coefficients (c1..c5) and the sigmoid parameters are optional; a model
/// whose parameters are absent reports a ConfigError when evaluated.
struct Environment {
  std::string name;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double eps_los_db = 0.0;
  double eps_nlos_db = 0.0;
  std::optional<std::array<double, 5>> holis;
  std::optional<SigmoidParams> sigmoid;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

/// Parses one environment object. Keys must be exactly: name, alpha, beta,
/// gamma, eps_los_db, eps_nlos_db and optionally c (array of five numbers)
/// and sigmoid ({a, b}).
Environment environment_from_json(const nlohmann::json& object);
nlohmann::json environment_to_json(const Environment& env);

/// Accepts a single environment object, an array of them, or a wrapper
/// object {"environments": [...], "source": "..."}.
std::vector<Environment> environments_from_json(const nlohmann::json& document);
std::vector<Environment> load_environments(const std::filesystem::path& path);

/// Looks up an environment by name; throws ConfigError if absent.
const Environment& find_environment(const std::vector<Environment>& envs, const std::string& name);

}  // namespace skylink
