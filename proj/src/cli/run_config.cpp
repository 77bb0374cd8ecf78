#include "run_config.hpp"

#include "skylink/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace skylink::cli {
namespace {

// Line of the first occurrence of "key" in the raw text, 1 if absent.
std::size_t line_of(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 1;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  Reader(const RunConfig& cfg) : cfg_(cfg) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw UsageError(fmt::format("{}:{}: {}", cfg_.path.string(), line_of(cfg_.raw_text, key), message));
  }

  void allow(const nlohmann::json& object, const std::string& section, std::initializer_list<const char*> keys) const {
    if (!object.is_object()) fail(section, fmt::format("'{}' must be an object", section));
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& item : object.items()) {
      if (!known.contains(item.key())) fail(item.key(), fmt::format("unknown key '{}' in '{}'", item.key(), section));
    }
  }

  double number(const nlohmann::json& object, const char* key, double fallback) const {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_number()) fail(key, fmt::format("'{}' must be a number", key));
    return object[key].get<double>();
  }

  std::string text(const nlohmann::json& object, const char* key, const std::string& fallback) const {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_string()) fail(key, fmt::format("'{}' must be a string", key));
    return object[key].get<std::string>();
  }

  std::uint64_t integer(const nlohmann::json& object, const char* key, std::uint64_t fallback) const {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_number_unsigned()) fail(key, fmt::format("'{}' must be a non-negative integer", key));
    return object[key].get<std::uint64_t>();
  }

  std::vector<double> numbers(const nlohmann::json& object, const char* key, std::vector<double> fallback) const {
    if (!object.contains(key)) return fallback;
    const auto& list = object[key];
    if (!list.is_array() || list.empty()) fail(key, fmt::format("'{}' must be a non-empty array of numbers", key));
    std::vector<double> out;
    for (const auto& v : list) {
      if (!v.is_number()) fail(key, fmt::format("'{}' must contain only numbers", key));
      out.push_back(v.get<double>());
    }
    return out;
  }

 private:
  const RunConfig& cfg_;
};

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

std::string RunConfig::hash() const { return fnv1a_hex(raw_text); }

std::vector<double> default_sweep_distances() {
  std::vector<double> out;
  constexpr int kCount = 200;
  for (int i = 0; i < kCount; ++i) out.push_back(50.0 + (2000.0 - 50.0) * i / (kCount - 1));
  return out;
}

RunConfig load_run_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  RunConfig cfg;
  cfg.path = path;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(fmt::format("{}:0: cannot open config file", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    cfg.raw_text = buf.str();
  }
  try {
    cfg.document = nlohmann::json::parse(cfg.raw_text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto offset = std::min<std::size_t>(e.byte, cfg.raw_text.size());
    const auto line = 1 + std::count(cfg.raw_text.begin(), cfg.raw_text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
    throw UsageError(fmt::format("{}:{}: invalid JSON: {}", path.string(), line, e.what()));
  }

  const Reader read(cfg);
  const auto& doc = cfg.document;
  read.allow(doc, "config", {"environment_file", "environment", "models", "rbf", "link_budget", "scenario", "curves"});

  if (!doc.contains("environment_file")) read.fail("environment_file", "missing key 'environment_file'");
  if (!doc.contains("environment") || !doc["environment"].is_string()) {
    read.fail("environment", "missing environment name ('environment')");
  }
  const std::filesystem::path env_file = read.text(doc, "environment_file", "");
  cfg.environment_file = env_file.is_absolute() ? env_file : path.parent_path() / env_file;
  try {
    cfg.environments = load_environments(cfg.environment_file);
    cfg.environment = find_environment(cfg.environments, doc["environment"].get<std::string>());
  } catch (const ConfigError& e) {
    read.fail("environment", e.what());
  }

  if (doc.contains("models")) {
    const auto& m = doc["models"];
    read.allow(m, "models", {"plos", "plos_mode", "path_loss", "update_mode", "rx_height_m"});
    try {
      cfg.generator.plos.model = channel::plos_model_from_string(read.text(m, "plos", "product"));
      cfg.generator.plos.product_mode = channel::product_mode_from_string(read.text(m, "plos_mode", "canonical"));
      cfg.generator.path_loss = datagen::path_loss_model_from_string(read.text(m, "path_loss", "a2g_mean"));
      cfg.rbf.update_mode = rbf::update_mode_from_string(read.text(m, "update_mode", "derived_gradient"));
    } catch (const ConfigError& e) {
      read.fail("models", e.what());
    }
    cfg.generator.plos.rx_height_m = read.number(m, "rx_height_m", 1.5);
    cfg.generator.rx_height_m = cfg.generator.plos.rx_height_m;
  }

  if (doc.contains("rbf")) {
    const auto mode = cfg.rbf.update_mode;
    try {
      cfg.rbf = rbf::config_from_json(doc["rbf"]);
    } catch (const ConfigError& e) {
      read.fail("rbf", e.what());
    }
    if (!doc["rbf"].contains("update_mode")) cfg.rbf.update_mode = mode;
  }

  if (doc.contains("link_budget")) {
    try {
      cfg.budget = datagen::budget_from_json(doc["link_budget"]);
    } catch (const ConfigError& e) {
      read.fail("link_budget", e.what());
    }
  }

  if (doc.contains("scenario")) {
    const auto& s = doc["scenario"];
    read.allow(s, "scenario",
               {"type", "name", "altitude_m", "distances_m", "distance_grid", "altitudes_m", "ground_distance_m",
                "frequency_mhz", "train_fraction", "split_seed"});
    auto& sc = cfg.scenario;
    sc.type = read.text(s, "type", sc.type);
    if (sc.type != datagen::kDistanceSweep && sc.type != datagen::kAltitudeWaypoints) {
      read.fail("type", fmt::format("unknown scenario type '{}'", sc.type));
    }
    sc.name = read.text(s, "name", sc.name);
    if (sc.name.empty() || sc.name.find('/') != std::string::npos) read.fail("name", "scenario name must be a plain file stem");
    sc.altitude_m = read.number(s, "altitude_m", sc.altitude_m);
    sc.distances_m = read.numbers(s, "distances_m", {});
    if (s.contains("distance_grid")) {
      const auto& g = s["distance_grid"];
      read.allow(g, "distance_grid", {"start", "stop", "count"});
      const double start = read.number(g, "start", 50.0);
      const double stop = read.number(g, "stop", 2000.0);
      const auto count = read.integer(g, "count", 200);
      if (count < 1 || (count > 1 && !(stop > start))) read.fail("distance_grid", "distance_grid needs count >= 1 and stop > start");
      sc.distances_m.clear();
      for (std::uint64_t i = 0; i < count; ++i) {
        sc.distances_m.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
      }
    }
    sc.altitudes_m = read.numbers(s, "altitudes_m", sc.altitudes_m);
    sc.ground_distance_m = read.number(s, "ground_distance_m", sc.ground_distance_m);
    sc.frequency_mhz = read.number(s, "frequency_mhz", sc.frequency_mhz);
    sc.train_fraction = read.number(s, "train_fraction", sc.train_fraction);
    sc.split_seed = read.integer(s, "split_seed", sc.split_seed);
    if (!(sc.frequency_mhz > 0.0)) read.fail("frequency_mhz", "frequency_mhz must be positive");
    if (!(sc.train_fraction > 0.0 && sc.train_fraction < 1.0)) read.fail("train_fraction", "train_fraction must lie in (0, 1)");
  }
  if (cfg.scenario.distances_m.empty()) cfg.scenario.distances_m = default_sweep_distances();

  if (doc.contains("curves")) {
    const auto& c = doc["curves"];
    read.allow(c, "curves",
               {"k_list", "k_in_db", "r_max", "r_points", "theta_step_deg", "tx_height_m", "fit_theta_min_deg",
                "fit_theta_max_deg"});
    auto& cc = cfg.curves;
    cc.k_list = read.numbers(c, "k_list", cc.k_list);
    if (c.contains("k_in_db")) {
      if (!c["k_in_db"].is_boolean()) read.fail("k_in_db", "'k_in_db' must be a boolean");
      cc.k_in_db = c["k_in_db"].get<bool>();
    }
    cc.r_max = read.number(c, "r_max", cc.r_max);
    cc.r_points = read.integer(c, "r_points", cc.r_points);
    cc.theta_step_deg = read.number(c, "theta_step_deg", cc.theta_step_deg);
    cc.tx_height_m = read.number(c, "tx_height_m", cc.tx_height_m);
    cc.fit_theta_min_deg = read.number(c, "fit_theta_min_deg", cc.fit_theta_min_deg);
    cc.fit_theta_max_deg = read.number(c, "fit_theta_max_deg", cc.fit_theta_max_deg);
    if (!(cc.r_max > 0.0) || cc.r_points < 2) read.fail("r_max", "rician grid needs r_max > 0 and r_points >= 2");
    if (!(cc.theta_step_deg > 0.0)) read.fail("theta_step_deg", "theta_step_deg must be positive");
  }

  if (seed_override) {
    cfg.rbf.seed = *seed_override;
    cfg.budget.seed = *seed_override;
    cfg.scenario.split_seed = *seed_override;
  }
  return cfg;
}

}  // namespace skylink::cli
