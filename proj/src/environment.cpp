#include "skylink/environment.hpp"

#include "skylink/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>

namespace skylink {
namespace {

double require_number(const nlohmann::json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) throw ConfigError(fmt::format("environment is missing key '{}'", key));
  if (!it->is_number()) throw ConfigError(fmt::format("environment key '{}' must be a number", key));
  return it->get<double>();
}

}  // namespace

void Environment::validate() const {
  auto fail = [this](const std::string& what) {
    throw ConfigError(fmt::format("environment '{}': {}", name, what));
  };
  if (name.empty()) throw ConfigError("environment name must not be empty");
  for (double v : {alpha, beta, gamma, eps_los_db, eps_nlos_db}) {
    if (!std::isfinite(v)) fail("parameters must be finite");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must lie in (0, 1]");
  if (!(beta > 0.0)) fail("beta must be positive");
  if (!(gamma > 0.0)) fail("gamma must be positive");
  if (!(eps_los_db >= 0.0)) fail("eps_los_db must be non-negative");
  if (!(eps_nlos_db >= eps_los_db)) fail("eps_nlos_db must be >= eps_los_db");
  if (holis) {
    for (double c : *holis) {
      if (!std::isfinite(c)) fail("c coefficients must be finite");
    }
    if (!((*holis)[3] > 0.0)) fail("c4 must be positive");
  }
  if (sigmoid && !(sigmoid->a > 0.0 && sigmoid->b > 0.0)) fail("sigmoid a and b must be positive");
}

Environment environment_from_json(const nlohmann::json& object) {
  if (!object.is_object()) throw ConfigError("environment entry must be a JSON object");
  static const std::set<std::string> allowed = {"name",        "alpha",       "beta", "gamma",
                                                "eps_los_db", "eps_nlos_db", "c",    "sigmoid"};
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(fmt::format("environment has unknown key '{}'", item.key()));
    }
  }
  Environment env;
  const auto name = object.find("name");
  if (name == object.end() || !name->is_string()) throw ConfigError("environment is missing string key 'name'");
  env.name = name->get<std::string>();
  env.alpha = require_number(object, "alpha");
  env.beta = require_number(object, "beta");
  env.gamma = require_number(object, "gamma");
  env.eps_los_db = require_number(object, "eps_los_db");
  env.eps_nlos_db = require_number(object, "eps_nlos_db");

  if (const auto c = object.find("c"); c != object.end()) {
    if (!c->is_array() || c->size() != 5) {
      throw ConfigError(fmt::format("environment '{}': 'c' must be an array of five numbers", env.name));
    }
    std::array<double, 5> coeffs{};
    for (std::size_t i = 0; i < 5; ++i) {
      if (!(*c)[i].is_number()) throw ConfigError(fmt::format("environment '{}': c{} is not a number", env.name, i + 1));
      coeffs[i] = (*c)[i].get<double>();
    }
    env.holis = coeffs;
  }
  if (const auto s = object.find("sigmoid"); s != object.end()) {
    if (!s->is_object() || s->size() != 2) {
      throw ConfigError(fmt::format("environment '{}': 'sigmoid' must be an object {{a, b}}", env.name));
    }
    env.sigmoid = SigmoidParams{require_number(*s, "a"), require_number(*s, "b")};
  }
  env.validate();
  return env;
}

nlohmann::json environment_to_json(const Environment& env) {
  nlohmann::json out = {{"name", env.name},           {"alpha", env.alpha},
                        {"beta", env.beta},           {"gamma", env.gamma},
                        {"eps_los_db", env.eps_los_db}, {"eps_nlos_db", env.eps_nlos_db}};
  if (env.holis) out["c"] = *env.holis;
  if (env.sigmoid) out["sigmoid"] = {{"a", env.sigmoid->a}, {"b", env.sigmoid->b}};
  return out;
}

std::vector<Environment> environments_from_json(const nlohmann::json& document) {
  const nlohmann::json* list = &document;
  if (document.is_object() && document.contains("environments")) {
    for (const auto& item : document.items()) {
      if (item.key() != "environments" && item.key() != "source") {
        throw ConfigError(fmt::format("environment file has unknown top-level key '{}'", item.key()));
      }
    }
    list = &document["environments"];
  } else if (document.is_object()) {
    return {environment_from_json(document)};
  }
  if (!list->is_array() || list->empty()) throw ConfigError("environment file must list at least one environment");

  std::vector<Environment> envs;
  std::set<std::string> seen;
  for (const auto& entry : *list) {
    envs.push_back(environment_from_json(entry));
    if (!seen.insert(envs.back().name).second) {
      throw ConfigError(fmt::format("duplicate environment name '{}'", envs.back().name));
    }
  }
  return envs;
}

std::vector<Environment> load_environments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open environment file '{}'", path.string()));
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return environments_from_json(document);
}

const Environment& find_environment(const std::vector<Environment>& envs, const std::string& name) {
  for (const auto& env : envs) {
    if (env.name == name) return env;
  }
  throw ConfigError(fmt::format("environment '{}' not found", name));
}

}  // namespace skylink
