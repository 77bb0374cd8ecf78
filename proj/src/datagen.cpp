#include "skylink/datagen.hpp"

#include "skylink/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace skylink::datagen {
namespace {

std::mt19937_64 row_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

nlohmann::json options_to_json(const GeneratorOptions& options) {
  return {{"path_loss_model", to_string(options.path_loss)},
          {"plos_model", channel::to_string(options.plos.model)},
          {"product_mode", channel::to_string(options.plos.product_mode)},
          {"plos_rx_height_m", options.plos.rx_height_m},
          {"hata_rx_height_m", options.rx_height_m}};
}

GeneratorOptions options_from_json(const nlohmann::json& object) {
  GeneratorOptions options;
  options.path_loss = path_loss_model_from_string(object.at("path_loss_model").get<std::string>());
  options.plos.model = channel::plos_model_from_string(object.at("plos_model").get<std::string>());
  options.plos.product_mode = channel::product_mode_from_string(object.at("product_mode").get<std::string>());
  options.plos.rx_height_m = object.at("plos_rx_height_m").get<double>();
  options.rx_height_m = object.at("hata_rx_height_m").get<double>();
  return options;
}

Sample make_sample(const Environment& env, const channel::LinkGeometry& geom, double frequency_mhz,
                   const LinkBudget& budget, const GeneratorOptions& options, std::uint64_t index,
                   const char* scenario) {
  Sample s;
  s.index = index;
  s.scenario = scenario;
  s.distance_m = geom.ground_distance_m;
  s.altitude_m = geom.altitude_m;
  s.frequency_mhz = frequency_mhz;
  s.path_loss_db = link_path_loss(env, geom, frequency_mhz, options);
  s.plos = channel::los_probability(env, geom, options.plos);
  s.rss_dbm = rss_from_path_loss(budget, s.path_loss_db, fading_draw_db(budget, index));
  return s;
}

double parse_double(std::string_view field, std::size_t line, const char* column) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError(fmt::format("line {}: column {} is not a number: '{}'", line, column, field));
  }
  return value;
}

}  // namespace

void LinkBudget::validate() const {
  for (double v : {tx_power_dbm, tx_gain_dbi, rx_gain_dbi, fading.sigma_db}) {
    if (!std::isfinite(v)) throw ConfigError("link budget values must be finite");
  }
  if (fading.sigma_db < 0.0) throw ConfigError("shadowing sigma must be non-negative");
  if (fading.kind == FadingKind::rician) fading.rician.validate();
}

nlohmann::json budget_to_json(const LinkBudget& budget) {
  nlohmann::json fading;
  switch (budget.fading.kind) {
    case FadingKind::off: fading = {{"type", "off"}}; break;
    case FadingKind::rician:
      fading = {{"type", "rician"}, {"s", budget.fading.rician.los_amplitude},
                {"delta", budget.fading.rician.scatter_sigma}};
      break;
    case FadingKind::gaussian_shadow: fading = {{"type", "gaussian_shadow"}, {"sigma_db", budget.fading.sigma_db}}; break;
  }
  return {{"tx_power_dbm", budget.tx_power_dbm}, {"tx_gain_dbi", budget.tx_gain_dbi},
          {"rx_gain_dbi", budget.rx_gain_dbi},   {"fading", fading},
          {"seed", budget.seed}};
}

namespace {

const std::set<std::string> kBudgetKeys = {"tx_power_dbm", "tx_gain_dbi", "rx_gain_dbi", "fading", "seed"};
const std::set<std::string> kFadingKeys = {"type", "s", "delta", "k", "sigma_db"};

}  // namespace

LinkBudget budget_from_json(const nlohmann::json& object) {
  if (!object.is_object()) throw ConfigError("link budget must be an object");
  LinkBudget budget;
  for (const auto& item : object.items()) {
    if (!kBudgetKeys.contains(item.key())) throw ConfigError(fmt::format("unknown link budget key '{}'", item.key()));
  }
  try {
    budget.tx_power_dbm = object.value("tx_power_dbm", budget.tx_power_dbm);
    budget.tx_gain_dbi = object.value("tx_gain_dbi", budget.tx_gain_dbi);
    budget.rx_gain_dbi = object.value("rx_gain_dbi", budget.rx_gain_dbi);
    budget.seed = object.value("seed", budget.seed);
    if (const auto f = object.find("fading"); f != object.end()) {
      const std::string type = f->at("type").get<std::string>();
      for (const auto& item : f->items()) {
        if (!kFadingKeys.contains(item.key())) throw ConfigError(fmt::format("unknown fading key '{}'", item.key()));
      }
      if (type == "off") {
        budget.fading.kind = FadingKind::off;
      } else if (type == "rician") {
        budget.fading.kind = FadingKind::rician;
        if (f->contains("k")) {
          budget.fading.rician = fading::RicianParams::from_k_factor(f->at("k").get<double>());
        } else {
          budget.fading.rician = {f->at("s").get<double>(), f->at("delta").get<double>()};
        }
      } else if (type == "gaussian_shadow") {
        budget.fading.kind = FadingKind::gaussian_shadow;
        budget.fading.sigma_db = f->at("sigma_db").get<double>();
      } else {
        throw ConfigError(fmt::format("unknown fading type '{}'", type));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("invalid link budget: {}", e.what()));
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("invalid link budget: {}", e.what()));
  }
  budget.validate();
  return budget;
}

double fading_draw_db(const LinkBudget& budget, std::uint64_t index) {
  switch (budget.fading.kind) {
    case FadingKind::off: return 0.0;
    case FadingKind::gaussian_shadow: {
      auto gen = row_stream(budget.seed, index);
      std::normal_distribution<double> normal(0.0, 1.0);
      return budget.fading.sigma_db * normal(gen);
    }
    case FadingKind::rician: {
      const auto& p = budget.fading.rician;
      auto gen = row_stream(budget.seed, index);
      std::normal_distribution<double> normal(0.0, 1.0);
      const double in_phase = p.los_amplitude + p.scatter_sigma * normal(gen);
      const double quadrature = p.scatter_sigma * normal(gen);
      const double amplitude = std::hypot(in_phase, quadrature);
      const double rms = std::sqrt(p.los_amplitude * p.los_amplitude + 2.0 * p.scatter_sigma * p.scatter_sigma);
      return -20.0 * std::log10(amplitude / rms);
    }
  }
  return 0.0;
}

double rss_from_path_loss(const LinkBudget& budget, double path_loss_db, std::optional<double> fading_term_db) {
  if (!std::isfinite(path_loss_db)) throw DomainError("path loss must be finite");
  const double fade = budget.fading.kind == FadingKind::off ? 0.0 : fading_term_db.value_or(0.0);
  return budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi - path_loss_db - fade;
}

const char* to_string(PathLossModel model) { return model == PathLossModel::hata ? "hata" : "a2g_mean"; }

PathLossModel path_loss_model_from_string(const std::string& name) {
  if (name == "hata") return PathLossModel::hata;
  if (name == "a2g_mean") return PathLossModel::a2g_mean;
  throw ConfigError(fmt::format("unknown path-loss model '{}'", name));
}

rbf::TrainingSet Dataset::training_set() const {
  rbf::TrainingSet set;
  set.features.resize(static_cast<Eigen::Index>(samples.size()), 4);
  set.targets.resize(static_cast<Eigen::Index>(samples.size()), 1);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const auto& s = samples[n];
    const auto row = static_cast<Eigen::Index>(n);
    set.features.row(row) << s.distance_m, s.altitude_m, s.frequency_mhz, s.path_loss_db;
    set.targets(row, 0) = s.rss_dbm;
  }
  return set;
}

double link_path_loss(const Environment& env, const channel::LinkGeometry& geom, double frequency_mhz,
                      const GeneratorOptions& options) {
  if (!(frequency_mhz > 0.0)) throw DomainError("frequency must be positive");
  if (options.path_loss == PathLossModel::hata) {
    const channel::HataParams hata{frequency_mhz, geom.altitude_m, options.rx_height_m};
    return channel::hata_path_loss(hata, channel::slant_distance(geom) / 1000.0);
  }
  const channel::A2GParams params{frequency_mhz * 1e6, env};
  return channel::mean_path_loss(params, geom, options.plos);
}

Dataset gen_distance_sweep(const Environment& env, double altitude_m, std::span<const double> distances_m,
                           double frequency_mhz, const LinkBudget& budget, const GeneratorOptions& options) {
  env.validate();
  budget.validate();
  if (!(altitude_m > 0.0)) throw DomainError(fmt::format("sweep altitude must be positive (got {})", altitude_m));
  if (distances_m.empty()) throw DomainError("distance sweep needs at least one distance");
  Dataset out;
  for (std::size_t i = 0; i < distances_m.size(); ++i) {
    if (i > 0 && !(distances_m[i] > distances_m[i - 1])) {
      throw DomainError(fmt::format("distance sweep must be strictly increasing (index {})", i));
    }
    try {
      out.samples.push_back(make_sample(env, {altitude_m, distances_m[i]}, frequency_mhz, budget, options, i,
                                        kDistanceSweep));
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("distance sweep row {}: {}", i, e.what()));
    }
  }
  out.metadata = {{"scenario", kDistanceSweep},
                  {"environment", environment_to_json(env)},
                  {"altitude_m", altitude_m},
                  {"distances_m", std::vector<double>(distances_m.begin(), distances_m.end())},
                  {"frequency_mhz", frequency_mhz},
                  {"link_budget", budget_to_json(budget)},
                  {"generator", options_to_json(options)},
                  {"seed", budget.seed}};
  return out;
}

std::vector<double> default_waypoint_altitudes() {
  std::vector<double> out;
  for (int h = 20; h <= 200; h += 20) out.push_back(h);
  return out;
}

Dataset gen_altitude_waypoints(const Environment& env, std::span<const double> altitudes_m, double ground_distance_m,
                               double frequency_mhz, const LinkBudget& budget, const GeneratorOptions& options) {
  env.validate();
  budget.validate();
  if (altitudes_m.empty()) throw DomainError("waypoint list must not be empty");
  if (!(ground_distance_m >= 0.0)) throw DomainError("ground distance must be non-negative");
  Dataset out;
  for (std::size_t i = 0; i < altitudes_m.size(); ++i) {
    if (!(altitudes_m[i] > 0.0)) throw DomainError(fmt::format("waypoint altitude at index {} must be positive", i));
    try {
      out.samples.push_back(make_sample(env, {altitudes_m[i], ground_distance_m}, frequency_mhz, budget, options, i,
                                        kAltitudeWaypoints));
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("waypoint row {}: {}", i, e.what()));
    }
  }
  out.metadata = {{"scenario", kAltitudeWaypoints},
                  {"environment", environment_to_json(env)},
                  {"altitudes_m", std::vector<double>(altitudes_m.begin(), altitudes_m.end())},
                  {"ground_distance_m", ground_distance_m},
                  {"frequency_mhz", frequency_mhz},
                  {"link_budget", budget_to_json(budget)},
                  {"generator", options_to_json(options)},
                  {"seed", budget.seed}};
  return out;
}

Dataset regenerate(const nlohmann::json& metadata) {
  try {
    const Environment env = environment_from_json(metadata.at("environment"));
    const LinkBudget budget = budget_from_json(metadata.at("link_budget"));
    const GeneratorOptions options = options_from_json(metadata.at("generator"));
    const double f = metadata.at("frequency_mhz").get<double>();
    const std::string scenario = metadata.at("scenario").get<std::string>();
    if (scenario == kDistanceSweep) {
      const auto distances = metadata.at("distances_m").get<std::vector<double>>();
      return gen_distance_sweep(env, metadata.at("altitude_m").get<double>(), distances, f, budget, options);
    }
    if (scenario == kAltitudeWaypoints) {
      const auto altitudes = metadata.at("altitudes_m").get<std::vector<double>>();
      return gen_altitude_waypoints(env, altitudes, metadata.at("ground_distance_m").get<double>(), f, budget,
                                    options);
    }
    throw FormatError(fmt::format("unknown scenario '{}' in metadata", scenario));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("dataset metadata is incomplete: {}", e.what()));
  }
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError(fmt::format("train fraction must lie in (0, 1) (got {})", train_fraction));
  }
  const std::size_t n = dataset.samples.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw ConfigError(fmt::format("train fraction {} on {} rows leaves one side empty", train_fraction, n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  std::shuffle(order.begin(), order.end(), gen);
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  Dataset train;
  Dataset test;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).samples.push_back(dataset.samples[order[i]]);
  }
  train.metadata = dataset.metadata;
  test.metadata = dataset.metadata;
  train.metadata["split"] = {{"side", "train"}, {"fraction", train_fraction}, {"seed", seed}};
  test.metadata["split"] = {{"side", "test"}, {"fraction", train_fraction}, {"seed", seed}};
  return {std::move(train), std::move(test)};
}

std::string to_csv(const Dataset& dataset) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& s : dataset.samples) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", s.index, s.scenario, s.distance_m, s.altitude_m, s.frequency_mhz,
                       s.path_loss_db, s.plos, s.rss_dbm);
  }
  return out;
}

std::vector<Sample> samples_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("line 1: dataset file is empty");
  if (!line.empty() && line.back() == '\r') throw FormatError("line 1: CRLF line endings are not accepted");
  if (line != kCsvHeader) throw FormatError(fmt::format("line 1: expected header '{}'", kCsvHeader));

  std::vector<Sample> samples;
  std::set<std::uint64_t> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 8) throw FormatError(fmt::format("line {}: expected 8 fields, got {}", line_no, fields.size()));
    Sample s;
    const auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), s.index);
    if (ec != std::errc() || ptr != fields[0].data() + fields[0].size()) {
      throw FormatError(fmt::format("line {}: index is not a non-negative integer", line_no));
    }
    s.scenario = std::string(fields[1]);
    s.distance_m = parse_double(fields[2], line_no, "D_m");
    s.altitude_m = parse_double(fields[3], line_no, "H_m");
    s.frequency_mhz = parse_double(fields[4], line_no, "F_MHz");
    s.path_loss_db = parse_double(fields[5], line_no, "PL_dB");
    s.plos = parse_double(fields[6], line_no, "PLOS");
    s.rss_dbm = parse_double(fields[7], line_no, "RSS_dBm");
    if (s.distance_m < 0.0 || s.altitude_m < 0.0 || !(s.frequency_mhz > 0.0) || s.plos < 0.0 || s.plos > 1.0) {
      throw FormatError(fmt::format("line {}: value outside the sample invariants", line_no));
    }
    if (!seen.insert(s.index).second) throw FormatError(fmt::format("line {}: duplicate index {}", line_no, s.index));
    if (!samples.empty() && s.index < samples.back().index) {
      throw FormatError(fmt::format("line {}: rows are not ordered by index", line_no));
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw FormatError("dataset has no rows");
  return samples;
}

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& csv_path) {
  if (dataset.samples.empty()) throw DomainError("refusing to write an empty dataset");
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw FormatError(fmt::format("cannot write '{}'", csv_path.string()));
    out << to_csv(dataset);
  }
  std::ofstream meta(metadata_path(csv_path), std::ios::binary);
  if (!meta) throw FormatError(fmt::format("cannot write '{}'", metadata_path(csv_path).string()));
  meta << dataset.metadata.dump(2) << "\n";
}

Dataset read_dataset(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot open dataset '{}'", csv_path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  Dataset dataset;
  dataset.samples = samples_from_csv(text.str());
  if (std::ifstream meta(metadata_path(csv_path)); meta) {
    try {
      dataset.metadata = nlohmann::json::parse(meta);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(fmt::format("{}: {}", metadata_path(csv_path).string(), e.what()));
    }
  }
  return dataset;
}

}  // namespace skylink::datagen
