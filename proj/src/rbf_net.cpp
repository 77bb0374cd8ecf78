#include "skylink/rbf_net.hpp"

#include "skylink/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace skylink::rbf {
namespace {

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

void require_dim(Eigen::Index got, std::size_t want, const char* what) {
  if (static_cast<std::size_t>(got) != want) {
    throw DomainError(fmt::format("{} has {} entries, expected {}", what, got, want));
  }
}

MinMax column_range(const Eigen::MatrixXd& m, Eigen::Index col) {
  MinMax r{m.col(col).minCoeff(), m.col(col).maxCoeff()};
  if (!(r.max > r.min)) r.max = r.min + 1.0;
  return r;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) throw FormatError(fmt::format("model field '{}' must be a non-empty array", what));
  const std::size_t cols = rows[0].size();
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) {
      throw FormatError(fmt::format("model field '{}' is not a rectangular matrix", what));
    }
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json ranges_to_json(const std::vector<MinMax>& ranges) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : ranges) out.push_back({{"min", r.min}, {"max", r.max}});
  return out;
}

std::vector<MinMax> ranges_from_json(const nlohmann::json& list) {
  if (!list.is_array()) throw FormatError("norm_stats entries must be arrays");
  std::vector<MinMax> out;
  for (const auto& item : list) out.push_back(MinMax{item.at("min").get<double>(), item.at("max").get<double>()});
  return out;
}

void check_finite(const RbfNetwork& net) {
  if (!net.weights.allFinite()) throw DivergenceError("weights", "non-finite output weights after update");
  if (!net.centers.allFinite()) throw DivergenceError("centers", "non-finite centers after update");
  if (!net.spans.allFinite()) throw DivergenceError("spans", "non-finite spans after update");
}

}  // namespace

const char* to_string(UpdateMode mode) {
  return mode == UpdateMode::derived_gradient ? "derived_gradient" : "paper_literal";
}

UpdateMode update_mode_from_string(const std::string& name) {
  if (name == "derived_gradient") return UpdateMode::derived_gradient;
  if (name == "paper_literal") return UpdateMode::paper_literal;
  throw ConfigError(fmt::format("unknown update mode '{}'", name));
}

void RbfConfig::validate() const {
  if (hidden < 1) throw ConfigError("hidden unit count must be at least 1");
  if (input_dim < 1) throw ConfigError("input dimension must be at least 1");
  if (output_dim < 1) throw ConfigError("output dimension must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  for (double rate : {tau_w, tau_mu, span_rate()}) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw ConfigError("learning rates must be finite and non-negative");
  }
}

nlohmann::json config_to_json(const RbfConfig& config) {
  return {{"hidden", config.hidden},   {"input_dim", config.input_dim},
          {"output_dim", config.output_dim}, {"tau_w", config.tau_w},
          {"tau_mu", config.tau_mu},   {"tau_delta", config.span_rate()},
          {"epochs", config.epochs},   {"seed", config.seed},
          {"update_mode", to_string(config.update_mode)}};
}

RbfConfig config_from_json(const nlohmann::json& object) {
  if (!object.is_object()) throw ConfigError("rbf config must be an object");
  static const std::vector<std::string> known = {"hidden", "input_dim", "output_dim", "tau_w",      "tau_mu",
                                                 "tau_delta", "epochs", "seed",       "update_mode"};
  for (const auto& item : object.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ConfigError(fmt::format("unknown rbf config key '{}'", item.key()));
    }
  }
  RbfConfig c;
  auto count = [&](const char* key, std::size_t& dst) {
    if (!object.contains(key)) return;
    const auto& v = object[key];
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError(fmt::format("rbf config '{}' must be a non-negative integer", key));
    }
    dst = v.get<std::size_t>();
  };
  auto rate = [&](const char* key, double& dst) {
    if (!object.contains(key)) return;
    if (!object[key].is_number()) throw ConfigError(fmt::format("rbf config '{}' must be a number", key));
    dst = object[key].get<double>();
  };
  count("hidden", c.hidden);
  count("input_dim", c.input_dim);
  count("output_dim", c.output_dim);
  count("epochs", c.epochs);
  rate("tau_w", c.tau_w);
  rate("tau_mu", c.tau_mu);
  if (object.contains("tau_delta")) {
    double v = 0.0;
    rate("tau_delta", v);
    c.tau_delta = v;
  }
  if (object.contains("seed")) {
    if (!object["seed"].is_number_integer()) throw ConfigError("rbf config 'seed' must be an integer");
    c.seed = object["seed"].get<std::uint64_t>();
  }
  if (object.contains("update_mode")) {
    if (!object["update_mode"].is_string()) throw ConfigError("rbf config 'update_mode' must be a string");
    c.update_mode = update_mode_from_string(object["update_mode"].get<std::string>());
  }
  c.validate();
  return c;
}

NormStats NormStats::fit(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets) {
  if (features.rows() == 0 || targets.rows() != features.rows()) {
    throw DomainError("normalization needs matching, non-empty feature and target rows");
  }
  NormStats stats;
  for (Eigen::Index c = 0; c < features.cols(); ++c) stats.features.push_back(column_range(features, c));
  for (Eigen::Index c = 0; c < targets.cols(); ++c) stats.targets.push_back(column_range(targets, c));
  return stats;
}

Eigen::VectorXd NormStats::normalize_features(const Eigen::VectorXd& raw) const {
  require_dim(raw.size(), features.size(), "feature vector");
  Eigen::VectorXd out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) out(i) = features[i].normalize(raw(i));
  return out;
}

Eigen::VectorXd NormStats::normalize_targets(const Eigen::VectorXd& raw) const {
  require_dim(raw.size(), targets.size(), "target vector");
  Eigen::VectorXd out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) out(i) = targets[i].normalize(raw(i));
  return out;
}

Eigen::VectorXd NormStats::denormalize_targets(const Eigen::VectorXd& unit) const {
  require_dim(unit.size(), targets.size(), "output vector");
  Eigen::VectorXd out(unit.size());
  for (Eigen::Index i = 0; i < unit.size(); ++i) out(i) = targets[i].denormalize(unit(i));
  return out;
}

void RbfNetwork::check_consistent() const {
  if (centers.rows() < 1 || centers.cols() < 1) throw ConfigError("network has no hidden units");
  if (spans.size() != centers.rows()) throw ConfigError("span count does not match hidden units");
  if (weights.cols() != centers.rows() || weights.rows() < 1) throw ConfigError("weight matrix shape mismatch");
  if ((spans.array() <= 0.0).any()) throw ConfigError("spans must be strictly positive");
  if (norm.features.size() != input_dim() || norm.targets.size() != output_dim()) {
    throw ConfigError("normalization statistics do not match network dimensions");
  }
  for (const auto* list : {&norm.features, &norm.targets}) {
    for (const auto& r : *list) {
      if (!(r.max > r.min)) throw ConfigError("normalization statistics need min < max");
    }
  }
}

Eigen::VectorXd hidden_activations(const RbfNetwork& net, const Eigen::VectorXd& x) {
  require_dim(x.size(), net.input_dim(), "input");
  Eigen::VectorXd z(net.hidden());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double dist_sq = (x.transpose() - net.centers.row(j)).squaredNorm();
    z(j) = std::exp(-dist_sq / (2.0 * net.spans(j) * net.spans(j)));
  }
  return z;
}

Eigen::VectorXd forward(const RbfNetwork& net, const Eigen::VectorXd& x) {
  return net.weights * hidden_activations(net, x);
}

Eigen::VectorXd predict(const RbfNetwork& net, const Eigen::VectorXd& raw_features) {
  return net.norm.denormalize_targets(forward(net, net.norm.normalize_features(raw_features)));
}

Eigen::VectorXd error_signal(const Eigen::VectorXd& desired, const Eigen::VectorXd& output) {
  if (desired.size() != output.size()) {
    throw DomainError(fmt::format("target length {} does not match output length {}", desired.size(), output.size()));
  }
  return desired - output;
}

double sample_loss(const RbfNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& desired) {
  return 0.5 * error_signal(desired, forward(net, x)).squaredNorm();
}

Gradients loss_gradient(const RbfNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& desired) {
  const Eigen::VectorXd z = hidden_activations(net, x);
  const Eigen::VectorXd e = error_signal(desired, net.weights * z);
  // back[j] = sum_k e_k W_kj
  const Eigen::VectorXd back = net.weights.transpose() * e;

  Gradients g;
  g.weights = -e * z.transpose();
  g.centers.resize(net.centers.rows(), net.centers.cols());
  g.spans.resize(net.spans.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double span = net.spans(j);
    const Eigen::RowVectorXd offset = x.transpose() - net.centers.row(j);
    g.centers.row(j) = -back(j) * z(j) / (span * span) * offset;
    g.spans(j) = -back(j) * z(j) * offset.squaredNorm() / (span * span * span);
  }
  return g;
}

void train_step(RbfNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& desired, const RbfConfig& config) {
  const Eigen::VectorXd z = hidden_activations(net, x);
  const Eigen::VectorXd e = error_signal(desired, net.weights * z);
  const Eigen::VectorXd back = net.weights.transpose() * e;
  const bool literal = config.update_mode == UpdateMode::paper_literal;

  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double span = net.spans(j);
    const double center_scale = literal ? z(j) / span : z(j) / (span * span);
    const Eigen::RowVectorXd offset = x.transpose() - net.centers.row(j);
    net.centers.row(j) += config.tau_mu * center_scale * back(j) * offset;

    // ln z_j = -|x - mu_j|^2 / (2 delta_j^2); the closed form avoids log(0).
    const double log_z = -offset.squaredNorm() / (2.0 * span * span);
    const double updated = span - 2.0 * config.span_rate() * z(j) / span * log_z * back(j);
    net.spans(j) = std::isnan(updated) ? updated : std::max(updated, kSpanFloor);
  }
  const Eigen::MatrixXd weight_step = config.tau_w * e * z.transpose();
  if (literal) {
    net.weights -= weight_step;
  } else {
    net.weights += weight_step;
  }
  check_finite(net);
}

double gradient_check(const RbfNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& desired,
                      double epsilon) {
  const Gradients analytic = loss_gradient(net, x, desired);
  RbfNetwork probe = net;
  double worst = 0.0;
  auto compare = [&](double& param, double grad) {
    const double saved = param;
    param = saved + epsilon;
    const double plus = sample_loss(probe, x, desired);
    param = saved - epsilon;
    const double minus = sample_loss(probe, x, desired);
    param = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double denom = std::max({std::abs(grad), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(grad - numeric) / denom);
  };
  for (Eigen::Index k = 0; k < probe.weights.rows(); ++k) {
    for (Eigen::Index j = 0; j < probe.weights.cols(); ++j) compare(probe.weights(k, j), analytic.weights(k, j));
  }
  for (Eigen::Index j = 0; j < probe.centers.rows(); ++j) {
    for (Eigen::Index i = 0; i < probe.centers.cols(); ++i) compare(probe.centers(j, i), analytic.centers(j, i));
  }
  for (Eigen::Index j = 0; j < probe.spans.size(); ++j) compare(probe.spans(j), analytic.spans(j));
  return worst;
}

RbfNetwork initialize(const RbfConfig& config, const Eigen::MatrixXd& normalized_inputs, NormStats norm) {
  config.validate();
  if (static_cast<std::size_t>(normalized_inputs.cols()) != config.input_dim) {
    throw ConfigError(fmt::format("training inputs have {} columns, config expects {}", normalized_inputs.cols(),
                                  config.input_dim));
  }
  const auto rows = static_cast<std::size_t>(normalized_inputs.rows());
  if (rows < config.hidden) {
    throw ConfigError(fmt::format("{} training rows cannot seed {} hidden units", rows, config.hidden));
  }

  std::mt19937_64 gen(config.seed);
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), gen);

  RbfNetwork net;
  net.norm = std::move(norm);
  net.centers.resize(config.hidden, config.input_dim);
  for (std::size_t j = 0; j < config.hidden; ++j) net.centers.row(j) = normalized_inputs.row(order[j]);

  double span = 0.5;
  if (config.hidden > 1) {
    double total = 0.0;
    for (std::size_t j = 0; j < config.hidden; ++j) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < config.hidden; ++l) {
        if (l != j) nearest = std::min(nearest, (net.centers.row(j) - net.centers.row(l)).norm());
      }
      total += nearest;
    }
    span = total / static_cast<double>(config.hidden);
    if (!(span > kSpanFloor)) span = 0.5;
  }
  net.spans = Eigen::VectorXd::Constant(config.hidden, span);

  std::uniform_real_distribution<double> uniform(-0.1, 0.1);
  net.weights.resize(config.output_dim, config.hidden);
  for (std::size_t k = 0; k < config.output_dim; ++k) {
    for (std::size_t j = 0; j < config.hidden; ++j) net.weights(k, j) = uniform(gen);
  }
  if (config.output_dim >= 2) {
    net.weights(0, 0) = 1.0;
    net.weights(1, 0) = 1.0;
  }
  return net;
}

double mean_squared_error(const RbfNetwork& net, const TrainingSet& data) {
  double total = 0.0;
  for (Eigen::Index n = 0; n < data.features.rows(); ++n) {
    const Eigen::VectorXd x = net.norm.normalize_features(data.features.row(n).transpose());
    const Eigen::VectorXd d = net.norm.normalize_targets(data.targets.row(n).transpose());
    total += error_signal(d, forward(net, x)).squaredNorm();
  }
  return total / static_cast<double>(data.features.rows() * data.targets.cols());
}

double rmse_denormalized(const RbfNetwork& net, const TrainingSet& data) {
  double total = 0.0;
  for (Eigen::Index n = 0; n < data.features.rows(); ++n) {
    const Eigen::VectorXd y = predict(net, data.features.row(n).transpose());
    total += (data.targets.row(n).transpose() - y).squaredNorm();
  }
  return std::sqrt(total / static_cast<double>(data.features.rows() * data.targets.cols()));
}

TrainReport train(RbfNetwork& net, const TrainingSet& train_set, const TrainingSet* validation,
                  const RbfConfig& config) {
  config.validate();
  net.check_consistent();
  if (train_set.size() == 0) throw DomainError("training set is empty");
  if (train_set.targets.rows() != train_set.features.rows()) throw DomainError("feature/target row mismatch");

  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> desired;
  for (std::size_t n = 0; n < train_set.size(); ++n) {
    inputs.push_back(net.norm.normalize_features(train_set.features.row(n).transpose()));
    desired.push_back(net.norm.normalize_targets(train_set.targets.row(n).transpose()));
  }

  std::mt19937_64 gen(config.seed ^ kShuffleStream);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  report.epoch_mse.reserve(config.epochs);
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), gen);
    try {
      for (std::size_t idx : order) train_step(net, inputs[idx], desired[idx], config);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.parameter_class(),
                            fmt::format("training diverged at epoch {}: {}", epoch, e.what()));
    }
    report.epoch_mse.push_back(mean_squared_error(net, train_set));
  }

  report.train_rmse = std::sqrt(report.epoch_mse.back());
  report.train_rmse_db = rmse_denormalized(net, train_set);
  const TrainingSet& held_out = validation != nullptr && validation->size() > 0 ? *validation : train_set;
  report.validation_rmse = std::sqrt(mean_squared_error(net, held_out));
  report.validation_rmse_db = rmse_denormalized(net, held_out);
  return report;
}

FitResult fit(const RbfConfig& config, const TrainingSet& train_set, const TrainingSet* validation) {
  config.validate();
  if (train_set.size() == 0) throw DomainError("training set is empty");
  NormStats norm = NormStats::fit(train_set.features, train_set.targets);
  Eigen::MatrixXd normalized(train_set.features.rows(), train_set.features.cols());
  for (Eigen::Index n = 0; n < normalized.rows(); ++n) {
    normalized.row(n) = norm.normalize_features(train_set.features.row(n).transpose()).transpose();
  }
  if (static_cast<std::size_t>(train_set.targets.cols()) != config.output_dim) {
    throw ConfigError(fmt::format("dataset has {} targets, config expects {}", train_set.targets.cols(),
                                  config.output_dim));
  }
  FitResult result{initialize(config, normalized, std::move(norm)), {}};
  result.report = train(result.network, train_set, validation, config);
  return result;
}

nlohmann::json network_to_json(const RbfNetwork& net, const RbfConfig& config) {
  net.check_consistent();
  nlohmann::json spans = nlohmann::json::array();
  for (Eigen::Index j = 0; j < net.spans.size(); ++j) spans.push_back(net.spans(j));
  return {{"format_version", kModelFormatVersion},
          {"config", config_to_json(config)},
          {"norm_stats", {{"features", ranges_to_json(net.norm.features)}, {"targets", ranges_to_json(net.norm.targets)}}},
          {"centers", matrix_to_json(net.centers)},
          {"spans", spans},
          {"weights", matrix_to_json(net.weights)}};
}

RbfNetwork network_from_json(const nlohmann::json& document, RbfConfig* config) {
  try {
    if (!document.is_object()) throw FormatError("model document must be a JSON object");
    if (document.at("format_version").get<int>() != kModelFormatVersion) {
      throw FormatError(fmt::format("unsupported model format_version {}", document["format_version"].dump()));
    }
    RbfNetwork net;
    net.centers = matrix_from_json(document.at("centers"), "centers");
    net.weights = matrix_from_json(document.at("weights"), "weights");
    const auto& spans = document.at("spans");
    if (!spans.is_array()) throw FormatError("model field 'spans' must be an array");
    net.spans.resize(static_cast<Eigen::Index>(spans.size()));
    for (std::size_t j = 0; j < spans.size(); ++j) net.spans(static_cast<Eigen::Index>(j)) = spans[j].get<double>();
    net.norm.features = ranges_from_json(document.at("norm_stats").at("features"));
    net.norm.targets = ranges_from_json(document.at("norm_stats").at("targets"));
    if (config != nullptr) *config = config_from_json(document.at("config"));
    net.check_consistent();
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed model document: {}", e.what()));
  } catch (const ConfigError& e) {
    throw FormatError(fmt::format("inconsistent model document: {}", e.what()));
  }
}

}  // namespace skylink::rbf
