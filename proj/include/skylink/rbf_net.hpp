#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Gaussian radial-basis-function network trained by per-sample updates of its
// output weights, centers and spans.
namespace skylink::rbf {

/// derived_gradient is exact stochastic gradient descent on E = 1/2 sum e_k^2.
/// paper_literal subtracts the weight step and divides the center step by the
/// span instead of its square.
enum class UpdateMode { derived_gradient, paper_literal };

const char* to_string(UpdateMode mode);
UpdateMode update_mode_from_string(const std::string& name);

inline constexpr double kSpanFloor = 1e-6;

struct RbfConfig {
  std::size_t hidden = 20;
  std::size_t input_dim = 4;  // D, H, F, P
  std::size_t output_dim = 1;
  double tau_w = 0.05;
  double tau_mu = 0.01;
  std::optional<double> tau_delta;  // defaults to tau_mu
  std::size_t epochs = 2000;
  std::uint64_t seed = 1;
  UpdateMode update_mode = UpdateMode::derived_gradient;

  double span_rate() const { return tau_delta.value_or(tau_mu); }

  /// Throws ConfigError. Zero learning rates are accepted (frozen parameters).
  void validate() const;
};

nlohmann::json config_to_json(const RbfConfig& config);
RbfConfig config_from_json(const nlohmann::json& object);

/// Affine map of one dimension onto [0, 1].
struct MinMax {
  double min = 0.0;
  double max = 1.0;

  double normalize(double v) const { return (v - min) / (max - min); }
  double denormalize(double u) const { return min + u * (max - min); }
  double range() const { return max - min; }
};

struct NormStats {
  std::vector<MinMax> features;
  std::vector<MinMax> targets;

  /// Per-column min/max. Constant columns get max = min + 1 so that they map
  /// to 0 and the min < max invariant holds.
  static NormStats fit(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets);

  Eigen::VectorXd normalize_features(const Eigen::VectorXd& raw) const;
  Eigen::VectorXd normalize_targets(const Eigen::VectorXd& raw) const;
  Eigen::VectorXd denormalize_targets(const Eigen::VectorXd& unit) const;
};

struct RbfNetwork {
  Eigen::MatrixXd centers;  // hidden x input_dim, normalized feature space
  Eigen::VectorXd spans;    // hidden
  Eigen::MatrixXd weights;  // output_dim x hidden
  NormStats norm;

  std::size_t hidden() const { return static_cast<std::size_t>(centers.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(centers.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weights.rows()); }

  /// Throws ConfigError on inconsistent dimensions, non-positive spans or
  /// degenerate normalization statistics.
  void check_consistent() const;
};

/// z_j = exp(-|x - mu_j|^2 / (2 delta_j^2)) for a normalized input.
Eigen::VectorXd hidden_activations(const RbfNetwork& net, const Eigen::VectorXd& x);

/// Normalized outputs Y_k = sum_j W_kj z_j.
Eigen::VectorXd forward(const RbfNetwork& net, const Eigen::VectorXd& x);

/// Raw features in, denormalized targets out.
Eigen::VectorXd predict(const RbfNetwork& net, const Eigen::VectorXd& raw_features);

/// e_k = d_k - y_k.
Eigen::VectorXd error_signal(const Eigen::VectorXd& desired, const Eigen::VectorXd& output);

/// Analytic gradient of E = 1/2 sum_k e_k^2 with respect to every parameter.
struct Gradients {
  Eigen::MatrixXd weights;
  Eigen::MatrixXd centers;
  Eigen::VectorXd spans;
};

double sample_loss(const RbfNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& desired);
Gradients loss_gradient(const RbfNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& desired);

/// Applies one update for the sample (x, desired) in the configured mode.
/// Spans are floored at kSpanFloor. Throws DivergenceError if any parameter
/// becomes non-finite.
void train_step(RbfNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& desired, const RbfConfig& config);

/// Maximum relative difference between loss_gradient and central differences
/// of step `epsilon` over all parameters. Denominators are floored at 1e-6.
double gradient_check(const RbfNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& desired,
                      double epsilon = 1e-6);

/// Centers are `hidden` distinct rows of `normalized_inputs` chosen with the
/// seed; every span is the mean nearest-other-center distance (0.5 when there
/// is a single hidden unit); weights are uniform in [-0.1, 0.1] except
/// W_11 = W_21 = 1 when there are at least two outputs.
RbfNetwork initialize(const RbfConfig& config, const Eigen::MatrixXd& normalized_inputs, NormStats norm);

/// Raw (denormalized) rows: one sample per row.
struct TrainingSet {
  Eigen::MatrixXd features;
  Eigen::MatrixXd targets;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
};

struct TrainReport {
  std::vector<double> epoch_mse;  // normalized units, over the training set
  double train_rmse = 0.0;
  double validation_rmse = 0.0;
  double train_rmse_db = 0.0;
  double validation_rmse_db = 0.0;
};

/// Mean squared error in normalized units.
double mean_squared_error(const RbfNetwork& net, const TrainingSet& data);

/// Root-mean-square error in target units (dB for RSS).
double rmse_denormalized(const RbfNetwork& net, const TrainingSet& data);

/// Runs config.epochs shuffled passes of train_step over `train_set`. The
/// validation set, when given, is only evaluated. DivergenceError carries
/// the epoch in its message.
TrainReport train(RbfNetwork& net, const TrainingSet& train_set, const TrainingSet* validation,
                  const RbfConfig& config);

struct FitResult {
  RbfNetwork network;
  TrainReport report;
};

/// Normalization from the training split, initialization and training.
FitResult fit(const RbfConfig& config, const TrainingSet& train_set, const TrainingSet* validation = nullptr);

/// Model document: format_version, config echo, norm_stats, centers, spans
/// and weights. Doubles are written in shortest round-trip form.
nlohmann::json network_to_json(const RbfNetwork& net, const RbfConfig& config);
RbfNetwork network_from_json(const nlohmann::json& document, RbfConfig* config = nullptr);

inline constexpr int kModelFormatVersion = 1;

}  // namespace skylink::rbf
