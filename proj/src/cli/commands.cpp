#include "commands.hpp"

#include "skylink/error.hpp"
#include "skylink/log.hpp"
#include "skylink/table.hpp"
#include "skylink/version.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace skylink::cli {
namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

rbf::RbfNetwork load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open model '{}'", path.string()));
  try {
    return rbf::network_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(fmt::format("{}: malformed model file: {}", path.string(), e.what()));
  }
}

datagen::Dataset load_dataset(const std::filesystem::path& path) {
  try {
    return datagen::read_dataset(path);
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

int cmd_generate(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load_run_config(args.config, args.seed);
  datagen::Dataset dataset = build_dataset(cfg);
  dataset.metadata["run_config_hash"] = cfg.hash();
  std::filesystem::create_directories(args.out);
  const auto csv = std::filesystem::path(args.out) / (cfg.scenario.name + ".csv");
  datagen::write_dataset(dataset, csv);
  out << fmt::format("rows: {}\ndataset: {}\nmetadata: {}\n", dataset.samples.size(), csv.string(),
                     datagen::metadata_path(csv).string());
  return kExitOk;
}

int cmd_train(const CommonArgs& args, const std::string& data_path, std::ostream& out) {
  const RunConfig cfg = load_run_config(args.config, args.seed);
  const datagen::Dataset dataset = load_dataset(data_path);

  datagen::Dataset train = dataset;
  datagen::Dataset validation;
  if (dataset.samples.size() >= 2) {
    std::tie(train, validation) = datagen::split(dataset, cfg.scenario.train_fraction, cfg.scenario.split_seed);
  } else {
    logger().warn("dataset has a single row; validating on the training row");
  }
  const auto train_set = train.training_set();
  const auto validation_set = validation.samples.empty() ? train_set : validation.training_set();
  if (static_cast<std::size_t>(train_set.features.rows()) < cfg.rbf.hidden) {
    throw UsageError(fmt::format("{}:1: {} training rows cannot seed {} hidden units; lower rbf.hidden",
                                 args.config, train_set.features.rows(), cfg.rbf.hidden));
  }

  const rbf::FitResult result = rbf::fit(cfg.rbf, train_set, &validation_set);
  const auto& report = result.report;
  const bool rising = report.epoch_mse.back() > report.epoch_mse.front();
  if (rising) {
    logger().warn("training error rose from {} to {} ({} updates); the run is diverging", report.epoch_mse.front(),
                  report.epoch_mse.back(), rbf::to_string(cfg.rbf.update_mode));
  }

  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  nlohmann::json model = rbf::network_to_json(result.network, cfg.rbf);
  model["run_config"] = cfg.document;
  write_text(dir / "model.json", model.dump(2) + "\n");

  std::string mse_csv = "epoch,mse\n";
  for (std::size_t i = 0; i < report.epoch_mse.size(); ++i) mse_csv += fmt::format("{},{}\n", i + 1, report.epoch_mse[i]);
  write_text(dir / "train_report.csv", mse_csv);

  const nlohmann::json summary = {{"version", kVersion},
                                  {"config_hash", cfg.hash()},
                                  {"update_mode", rbf::to_string(cfg.rbf.update_mode)},
                                  {"epochs", cfg.rbf.epochs},
                                  {"train_rows", train.samples.size()},
                                  {"validation_rows", validation.samples.size()},
                                  {"train_rmse", report.train_rmse},
                                  {"validation_rmse", report.validation_rmse},
                                  {"train_rmse_db", report.train_rmse_db},
                                  {"validation_rmse_db", report.validation_rmse_db},
                                  {"mse_increased", rising}};
  write_text(dir / "train_report.json", summary.dump(2) + "\n");

  out << fmt::format("train_rmse_db: {}\nvalidation_rmse_db: {}\nmodel: {}\n", report.train_rmse_db,
                     report.validation_rmse_db, (dir / "model.json").string());
  return kExitOk;
}

std::vector<Eigen::VectorXd> parse_feature_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Eigen::VectorXd> rows;
  if (!std::getline(in, line)) throw FormatError("input file is empty");
  const bool dataset_schema = line == datagen::kCsvHeader;
  if (dataset_schema) {
    for (const auto& s : datagen::samples_from_csv(text)) {
      Eigen::VectorXd x(4);
      x << s.distance_m, s.altitude_m, s.frequency_mhz, s.path_loss_db;
      rows.push_back(std::move(x));
    }
    return rows;
  }
  if (line != "D_m,H_m,F_MHz,PL_dB") {
    throw FormatError(fmt::format("line 1: expected header 'D_m,H_m,F_MHz,PL_dB' or '{}'", datagen::kCsvHeader));
  }
  const Table table = parse_table(text);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Eigen::VectorXd x(4);
    for (std::size_t c = 0; c < 4; ++c) x(static_cast<Eigen::Index>(c)) = table.number(r, c);
    if (!x.allFinite()) throw FormatError(fmt::format("line {}: feature values must be finite", r + 2));
    rows.push_back(std::move(x));
  }
  if (rows.empty()) throw FormatError("input file has no rows");
  return rows;
}

Eigen::VectorXd parse_row_flag(const std::string& row) {
  const Table table = parse_table("D_m,H_m,F_MHz,PL_dB\n" + row + "\n");
  if (table.rows.size() != 1) throw FormatError(fmt::format("--row '{}' must hold D,H,F,P", row));
  Eigen::VectorXd x(4);
  for (std::size_t c = 0; c < 4; ++c) x(static_cast<Eigen::Index>(c)) = table.number(0, c);
  if (!x.allFinite()) throw FormatError(fmt::format("--row '{}' must hold four finite numbers", row));
  return x;
}

int cmd_predict(const std::string& model_path, const std::vector<std::string>& row_flags, const std::string& input,
                const std::string& out_dir, std::ostream& out) {
  const rbf::RbfNetwork net = load_model(model_path);
  if (net.input_dim() != 4) throw FormatError("model does not take the D,H,F,P feature vector");

  std::vector<Eigen::VectorXd> rows;
  for (const auto& r : row_flags) rows.push_back(parse_row_flag(r));
  if (!input.empty()) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw FormatError(fmt::format("cannot open input '{}'", input));
    std::ostringstream text;
    text << in.rdbuf();
    try {
      for (auto& x : parse_feature_rows(text.str())) rows.push_back(std::move(x));
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("{}: {}", input, e.what()));
    }
  }
  if (rows.empty()) throw UsageError("predict needs --row or a non-empty --input file");

  std::string lines;
  bool warned = false;
  for (const auto& x : rows) {
    const Eigen::VectorXd unit = net.norm.normalize_features(x);
    if (!warned && ((unit.array() < -1e-12).any() || (unit.array() > 1.0 + 1e-12).any())) {
      logger().warn("input outside the training range; extrapolating");
      warned = true;
    }
    lines += fmt::format("{}\n", rbf::predict(net, x)(0));
  }
  out << lines;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(std::filesystem::path(out_dir) / "predictions.txt", lines);
  }
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, const std::string& out_dir,
             std::ostream& out) {
  const rbf::RbfNetwork net = load_model(model_path);
  const datagen::Dataset dataset = load_dataset(data_path);
  const auto set = dataset.training_set();
  double sq = 0.0;
  double abs_sum = 0.0;
  double worst = 0.0;
  for (Eigen::Index n = 0; n < set.features.rows(); ++n) {
    const double err = rbf::predict(net, set.features.row(n).transpose())(0) - set.targets(n, 0);
    sq += err * err;
    abs_sum += std::abs(err);
    worst = std::max(worst, std::abs(err));
  }
  const auto count = static_cast<double>(set.features.rows());
  const nlohmann::json metrics = {{"rows", set.features.rows()},
                                  {"rmse_db", std::sqrt(sq / count)},
                                  {"mae_db", abs_sum / count},
                                  {"max_abs_error_db", worst}};
  out << fmt::format("rows: {}\nrmse_db: {}\nmae_db: {}\nmax_abs_error_db: {}\n", set.features.rows(),
                     metrics["rmse_db"].get<double>(), metrics["mae_db"].get<double>(), worst);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(std::filesystem::path(out_dir) / "eval.json", metrics.dump(2) + "\n");
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config, "Run configuration (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--seed", args.seed, "Override every seed in the config");
}

}  // namespace

datagen::Dataset build_dataset(const RunConfig& cfg, const std::string& type) {
  const std::string scenario = type.empty() ? cfg.scenario.type : type;
  const auto& sc = cfg.scenario;
  if (scenario == datagen::kDistanceSweep) {
    return datagen::gen_distance_sweep(cfg.environment, sc.altitude_m, sc.distances_m, sc.frequency_mhz, cfg.budget,
                                       cfg.generator);
  }
  return datagen::gen_altitude_waypoints(cfg.environment, sc.altitudes_m, sc.ground_distance_m, sc.frequency_mhz,
                                         cfg.budget, cfg.generator);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  reload_log_level();
  CLI::App app{fmt::format("skylink {}: UAV air-to-ground channel models and RBF signal-strength prediction", kVersion)};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonArgs common;
  auto* generate = app.add_subcommand("generate", "Generate a scenario dataset (CSV + metadata JSON)");
  add_common(generate, common, true);

  std::string data_path;
  auto* train = app.add_subcommand("train", "Train the RBF network on a dataset");
  add_common(train, common, true);
  train->add_option("--data", data_path, "Dataset CSV")->required();

  std::string model_path;
  std::vector<std::string> rows;
  std::string input;
  std::string predict_out;
  auto* predict = app.add_subcommand("predict", "Predict RSS (dBm) for feature rows");
  predict->add_option("--model", model_path, "Model JSON")->required();
  predict->add_option("--row", rows, "Feature row D,H,F,P (repeatable)");
  predict->add_option("--input", input, "CSV of feature rows or a dataset CSV");
  predict->add_option("--out", predict_out, "Also write predictions.txt here");

  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "Report RMSE, MAE and max error of a model on a dataset");
  eval->add_option("--model", model_path, "Model JSON")->required();
  eval->add_option("--data", data_path, "Dataset CSV")->required();
  eval->add_option("--out", eval_out, "Also write eval.json here");

  CurveRequest curve;
  std::string curve_model;
  auto* curves = app.add_subcommand("curves", "Emit plot-ready curve CSVs");
  add_common(curves, common, true);
  curves->add_option("--which", curve.which, "Curve to emit")->required()->check(CLI::IsMember(kCurveNames));
  curves->add_option("--model", curve_model, "Use this model for the RSS curves instead of training");
  curves->add_flag("--k-db", curve.k_in_db, "Interpret the Rician K list in dB");

  std::vector<const char*> argv{"skylink"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(common, out);
    if (*train) return cmd_train(common, data_path, out);
    if (*predict) return cmd_predict(model_path, rows, input, predict_out, out);
    if (*eval) return cmd_eval(model_path, data_path, eval_out, out);
    if (*curves) {
      const RunConfig cfg = load_run_config(common.config, common.seed);
      curve.out_dir = common.out;
      if (!curve_model.empty()) curve.model = curve_model;
      const auto path = emit_curve(cfg, curve);
      out << fmt::format("curve: {}\n", path.string());
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << " (parameter class: " << e.parameter_class() << ")\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace skylink::cli
