#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skylink/channel_models.hpp"
#include "skylink/datagen.hpp"
#include "skylink/error.hpp"
#include "skylink/fading.hpp"
#include "skylink/rbf_net.hpp"
#include "skylink/version.hpp"

namespace py = pybind11;
using namespace skylink;

namespace {

channel::ProductMode product_mode(const std::string& name) { return channel::product_mode_from_string(name); }

py::dict report_to_dict(const rbf::TrainReport& report) {
  py::dict d;
  d["epoch_mse"] = report.epoch_mse;
  d["train_rmse"] = report.train_rmse;
  d["validation_rmse"] = report.validation_rmse;
  d["train_rmse_db"] = report.train_rmse_db;
  d["validation_rmse_db"] = report.validation_rmse_db;
  return d;
}

py::dict dataset_columns(const datagen::Dataset& ds) {
  std::vector<std::uint64_t> index;
  std::vector<double> d, h, f, p, plos, rss;
  for (const auto& s : ds.samples) {
    index.push_back(s.index);
    d.push_back(s.distance_m);
    h.push_back(s.altitude_m);
    f.push_back(s.frequency_mhz);
    p.push_back(s.path_loss_db);
    plos.push_back(s.plos);
    rss.push_back(s.rss_dbm);
  }
  py::dict out;
  out["index"] = index;
  out["D_m"] = d;
  out["H_m"] = h;
  out["F_MHz"] = f;
  out["PL_dB"] = p;
  out["PLOS"] = plos;
  out["RSS_dBm"] = rss;
  return out;
}

datagen::GeneratorOptions generator_options(const std::string& path_loss, const std::string& plos,
                                            const std::string& mode) {
  datagen::GeneratorOptions options;
  options.path_loss = datagen::path_loss_model_from_string(path_loss);
  options.plos.model = channel::plos_model_from_string(plos);
  options.plos.product_mode = product_mode(mode);
  return options;
}

}  // namespace

PYBIND11_MODULE(_skylink, m) {
  m.doc() = "UAV air-to-ground channel models, Rician fading and RBF signal-strength prediction.";
  m.attr("__version__") = kVersion;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<Environment>(m, "Environment")
      .def(py::init([](std::string name, double alpha, double beta, double gamma, double eps_los_db,
                       double eps_nlos_db, std::optional<std::array<double, 5>> c,
                       std::optional<std::pair<double, double>> sigmoid) {
             Environment env{std::move(name), alpha, beta, gamma, eps_los_db, eps_nlos_db, c, std::nullopt};
             if (sigmoid) env.sigmoid = SigmoidParams{sigmoid->first, sigmoid->second};
             env.validate();
             return env;
           }),
           py::arg("name"), py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("eps_los_db"),
           py::arg("eps_nlos_db"), py::arg("c") = py::none(), py::arg("sigmoid") = py::none())
      .def_readonly("name", &Environment::name)
      .def_readonly("alpha", &Environment::alpha)
      .def_readonly("beta", &Environment::beta)
      .def_readonly("gamma", &Environment::gamma)
      .def_readonly("eps_los_db", &Environment::eps_los_db)
      .def_readonly("eps_nlos_db", &Environment::eps_nlos_db)
      .def("__repr__", [](const Environment& e) { return "<Environment '" + e.name + "'>"; });

  m.def("load_environments", [](const std::string& path) { return load_environments(path); }, py::arg("path"));

  // channel models
  m.def("slant_distance", [](double h, double r) { return channel::slant_distance({h, r}); }, py::arg("h"),
        py::arg("r"));
  m.def("elevation_angle", [](double h, double r) { return channel::elevation_angle({h, r}); }, py::arg("h"),
        py::arg("r"));
  m.def("hata_correction", [](double f, double hm) { return channel::hata_correction({f, 30.0, hm}); },
        py::arg("f_mhz"), py::arg("h_m"));
  m.def("hata_path_loss", [](double f, double hb, double hm, double d) { return channel::hata_path_loss({f, hb, hm}, d); },
        py::arg("f_mhz"), py::arg("h_b"), py::arg("h_m"), py::arg("d_km"));
  m.def("free_space_path_loss", &channel::free_space_path_loss, py::arg("f_hz"), py::arg("d_m"));
  m.def("a2g_path_loss",
        [](const Environment& env, double fc, double h, double r, bool los) {
          return channel::a2g_path_loss({fc, env}, {h, r}, los ? channel::LinkState::los : channel::LinkState::nlos);
        },
        py::arg("env"), py::arg("f_hz"), py::arg("h"), py::arg("r"), py::arg("los"));
  m.def("plos_product",
        [](const Environment& env, double ht, double hr, double r, const std::string& mode) {
          return channel::plos_product(env, ht, hr, r, product_mode(mode));
        },
        py::arg("env"), py::arg("h_t"), py::arg("h_r"), py::arg("r"), py::arg("mode") = "canonical");
  m.def("plos_holis", &channel::plos_holis, py::arg("env"), py::arg("theta_deg"));
  m.def("plos_sigmoid", py::overload_cast<const Environment&, double>(&channel::plos_sigmoid), py::arg("env"),
        py::arg("theta_deg"));
  m.def("plos_sigmoid_ab", [](double a, double b, double theta) { return channel::plos_sigmoid(SigmoidParams{a, b}, theta); },
        py::arg("a"), py::arg("b"), py::arg("theta_deg"));
  m.def("fit_sigmoid",
        [](const std::vector<double>& theta, const std::vector<double>& plos) {
          if (theta.size() != plos.size()) throw DomainError("theta and plos lengths differ");
          std::vector<channel::AnglePoint> pts;
          for (std::size_t i = 0; i < theta.size(); ++i) pts.push_back({theta[i], plos[i]});
          const auto p = channel::fit_sigmoid(pts);
          return py::make_tuple(p.a, p.b, channel::sigmoid_rmse(p, pts));
        },
        py::arg("theta_deg"), py::arg("plos"));
  m.def("mean_path_loss",
        [](const Environment& env, double fc, double h, double r, const std::string& plos, const std::string& mode,
           double rx_height) {
          channel::PlosSelector sel{channel::plos_model_from_string(plos), product_mode(mode), rx_height};
          return channel::mean_path_loss({fc, env}, {h, r}, sel);
        },
        py::arg("env"), py::arg("f_hz"), py::arg("h"), py::arg("r"), py::arg("plos") = "product",
        py::arg("mode") = "canonical", py::arg("rx_height_m") = 1.5);

  // fading
  m.def("bessel_i0", &fading::bessel_i0, py::arg("x"));
  m.def("rician_pdf", [](double s, double delta, double r) { return fading::rician_pdf({s, delta}, r); },
        py::arg("s"), py::arg("delta"), py::arg("r"));
  m.def("rician_pdf_kdb", &fading::rician_pdf_kdb, py::arg("k_db"), py::arg("s"), py::arg("r"));
  m.def("k_factor", [](double s, double delta) { return fading::k_factor({s, delta}); }, py::arg("s"),
        py::arg("delta"));
  m.def("k_factor_db", [](double s, double delta) { return fading::k_factor_db({s, delta}); }, py::arg("s"),
        py::arg("delta"));
  m.def("sample_rician",
        [](double s, double delta, std::size_t n, std::uint64_t seed) { return fading::sample_rician({s, delta}, n, seed); },
        py::arg("s"), py::arg("delta"), py::arg("n"), py::arg("seed"));

  // rbf network
  py::class_<rbf::RbfConfig>(m, "RbfConfig")
      .def(py::init([](std::size_t hidden, std::size_t input_dim, std::size_t output_dim, double tau_w, double tau_mu,
                       std::optional<double> tau_delta, std::size_t epochs, std::uint64_t seed,
                       const std::string& update_mode) {
             rbf::RbfConfig c;
             c.hidden = hidden;
             c.input_dim = input_dim;
             c.output_dim = output_dim;
             c.tau_w = tau_w;
             c.tau_mu = tau_mu;
             c.tau_delta = tau_delta;
             c.epochs = epochs;
             c.seed = seed;
             c.update_mode = rbf::update_mode_from_string(update_mode);
             c.validate();
             return c;
           }),
           py::arg("hidden") = 20, py::arg("input_dim") = 4, py::arg("output_dim") = 1, py::arg("tau_w") = 0.05,
           py::arg("tau_mu") = 0.01, py::arg("tau_delta") = py::none(), py::arg("epochs") = 2000,
           py::arg("seed") = 1, py::arg("update_mode") = "derived_gradient")
      .def_readwrite("hidden", &rbf::RbfConfig::hidden)
      .def_readwrite("epochs", &rbf::RbfConfig::epochs)
      .def_readwrite("seed", &rbf::RbfConfig::seed);

  py::class_<rbf::RbfNetwork>(m, "RbfNetwork")
      .def_readonly("centers", &rbf::RbfNetwork::centers)
      .def_readonly("spans", &rbf::RbfNetwork::spans)
      .def_readonly("weights", &rbf::RbfNetwork::weights)
      .def("forward", &rbf::forward, py::arg("x"))
      .def("hidden_activations", &rbf::hidden_activations, py::arg("x"))
      .def("predict", &rbf::predict, py::arg("raw_features"))
      .def("to_json", [](const rbf::RbfNetwork& net, const rbf::RbfConfig& cfg) { return rbf::network_to_json(net, cfg).dump(); })
      .def_static("from_json", [](const std::string& text) { return rbf::network_from_json(nlohmann::json::parse(text)); });

  m.def("fit",
        [](const rbf::RbfConfig& cfg, const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
           std::optional<Eigen::MatrixXd> val_features, std::optional<Eigen::MatrixXd> val_targets) {
          rbf::TrainingSet train{features, targets};
          std::optional<rbf::TrainingSet> val;
          if (val_features && val_targets) val = rbf::TrainingSet{*val_features, *val_targets};
          auto result = rbf::fit(cfg, train, val ? &*val : nullptr);
          return py::make_tuple(result.network, report_to_dict(result.report));
        },
        py::arg("config"), py::arg("features"), py::arg("targets"), py::arg("val_features") = py::none(),
        py::arg("val_targets") = py::none());
  m.def("gradient_check", &rbf::gradient_check, py::arg("net"), py::arg("x"), py::arg("d"), py::arg("epsilon") = 1e-6);

  // datasets
  m.def("gen_distance_sweep",
        [](const Environment& env, double altitude, const std::vector<double>& distances, double f_mhz,
           double tx_power, std::uint64_t seed, const std::string& path_loss, const std::string& plos,
           const std::string& mode) {
          datagen::LinkBudget budget;
          budget.tx_power_dbm = tx_power;
          budget.seed = seed;
          return dataset_columns(datagen::gen_distance_sweep(env, altitude, distances, f_mhz, budget,
                                                             generator_options(path_loss, plos, mode)));
        },
        py::arg("env"), py::arg("altitude_m"), py::arg("distances_m"), py::arg("f_mhz") = 2000.0,
        py::arg("tx_power_dbm") = 30.0, py::arg("seed") = 1, py::arg("path_loss") = "a2g_mean",
        py::arg("plos") = "product", py::arg("mode") = "canonical");
  m.def("gen_altitude_waypoints",
        [](const Environment& env, std::optional<std::vector<double>> altitudes, double r_ground, double f_mhz,
           double tx_power, std::uint64_t seed, const std::string& path_loss, const std::string& plos,
           const std::string& mode) {
          datagen::LinkBudget budget;
          budget.tx_power_dbm = tx_power;
          budget.seed = seed;
          const auto alts = altitudes.value_or(datagen::default_waypoint_altitudes());
          return dataset_columns(datagen::gen_altitude_waypoints(env, alts, r_ground, f_mhz, budget,
                                                                 generator_options(path_loss, plos, mode)));
        },
        py::arg("env"), py::arg("altitudes_m") = py::none(), py::arg("ground_distance_m") = 500.0,
        py::arg("f_mhz") = 2000.0, py::arg("tx_power_dbm") = 30.0, py::arg("seed") = 1,
        py::arg("path_loss") = "a2g_mean", py::arg("plos") = "product", py::arg("mode") = "canonical");
}
