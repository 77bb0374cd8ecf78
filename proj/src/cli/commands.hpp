#pragma once

#include "run_config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace skylink::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline const std::vector<std::string> kCurveNames = {"rician", "plos_angle", "plos_fit", "rss_distance",
                                                     "rss_altitude"};

struct CurveRequest {
  std::string which;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> model;
  bool k_in_db = false;
};

/// Writes `curve_<which>.csv` into the output directory and returns its path.
std::filesystem::path emit_curve(const RunConfig& cfg, const CurveRequest& request);

/// Builds the dataset described by the scenario block; `type` overrides the
/// configured scenario type when non-empty.
datagen::Dataset build_dataset(const RunConfig& cfg, const std::string& type = {});

}  // namespace skylink::cli
