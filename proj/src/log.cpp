#include "skylink/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <string_view>

namespace skylink {
namespace {

spdlog::level::level_enum level_from_env() {
  const char* raw = std::getenv("SKYLINK_LOG");
  if (raw == nullptr) return spdlog::level::warn;
  const std::string_view value(raw);
  if (value == "error") return spdlog::level::err;
  if (value == "warn") return spdlog::level::warn;
  if (value == "info") return spdlog::level::info;
  if (value == "debug") return spdlog::level::debug;
  return spdlog::level::warn;
}

std::shared_ptr<spdlog::logger> make_logger() {
  auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
  auto log = std::make_shared<spdlog::logger>("skylink", sink);
  log->set_pattern("[skylink] %l: %v");
  log->set_level(level_from_env());
  return log;
}

}  // namespace

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = make_logger();
  return *instance;
}

void reload_log_level() { logger().set_level(level_from_env()); }

}  // namespace skylink
