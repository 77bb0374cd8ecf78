#pragma once

#include <spdlog/logger.h>

#include <memory>

namespace skylink {

/// Library-wide diagnostic logger. Writes to stderr; the level is taken from
/// SKYLINK_LOG (error, warn, info, debug) on first use, default warn.
spdlog::logger& logger();

/// Re-reads SKYLINK_LOG and applies it to the logger.
void reload_log_level();

}  // namespace skylink
