#pragma once

namespace skylink {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace skylink
