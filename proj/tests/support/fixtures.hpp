#pragma once

#include "skylink/environment.hpp"

#include <array>
#include <optional>

namespace skylink::testing {

// Explicitly constructed environments; values mirror common building-statistics
// classes but are test inputs only.
inline Environment suburban() {
  return Environment{"suburban", 0.1, 750.0, 8.0, 0.1, 21.0, std::array<double, 5>{0.99, 0.05, 0.0, 12.0, 3.0},
                     SigmoidParams{4.88, 0.43}};
}

inline Environment urban() {
  return Environment{"urban", 0.3, 500.0, 15.0, 1.0, 20.0, std::array<double, 5>{0.98, 0.02, 0.0, 25.0, 2.5},
                     SigmoidParams{9.61, 0.16}};
}

inline Environment dense_urban() {
  return Environment{"dense-urban", 0.5, 300.0, 20.0, 1.6, 23.0, std::array<double, 5>{0.97, 0.01, 0.0, 35.0, 2.0},
                     SigmoidParams{12.08, 0.11}};
}

inline Environment bare(double alpha, double beta, double gamma) {
  return Environment{"bare", alpha, beta, gamma, 0.0, 0.0, std::nullopt, std::nullopt};
}

}  // namespace skylink::testing
