#include "skylink/fading.hpp"

#include "skylink/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace skylink::fading {
namespace {

constexpr double kAsymptoticThreshold = 15.0;

// Power series sum_k (x^2/4)^k / (k!)^2.
double i0_series(double x) {
  const double quarter_sq = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= quarter_sq / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

// I0(x) e^{-x} sqrt(2 pi x) for large x:
// 1 + sum_k ((2k-1)!!)^2 / (k! (8x)^k), truncated at its smallest term.
double i0_asymptotic_correction(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (static_cast<double>(k) * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

double bessel_i0(double x) {
  const double ax = std::abs(x);
  if (ax <= kAsymptoticThreshold) return i0_series(ax);
  return std::exp(ax) / std::sqrt(2.0 * std::numbers::pi * ax) * i0_asymptotic_correction(ax);
}

double log_bessel_i0(double x) {
  const double ax = std::abs(x);
  if (ax <= kAsymptoticThreshold) return std::log(i0_series(ax));
  return ax - 0.5 * std::log(2.0 * std::numbers::pi * ax) + std::log(i0_asymptotic_correction(ax));
}

void RicianParams::validate() const {
  if (!(scatter_sigma > 0.0) || !std::isfinite(scatter_sigma)) {
    throw DomainError(fmt::format("Rician scatter sigma must be positive (got {})", scatter_sigma));
  }
  if (!(los_amplitude >= 0.0) || !std::isfinite(los_amplitude)) {
    throw DomainError(fmt::format("Rician LoS amplitude must be non-negative (got {})", los_amplitude));
  }
}

RicianParams RicianParams::from_k_factor(double k, double mean_power) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError(fmt::format("K factor must be non-negative (got {})", k));
  if (!(mean_power > 0.0)) throw DomainError("mean power must be positive");
  // s^2 = K/(K+1) P, 2 delta^2 = P/(K+1)
  return RicianParams{std::sqrt(k / (k + 1.0) * mean_power), std::sqrt(mean_power / (2.0 * (k + 1.0)))};
}

double rician_pdf(const RicianParams& params, double r) {
  params.validate();
  if (!(r >= 0.0)) throw DomainError(fmt::format("Rician amplitude must be non-negative (got {})", r));
  if (r == 0.0) return 0.0;
  if (std::isinf(r)) return 0.0;
  const double var = params.scatter_sigma * params.scatter_sigma;
  const double s = params.los_amplitude;
  const double log_density =
      std::log(r / var) - (r * r + s * s) / (2.0 * var) + log_bessel_i0(r * s / var);
  return std::exp(log_density);
}

double k_factor(const RicianParams& params) {
  params.validate();
  return params.los_amplitude * params.los_amplitude / (2.0 * params.scatter_sigma * params.scatter_sigma);
}

double k_factor_db(const RicianParams& params) {
  const double k = k_factor(params);
  if (k == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(k);
}

bool is_rayleigh(const RicianParams& params) { return k_factor(params) == 0.0; }

double k_factor_from_db(double k_db) { return std::pow(10.0, k_db / 10.0); }

double rician_pdf_kdb(double k_db, double s, double r) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError(fmt::format("LoS amplitude must be positive (got {})", s));
  if (!std::isfinite(k_db)) throw DomainError("K (dB) must be finite");
  if (!(r >= 0.0)) throw DomainError(fmt::format("Rician amplitude must be non-negative (got {})", r));
  if (r == 0.0 || std::isinf(r)) return 0.0;
  const double k = k_factor_from_db(k_db);
  const double scale = 2.0 * k / (s * s);  // 1 / delta^2
  const double log_density =
      std::log(r * scale) - k * (r * r + s * s) / (s * s) + log_bessel_i0(2.0 * r * k / s);
  return std::exp(log_density);
}

std::vector<double> sample_rician(const RicianParams& params, std::size_t n, std::uint64_t seed) {
  params.validate();
  if (n == 0) throw DomainError("sample count must be at least 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double in_phase = params.los_amplitude + params.scatter_sigma * normal(gen);
    const double quadrature = params.scatter_sigma * normal(gen);
    out.push_back(std::hypot(in_phase, quadrature));
  }
  return out;
}

}  // namespace skylink::fading
