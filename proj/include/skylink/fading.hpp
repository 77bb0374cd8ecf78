#pragma once

#include <cstdint>
#include <vector>

// Rician small-scale fading: densities, K-factor conversions and sampling.
namespace skylink::fading {

/// Modified Bessel function of the first kind, order zero.
double bessel_i0(double x);

/// log(I0(x)), finite for every finite x.
double log_bessel_i0(double x);

/// LoS amplitude `los_amplitude` (s) and per-quadrature scatter deviation
/// `scatter_sigma` (delta). K = s^2 / (2 delta^2).
struct RicianParams {
  double los_amplitude = 0.0;
  double scatter_sigma = 1.0;

  void validate() const;

  /// Parameters with linear factor `k` and mean power s^2 + 2 delta^2 equal to
  /// `mean_power`.
  static RicianParams from_k_factor(double k, double mean_power = 1.0);
};

double rician_pdf(const RicianParams& params, double r);

double k_factor(const RicianParams& params);

/// 10 log10(K); -infinity when K = 0 (Rayleigh).
double k_factor_db(const RicianParams& params);
bool is_rayleigh(const RicianParams& params);
double k_factor_from_db(double k_db);

/// Density with the scatter term expressed through K (dB) and s, i.e.
/// delta^2 = s^2 / (2 * 10^(k_db / 10)).
double rician_pdf_kdb(double k_db, double s, double r);

/// n independent amplitudes sqrt((s + delta g1)^2 + (delta g2)^2) drawn from a
/// generator seeded with `seed`.
std::vector<double> sample_rician(const RicianParams& params, std::size_t n, std::uint64_t seed);

}  // namespace skylink::fading
