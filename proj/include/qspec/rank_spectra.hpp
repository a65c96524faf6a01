#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "qspec/kernel.hpp"
#include "qspec/periodogram.hpp"
#include "qspec/ranks.hpp"
#include "qspec/smoothing.hpp"

namespace qspec {

/// A finite measure on [0,1]^2 built from point masses and three continuous
/// components: mass spread uniformly over the square, along the diagonal
/// {(u,u)} and along the anti-diagonal {(u,1-u)}.
struct DependenceMeasure {
  struct Atom {
    double u, v, mass;
  };
  std::vector<Atom> atoms;
  double uniform = 0.0;
  double diagonal = 0.0;
  double anti_diagonal = 0.0;

  /// 12 x uniform on the square.
  static DependenceMeasure spearman();
  /// Mass 4 at (1/2, 1/2).
  static DependenceMeasure blomqvist();
  /// Mass 4 on the diagonal and mass 4 on the anti-diagonal.
  static DependenceMeasure gini();
  static DependenceMeasure atom(double u, double v, double mass);

  /// Parses lines "atom u v mass", "uniform mass", "diag mass", "antidiag mass".
  /// Blank lines and lines starting with '#' are ignored.
  static DependenceMeasure parse(std::istream& in);

  void validate() const;
  double total_mass() const;
};

enum class RankCoefficient { Spearman, Blomqvist, Gini };

/// rho_n^k = (12 / n^3) sum_{t=0}^{n-|k|-1} (R_t - (n+1)/2)(R_{t+|k|} - (n+1)/2).
double spearman_rho_hat(const RankedSeries& series, std::int64_t k);

/// beta_n^k = (1/(n-|k|)) sum_{t=0}^{n-|k|-1} (4 I{R_t <= n/2, R_{t+|k|} <= n/2} - 1).
double blomqvist_beta_hat(const RankedSeries& series, std::int64_t k);

/// Gamma_n^k = (2 / (n (n-|k|))) sum_{t=0}^{n-|k|-1} (|R_t + R_{t+|k|} - n| - |R_t - R_{t+|k|}|).
double gini_gamma_hat(const RankedSeries& series, std::int64_t k);

/// Coefficients for lags 0..max_lag.
std::vector<double> rank_autocorrelation(const RankedSeries& series, RankCoefficient kind,
                                         std::int64_t max_lag);

/// I_{n,rho}(omega_j) = (12 / (2 pi n)) |d_rho(omega_j)|^2 with
/// d_rho = (1/n) sum_t R_t e^{-i omega_j t}. Valid for Fourier indices
/// j = 1..n-1; throws UsageError otherwise.
cplx spearman_periodogram(const RankedSeries& series, std::int64_t j);
/// The same for every j = 1..n-1 (index j-1) via one FFT.
std::vector<cplx> spearman_periodogram_all(const RankedSeries& series);

/// I_{n,mu}(omega_j) = \int I^{u,v}_{n,R}(omega_j) d mu(u, v), evaluated exactly
/// component by component, for j = 1..n-1.
cplx measure_periodogram(const RankedSeries& series, const DependenceMeasure& mu, std::int64_t j);
/// I_{n,mu} at every j = 1..n-1 (index j-1).
std::vector<cplx> measure_periodogram_all(const RankedSeries& series, const DependenceMeasure& mu);

struct MeasureSpectrumOptions {
  /// Midpoint-grid resolution for the continuous components of mu in the
  /// plug-in variance.
  std::size_t variance_grid = 64;
  NormalizerConvention normalizer = NormalizerConvention::MatchEstimator;
  bool compute_variance = true;
};

struct MeasureSpectrumPoint {
  double omega;
  cplx raw;                         ///< G_{n,mu}(omega)
  std::optional<cplx> normalized;   ///< G_{n,mu}(omega_j) / W_n^j when omega is a Fourier frequency
  std::optional<double> variance;   ///< plug-in sigma^2_mu (asymptotic variance of sqrt(n b) G)
};

/// Smoothed measure spectrum G_{n,mu}(omega) = (2 pi/n) sum_{s=1}^{n-1} W_n(omega - w_s) I_{n,mu}(w_s)
/// plus the plug-in asymptotic variance sigma^2_mu, with copula spectra
/// replaced by normalized smoothed CR-periodograms.
MeasureSpectrumPoint smoothed_measure_spectrum(const RankedSeries& series,
                                               const DependenceMeasure& mu,
                                               const SmoothingKernel& kernel, double bandwidth,
                                               double omega,
                                               const MeasureSpectrumOptions& options = {});

/// Batched version for many target frequencies sharing one set of transforms.
std::vector<MeasureSpectrumPoint> smoothed_measure_spectrum(
    const RankedSeries& series, const DependenceMeasure& mu, const SmoothingKernel& kernel,
    double bandwidth, const std::vector<double>& omegas, const MeasureSpectrumOptions& options = {});

/// How the Spearman target spectrum is scaled.
enum class SpearmanScale {
  /// (1/2 pi) sum_k e^{-i omega k} rho_k, the quantity G_{n,rho} estimates.
  Consistent,
  /// (1/2 pi)(1/12) sum_k e^{-i omega k} rho_k.
  WithTwelfth,
};
double spearman_scale_factor(SpearmanScale scale);

/// f_mu for serially independent data: (1/2 pi) \int (min(u,v) - uv) d mu.
double white_noise_measure_spectrum(const DependenceMeasure& mu);

}  // namespace qspec
