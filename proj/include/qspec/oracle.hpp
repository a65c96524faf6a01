#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qspec/periodogram.hpp"
#include "qspec/ranks.hpp"
#include "qspec/simulate.hpp"

namespace qspec {

/// (min(tau1, tau2) - tau1 tau2) / (2 pi): the copula spectrum of an iid sequence.
double white_noise_spectrum(double tau1, double tau2);

/// Direct O(n^2) evaluation of I^{tau1,tau2}(omega): ranks by pairwise
/// counting, levels through a brute-force rational search, and explicit
/// cos/sin sums. Intended for tests.
cplx naive_cr_periodogram(std::span<const double> values, double tau1, double tau2, double omega);

enum class TruthProvenance { AnalyticWhiteNoise, LagWindowMC };

struct TruthConfig {
  std::size_t calibration_length = 10'000'000;
  std::size_t path_length = 1'000'000;
  std::size_t batches = 20;
  std::size_t max_lag = 300;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 20240601;
  std::size_t threads = 1;
  /// Escalate the truncation warning to an error.
  bool strict = false;
};

/// Copula spectra f(tau_a, tau_b; omega) = (1/2 pi) sum_{|k| <= K} gamma_k e^{-i omega k}
/// with gamma_k = Cov(I{U_t <= tau_a}, I{U_{t-k} <= tau_b}).
class TruthSpectrum {
 public:
  /// lag_cov[b][pair_index(a, c, L) * (2K + 1) + (k + K)], one block per batch.
  TruthSpectrum(TruthProvenance provenance, QuantileGrid grid, std::size_t max_lag,
                std::vector<std::vector<double>> lag_cov, std::vector<double> quantiles = {});

  TruthProvenance provenance() const noexcept { return provenance_; }
  const QuantileGrid& grid() const noexcept { return grid_; }
  std::size_t max_lag() const noexcept { return max_lag_; }
  std::size_t batches() const noexcept { return lag_cov_.size(); }
  /// Calibrated marginal quantiles q_tau (empty for the analytic case).
  const std::vector<double>& quantiles() const noexcept { return quantiles_; }

  /// Batch-averaged lag covariance gamma_k(a, b), |k| <= max_lag.
  double gamma(std::size_t a, std::size_t b, std::int64_t k) const;

  cplx value(std::size_t a, std::size_t b, double omega) const;
  /// Standard errors of the real and imaginary parts from the batch spread;
  /// nullopt for analytic truth.
  std::optional<std::pair<double, double>> standard_error(std::size_t a, std::size_t b,
                                                          double omega) const;

  /// Pairs (a, b) and lags +-K where |gamma_K| exceeds 3 standard errors.
  std::vector<std::string> truncation_warnings() const;

  const std::vector<std::vector<double>>& lag_covariances() const noexcept { return lag_cov_; }

 private:
  cplx batch_value(std::size_t batch, std::size_t a, std::size_t b, double omega) const;
  double raw_gamma(std::size_t batch, std::size_t a, std::size_t b, std::int64_t k) const;

  TruthProvenance provenance_;
  QuantileGrid grid_;
  std::size_t max_lag_;
  std::vector<std::vector<double>> lag_cov_;
  std::vector<double> quantiles_;
};

TruthSpectrum analytic_white_noise_truth(const QuantileGrid& grid);

/// Lag-window Monte Carlo truth: quantiles from one calibration path, lag
/// covariances from independent batch paths. Warnings go to `warn`; with
/// config.strict a truncation warning throws DataError instead.
TruthSpectrum mc_truth_spectrum(Model model, const QuantileGrid& grid, const TruthConfig& config,
                                const std::function<void(const std::string&)>& warn = {});

/// mc_truth_spectrum with a CSV cache in `dir` keyed by model, grid, config and
/// stream version. Pass an empty dir to disable caching.
TruthSpectrum cached_truth_spectrum(Model model, const QuantileGrid& grid, const TruthConfig& config,
                                    const std::filesystem::path& dir,
                                    const std::function<void(const std::string&)>& warn = {});

/// Default cache directory: $QSPEC_CACHE_DIR, else $XDG_CACHE_HOME/qspec, else ~/.cache/qspec.
std::filesystem::path default_cache_dir();

void write_truth_csv(std::ostream& out, const TruthSpectrum& truth, Model model,
                     const TruthConfig& config);
TruthSpectrum read_truth_csv(std::istream& in);

/// Classical spectrum of the standardized process,
/// (1/2 pi) sum_{|k| <= K} rho_k e^{-i omega k}, from one simulated path.
struct L2Spectrum {
  std::vector<double> autocorrelation;  // rho_0..rho_K
  double value(double omega) const;
};
L2Spectrum l2_spectrum(Model model, std::size_t path_length, std::size_t max_lag,
                       std::uint64_t seed);

}  // namespace qspec
