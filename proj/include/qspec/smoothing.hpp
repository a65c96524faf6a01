#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "qspec/kernel.hpp"
#include "qspec/periodogram.hpp"

namespace qspec {

/// Which ordinates enter the normalizer W_n^j of the estimator at omega_j.
enum class NormalizerConvention {
  /// (2 pi / n) sum over s = 1..n-1, s != j. The smoothing sum itself keeps s = j.
  ExcludeTarget,
  /// (2 pi / n) sum over s = 1..n-1, the same ordinates the smoothing sum uses,
  /// so the effective weights sum to one.
  MatchEstimator,
  /// Both the estimate at omega_j and its normalizer leave out the ordinate
  /// s = j, so the weights again sum to one.
  LeaveOut,
};

/// W_n(2 pi d / n) tabulated for d = 0..n-1.
class WeightTable {
 public:
  WeightTable(SmoothingKernel kernel, double bandwidth, std::size_t n);

  std::size_t n() const noexcept { return weights_.size(); }
  const SmoothingKernel& kernel() const noexcept { return kernel_; }
  double bandwidth() const noexcept { return bandwidth_; }

  /// W_n(2 pi d / n) for any integer d.
  double at_lag(std::int64_t d) const {
    const auto n = static_cast<std::int64_t>(weights_.size());
    d %= n;
    if (d < 0) d += n;
    return weights_[static_cast<std::size_t>(d)];
  }
  /// Lags d in (-n/2, n/2] with nonzero weight, ascending.
  const std::vector<std::int64_t>& support() const noexcept { return support_; }

  /// W_n^j for Fourier index j under the given convention.
  double normalizer(std::int64_t j, NormalizerConvention convention) const;

 private:
  SmoothingKernel kernel_;
  double bandwidth_;
  std::vector<double> weights_;
  std::vector<std::int64_t> support_;
};

/// Smoothed CR-periodogram at an arbitrary frequency:
///   G(tau_a, tau_b; omega) = (2 pi / n) sum_{s=1}^{n-1} W_n(omega - 2 pi s / n) I^{a,b}(2 pi s / n)
/// for every stored pair a <= b (pair_index order). The field must reach every
/// nonzero Fourier frequency through conjugate symmetry.
std::vector<cplx> smooth(const CrField& field, const SmoothingKernel& kernel, double bandwidth,
                         double omega);

/// Normalized estimate G / W_n^j. Throws if W_n^j is zero.
cplx normalize(cplx raw, double normalizer);

/// Smoothed estimates at every nonzero Fourier frequency, for every level pair.
class SmoothedSpectrum {
 public:
  SmoothedSpectrum(const CrField& field, const SmoothingKernel& kernel, double bandwidth,
                   NormalizerConvention convention = NormalizerConvention::MatchEstimator);

  std::size_t n() const noexcept { return n_; }
  const QuantileGrid& grid() const noexcept { return grid_; }
  std::size_t levels() const noexcept { return grid_.size(); }
  const WeightTable& weights() const noexcept { return *weights_; }
  NormalizerConvention convention() const noexcept { return convention_; }

  /// Unnormalized G(tau_a, tau_b; 2 pi s / n), s not divisible by n.
  cplx raw(std::size_t a, std::size_t b, std::int64_t s) const;
  /// G / W_n^s.
  cplx normalized(std::size_t a, std::size_t b, std::int64_t s) const;
  double normalizer(std::int64_t s) const;

 private:
  std::size_t slot(std::int64_t s) const;

  QuantileGrid grid_;
  std::size_t n_;
  std::shared_ptr<const WeightTable> weights_;
  NormalizerConvention convention_;
  std::vector<cplx> raw_;           // [pair][s - 1], s = 1..n-1
  std::vector<double> normalizers_;  // [s - 1]
};

/// Leading bias terms sum_{j=2}^{k} (b^j / j!) m_j f^{(j)}(omega) with m_j the
/// kernel moments and derivatives from central differences with step
/// max(1e-3, b / 10). Throws UsageError at omega = 0 mod 2 pi; use
/// zero_frequency_bias there.
cplx bias_term(const std::function<cplx(double)>& spectrum, const SmoothingKernel& kernel,
               double bandwidth, int k, double omega);

/// Bias at omega = 0 mod 2 pi: n tau1 tau2 / (2 pi).
double zero_frequency_bias(std::size_t n, double tau1, double tau2);

/// Central finite-difference estimate of the j-th derivative of f at x.
cplx central_derivative(const std::function<cplx(double)>& f, int order, double x, double h);

}  // namespace qspec
