#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include "qspec/smoothing.hpp"

namespace qspec {

/// Scaling in front of the two-sum covariance estimator.
enum class CovariancePrefactor {
  /// ((2 pi / n) / W_n^j)^2: covariance of the normalized estimate G / W_n^j.
  Normalized,
  /// ((2 pi / n) W_n^j)^2, the literal alternative reading.
  Literal,
};

/// Which smoothed ordinates are plugged into the covariance sums.
enum class PlugIn { Normalized, Raw };

struct CovarianceOptions {
  CovariancePrefactor prefactor = CovariancePrefactor::Normalized;
  PlugIn plug_in = PlugIn::Normalized;
};

/// c(tau1, tau2; omega, omega) and c(tau1, tau2; omega, -omega).
struct CovEstimate {
  cplx c_same;
  cplx c_opposite;
};

/// Plug-in covariance c(tau_a, tau_b; omega_j, omega_k) between the normalized
/// estimates at Fourier frequencies omega_j and omega_k:
///   pref * [ sum_s W_n(w_j - w_s) W_n(w_k - w_s) G(a,a;w_s) G(b,b;w_s)
///          + sum_s W_n(w_j - w_s) W_n(w_k + w_s) |G(a,b;w_s)|^2 ],  s = 1..n-1.
/// Throws UsageError when omega_j = 0 mod 2 pi.
cplx cov_estimate(const SmoothedSpectrum& spec, std::size_t a, std::size_t b, std::int64_t j,
                  std::int64_t k, const CovarianceOptions& options = {});

/// Both entries needed for the real/imaginary standard deviations at omega_j.
CovEstimate cov_estimate(const SmoothedSpectrum& spec, std::size_t a, std::size_t b,
                         std::int64_t j, const CovarianceOptions& options = {});

/// sqrt(0 v c_same) on the diagonal, sqrt(0 v (c_same + c_opposite)/2) otherwise (real parts).
double sigma_re(const CovEstimate& cov, bool same_level);
/// 0 on the diagonal, sqrt(0 v (c_same - c_opposite)/2) otherwise (real parts).
double sigma_im(const CovEstimate& cov, bool same_level);

struct CiBand {
  cplx center;
  double alpha;
  double re_low, re_high;
  double im_low, im_high;

  bool contains_re(double x) const noexcept { return re_low <= x && x <= re_high; }
  bool contains_im(double x) const noexcept { return im_low <= x && x <= im_high; }
};

/// center +- sigma * Phi^{-1}(1 - alpha/2), separately for real and imaginary parts.
CiBand ci_band(cplx center, double sigma_re, double sigma_im, double alpha);

/// Pointwise band for the normalized estimate of (tau_a, tau_b) at omega_j.
CiBand confidence_band(const SmoothedSpectrum& spec, std::size_t a, std::size_t b, std::int64_t j,
                       double alpha, const CovarianceOptions& options = {});

}  // namespace qspec
