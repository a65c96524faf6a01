#include "qspec/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qspec/error.hpp"
#include "qspec/normal.hpp"

namespace qspec {

using std::numbers::pi;

namespace {

cplx plug(const SmoothedSpectrum& spec, std::size_t a, std::size_t b, std::int64_t s, PlugIn mode) {
  return mode == PlugIn::Normalized ? spec.normalized(a, b, s) : spec.raw(a, b, s);
}

}  // namespace

cplx cov_estimate(const SmoothedSpectrum& spec, std::size_t a, std::size_t b, std::int64_t j,
                  std::int64_t k, const CovarianceOptions& options) {
  const auto n = static_cast<std::int64_t>(spec.n());
  if (j % n == 0) throw UsageError("cov_estimate: omega = 0 mod 2 pi is excluded");
  const WeightTable& w = spec.weights();

  const double wj = spec.normalizer(j);
  const double step = 2.0 * pi / static_cast<double>(n);
  double pref = 0.0;
  if (options.prefactor == CovariancePrefactor::Normalized) {
    if (wj == 0.0) throw UsageError("cov_estimate: W_n^j is zero");
    pref = (step / wj) * (step / wj);
  } else {
    pref = (step * wj) * (step * wj);
  }

  // Only ordinates inside the support of W_n(w_j - .) contribute.
  cplx direct{};
  cplx crossed{};
  for (auto it = w.support().rbegin(); it != w.support().rend(); ++it) {
    std::int64_t s = (j - *it) % n;
    if (s < 0) s += n;
    if (s == 0) continue;
    const double wa = w.at_lag(j - s);
    const double wb = w.at_lag(k - s);
    const double wc = w.at_lag(k + s);
    if (wb != 0.0) {
      direct += wa * wb * (plug(spec, a, a, s, options.plug_in) * plug(spec, b, b, s, options.plug_in));
    }
    if (wc != 0.0) crossed += wa * wc * std::norm(plug(spec, a, b, s, options.plug_in));
  }
  return pref * (direct + crossed);
}

CovEstimate cov_estimate(const SmoothedSpectrum& spec, std::size_t a, std::size_t b, std::int64_t j,
                         const CovarianceOptions& options) {
  return {cov_estimate(spec, a, b, j, j, options), cov_estimate(spec, a, b, j, -j, options)};
}

double sigma_re(const CovEstimate& cov, bool same_level) {
  const double v = same_level ? cov.c_same.real() : 0.5 * (cov.c_same.real() + cov.c_opposite.real());
  return std::sqrt(std::max(0.0, v));
}

double sigma_im(const CovEstimate& cov, bool same_level) {
  if (same_level) return 0.0;
  const double v = 0.5 * (cov.c_same.real() - cov.c_opposite.real());
  return std::sqrt(std::max(0.0, v));
}

CiBand ci_band(cplx center, double s_re, double s_im, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("ci_band: alpha must lie in (0, 1)");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  CiBand band;
  band.center = center;
  band.alpha = alpha;
  band.re_low = center.real() - s_re * z;
  band.re_high = center.real() + s_re * z;
  band.im_low = center.imag() - s_im * z;
  band.im_high = center.imag() + s_im * z;
  return band;
}

CiBand confidence_band(const SmoothedSpectrum& spec, std::size_t a, std::size_t b, std::int64_t j,
                       double alpha, const CovarianceOptions& options) {
  const CovEstimate cov = cov_estimate(spec, a, b, j, options);
  const bool same = a == b;
  return ci_band(spec.normalized(a, b, j), sigma_re(cov, same), sigma_im(cov, same), alpha);
}

}  // namespace qspec
