#include "qspec/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qspec/error.hpp"

namespace qspec {

using std::numbers::pi;

WeightTable::WeightTable(SmoothingKernel kernel, double bandwidth, std::size_t n)
    : kernel_(std::move(kernel)), bandwidth_(bandwidth), weights_(n) {
  if (n < 2) throw UsageError("weight table: n must be >= 2");
  if (!(bandwidth > 0.0 && bandwidth <= pi))
    throw UsageError("weight table: bandwidth must lie in (0, pi]");
  const auto nn = static_cast<std::int64_t>(n);
  for (std::int64_t d = 0; d < nn; ++d) {
    const std::int64_t centered = d <= nn / 2 ? d : d - nn;
    weights_[d] = periodized_weight(kernel_, bandwidth_, fourier_frequency(centered, n));
  }
  for (std::int64_t d = -(nn - 1) / 2; d <= nn / 2; ++d) {
    if (at_lag(d) != 0.0) support_.push_back(d);
  }
}

double WeightTable::normalizer(std::int64_t j, NormalizerConvention convention) const {
  const auto n = static_cast<std::int64_t>(weights_.size());
  double sum = 0.0;
  for (const auto d : support_) {
    if ((j - d) % n == 0) continue;  // s = 0 is never part of the sum
    if (d == 0 && convention != NormalizerConvention::MatchEstimator) continue;
    sum += at_lag(d);
  }
  return 2.0 * pi / static_cast<double>(n) * sum;
}

std::vector<cplx> smooth(const CrField& field, const SmoothingKernel& kernel, double bandwidth,
                         double omega) {
  if (!field.covers_all_fourier())
    throw UsageError("smooth: the field does not cover every nonzero Fourier frequency");
  if (!(bandwidth > 0.0 && bandwidth <= pi))
    throw UsageError("smooth: bandwidth must lie in (0, pi]");
  const std::size_t n = field.n();
  const std::size_t m = field.levels();
  const double target = std::remainder(omega, 2.0 * pi);
  std::vector<cplx> out(pair_count(m), cplx{});
  for (std::int64_t s = 1; s < static_cast<std::int64_t>(n); ++s) {
    const double w = periodized_weight(kernel, bandwidth, target - fourier_frequency(s, n));
    if (w == 0.0) continue;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) out[pair_index(a, b, m)] += w * field.at_fourier(a, b, s);
  }
  const double scale = 2.0 * pi / static_cast<double>(n);
  for (auto& v : out) v *= scale;
  return out;
}

cplx normalize(cplx raw, double normalizer) {
  if (normalizer == 0.0) throw UsageError("normalize: W_n^j is zero (bandwidth below 2 pi / n?)");
  return raw / normalizer;
}

SmoothedSpectrum::SmoothedSpectrum(const CrField& field, const SmoothingKernel& kernel,
                                   double bandwidth, NormalizerConvention convention)
    : grid_(field.grid()),
      n_(field.n()),
      weights_(std::make_shared<const WeightTable>(kernel, bandwidth, field.n())),
      convention_(convention) {
  if (!field.covers_all_fourier())
    throw UsageError("smoothed spectrum: the field does not cover every nonzero Fourier frequency");
  const auto n = static_cast<std::int64_t>(n_);
  const std::size_t m = grid_.size();
  const std::size_t per_pair = n_ - 1;
  raw_.assign(pair_count(m) * per_pair, cplx{});
  normalizers_.resize(per_pair);

  const double scale = 2.0 * pi / static_cast<double>(n_);
  const auto& support = weights_->support();

  // Lags in descending order visit the ordinates s - d in ascending order
  // (modulo wrap-around), which fixes the summation order.
  std::vector<std::int64_t> lags(support.rbegin(), support.rend());
  if (convention_ == NormalizerConvention::LeaveOut) std::erase(lags, 0);
  std::vector<cplx> ordinates(n_);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      for (std::int64_t s = 1; s < n; ++s) ordinates[s] = field.at_fourier(a, b, s);
      cplx* out = raw_.data() + pair_index(a, b, m) * per_pair;
      for (std::int64_t s = 1; s <= n / 2; ++s) {
        cplx acc{};
        for (const auto d : lags) {
          std::int64_t src = (s - d) % n;
          if (src < 0) src += n;
          if (src == 0) continue;
          acc += weights_->at_lag(d) * ordinates[src];
        }
        out[s - 1] = acc * scale;
      }
      for (std::int64_t s = n / 2 + 1; s < n; ++s) out[s - 1] = std::conj(out[n - s - 1]);
    }
  }
  for (std::int64_t s = 1; s < n; ++s) normalizers_[s - 1] = weights_->normalizer(s, convention_);
}

std::size_t SmoothedSpectrum::slot(std::int64_t s) const {
  const auto n = static_cast<std::int64_t>(n_);
  s %= n;
  if (s < 0) s += n;
  if (s == 0) throw UsageError("smoothed spectrum: frequency 0 is not estimated");
  return static_cast<std::size_t>(s - 1);
}

cplx SmoothedSpectrum::raw(std::size_t a, std::size_t b, std::int64_t s) const {
  const cplx v = raw_[pair_index(a, b, levels()) * (n_ - 1) + slot(s)];
  return a <= b ? v : std::conj(v);
}

cplx SmoothedSpectrum::normalized(std::size_t a, std::size_t b, std::int64_t s) const {
  return normalize(raw(a, b, s), normalizers_[slot(s)]);
}

double SmoothedSpectrum::normalizer(std::int64_t s) const { return normalizers_[slot(s)]; }

cplx central_derivative(const std::function<cplx(double)>& f, int order, double x, double h) {
  if (order < 0) throw UsageError("derivative order must be >= 0");
  cplx acc{};
  double binom = 1.0;
  for (int i = 0; i <= order; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binom * f(x + (0.5 * order - i) * h);
    binom = binom * (order - i) / (i + 1);
  }
  return acc / std::pow(h, order);
}

cplx bias_term(const std::function<cplx(double)>& spectrum, const SmoothingKernel& kernel,
               double bandwidth, int k, double omega) {
  if (std::remainder(omega, 2.0 * pi) == 0.0)
    throw UsageError("bias_term: omega = 0 mod 2 pi, use zero_frequency_bias");
  const double h = std::max(1e-3, bandwidth / 10.0);
  cplx total{};
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) {
    factorial *= j;
    const double mj = kernel.moment(j);
    if (mj == 0.0) continue;
    total += std::pow(bandwidth, j) / factorial * mj * central_derivative(spectrum, j, omega, h);
  }
  return total;
}

double zero_frequency_bias(std::size_t n, double tau1, double tau2) {
  return static_cast<double>(n) * tau1 * tau2 / (2.0 * pi);
}

}  // namespace qspec
