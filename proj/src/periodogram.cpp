#include "qspec/periodogram.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qspec/error.hpp"
#include "qspec/fft.hpp"

namespace qspec {

using std::numbers::pi;

FrequencyGrid::FrequencyGrid(std::size_t n, std::vector<std::int64_t> indices)
    : n_(n), indices_(std::move(indices)), lookup_(n, -1) {
  if (n < 2) throw UsageError("frequency grid: n must be >= 2");
  for (std::size_t f = 0; f < indices_.size(); ++f) {
    const auto j = indices_[f];
    if (j < 0 || j >= static_cast<std::int64_t>(n))
      throw UsageError("frequency grid: index " + std::to_string(j) + " outside [0, n)");
    if (lookup_[j] >= 0) throw UsageError("frequency grid: duplicate index " + std::to_string(j));
    lookup_[j] = static_cast<std::int64_t>(f);
  }
}

FrequencyGrid FrequencyGrid::positive_half(std::size_t n) {
  std::vector<std::int64_t> idx;
  for (std::int64_t j = 1; j <= static_cast<std::int64_t>((n - 1) / 2); ++j) idx.push_back(j);
  return FrequencyGrid(n, std::move(idx));
}

FrequencyGrid FrequencyGrid::smoothing_support(std::size_t n) {
  std::vector<std::int64_t> idx;
  for (std::int64_t j = 1; j <= static_cast<std::int64_t>(n / 2); ++j) idx.push_back(j);
  return FrequencyGrid(n, std::move(idx));
}

FrequencyGrid FrequencyGrid::full(std::size_t n) {
  std::vector<std::int64_t> idx(n);
  for (std::size_t j = 0; j < n; ++j) idx[j] = static_cast<std::int64_t>(j);
  return FrequencyGrid(n, std::move(idx));
}

double FrequencyGrid::omega(std::size_t f) const { return fourier_frequency(indices_[f], n_); }

std::optional<std::size_t> FrequencyGrid::position(std::int64_t j) const {
  if (j < 0 || j >= static_cast<std::int64_t>(n_) || lookup_[j] < 0) return std::nullopt;
  return static_cast<std::size_t>(lookup_[j]);
}

double fourier_frequency(std::int64_t j, std::size_t n) {
  return 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
}

std::int64_t nearest_fourier_index(double omega, std::size_t n) {
  const double r = std::remainder(omega, 2.0 * pi);
  auto j = static_cast<std::int64_t>(std::llround(r * static_cast<double>(n) / (2.0 * pi)));
  const auto nn = static_cast<std::int64_t>(n);
  j %= nn;
  if (j < 0) j += nn;
  return j;
}

ClippedDft::ClippedDft(QuantileGrid grid, FrequencyGrid freq, std::vector<cplx> coeffs)
    : grid_(std::move(grid)), freq_(std::move(freq)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size() * freq_.size())
    throw UsageError("clipped dft: coefficient count does not match levels x frequencies");
}

ClippedDft clipped_dft(const IndicatorMatrix& ind, const FrequencyGrid& freq) {
  const std::size_t n = ind.n();
  if (freq.n() != n)
    throw UsageError("clipped_dft: frequency grid built for n=" + std::to_string(freq.n()) +
                     " but series has n=" + std::to_string(n));
  const std::size_t m = ind.levels();
  const std::size_t nf = freq.size();
  std::vector<cplx> coeffs(m * nf);
  std::vector<double> row(n);
  std::vector<cplx> spectrum(n / 2 + 1);
  for (std::size_t k = 0; k < m; ++k) {
    const auto bits = ind.row(k);
    for (std::size_t t = 0; t < n; ++t) row[t] = bits[t];
    fft::forward_real(row, spectrum);
    spectrum[0] = cplx(spectrum[0].real(), 0.0);
    for (std::size_t f = 0; f < nf; ++f) {
      const auto j = static_cast<std::size_t>(freq.index(f));
      coeffs[k * nf + f] = j <= n / 2 ? spectrum[j] : std::conj(spectrum[n - j]);
    }
  }
  return ClippedDft(ind.grid(), freq, std::move(coeffs));
}

cplx cr_periodogram(const ClippedDft& dft, std::size_t level1, std::size_t level2, std::size_t f) {
  const double scale = 1.0 / (2.0 * pi * static_cast<double>(dft.n()));
  const cplx d1 = dft(level1, f);
  if (level1 == level2) return {std::norm(d1) * scale, 0.0};
  return d1 * std::conj(dft(level2, f)) * scale;
}

CrField::CrField(QuantileGrid grid, FrequencyGrid freq, std::vector<cplx> upper)
    : grid_(std::move(grid)), freq_(std::move(freq)), upper_(std::move(upper)) {
  if (upper_.size() != pair_count(grid_.size()) * freq_.size())
    throw UsageError("cr field: value count does not match pairs x frequencies");
}

cplx CrField::at(std::size_t a, std::size_t b, std::size_t f) const {
  const cplx v = upper_[pair_index(a, b, levels()) * freq_.size() + f];
  return a <= b ? v : std::conj(v);
}

cplx CrField::at_fourier(std::size_t a, std::size_t b, std::int64_t s) const {
  const auto n = static_cast<std::int64_t>(this->n());
  s %= n;
  if (s < 0) s += n;
  if (auto f = freq_.position(s)) return at(a, b, *f);
  if (auto f = freq_.position(n - s)) return std::conj(at(a, b, *f));
  throw UsageError("cr field: Fourier index " + std::to_string(s) +
                   " not available from the stored grid");
}

bool CrField::covers_all_fourier() const {
  const auto n = static_cast<std::int64_t>(this->n());
  for (std::int64_t s = 1; s < n; ++s) {
    if (!freq_.position(s) && !freq_.position(n - s)) return false;
  }
  return true;
}

std::span<const cplx> CrField::pair_values(std::size_t a, std::size_t b) const {
  if (a > b) throw UsageError("cr field: pair_values expects a <= b");
  return {upper_.data() + pair_index(a, b, levels()) * freq_.size(), freq_.size()};
}

CrField cr_field(const ClippedDft& dft, std::size_t element_budget) {
  const std::size_t m = dft.grid().size();
  const std::size_t nf = dft.frequencies().size();
  const std::size_t total = pair_count(m) * nf;
  if (total > element_budget)
    throw UsageError("cr_field: " + std::to_string(total) + " complex entries exceed the budget of " +
                     std::to_string(element_budget));
  std::vector<cplx> upper(total);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      cplx* out = upper.data() + pair_index(a, b, m) * nf;
      for (std::size_t f = 0; f < nf; ++f) out[f] = cr_periodogram(dft, a, b, f);
    }
  }
  return CrField(dft.grid(), dft.frequencies(), std::move(upper));
}

CrField cr_field(const IndicatorMatrix& ind, const FrequencyGrid& freq, std::size_t element_budget) {
  const std::size_t total = pair_count(ind.levels()) * freq.size();
  if (total > element_budget)
    throw UsageError("cr_field: " + std::to_string(total) + " complex entries exceed the budget of " +
                     std::to_string(element_budget));
  return cr_field(clipped_dft(ind, freq), element_budget);
}

}  // namespace qspec
