#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qspec/ranks.hpp"

namespace qspec {

using cplx = std::complex<double>;

/// Fourier frequencies omega_j = 2 pi j / n for a set of indices j in [0, n).
class FrequencyGrid {
 public:
  FrequencyGrid(std::size_t n, std::vector<std::int64_t> indices);

  /// j = 1..floor((n-1)/2), the positive half of the Fourier grid.
  static FrequencyGrid positive_half(std::size_t n);
  /// j = 1..floor(n/2). Together with conjugate symmetry this covers every
  /// nonzero Fourier frequency, which is what smoothing needs.
  static FrequencyGrid smoothing_support(std::size_t n);
  /// j = 0..n-1.
  static FrequencyGrid full(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return indices_.size(); }
  std::int64_t index(std::size_t f) const { return indices_[f]; }
  const std::vector<std::int64_t>& indices() const noexcept { return indices_; }
  double omega(std::size_t f) const;
  /// Position of Fourier index j in this grid, if present.
  std::optional<std::size_t> position(std::int64_t j) const;

 private:
  std::size_t n_;
  std::vector<std::int64_t> indices_;
  std::vector<std::int64_t> lookup_;  // j -> position, -1 if absent
};

/// omega_j = 2 pi j / n.
double fourier_frequency(std::int64_t j, std::size_t n);

/// Index j in [0, n) whose Fourier frequency is nearest to omega (mod 2 pi).
std::int64_t nearest_fourier_index(double omega, std::size_t n);

/// Clipped DFTs d^tau(omega_j) = sum_t I{R_t <= n tau} e^{-i omega_j t},
/// stored level-major.
class ClippedDft {
 public:
  ClippedDft(QuantileGrid grid, FrequencyGrid freq, std::vector<cplx> coeffs);

  const QuantileGrid& grid() const noexcept { return grid_; }
  const FrequencyGrid& frequencies() const noexcept { return freq_; }
  std::size_t n() const noexcept { return freq_.n(); }
  cplx operator()(std::size_t level, std::size_t f) const { return coeffs_[level * freq_.size() + f]; }

 private:
  QuantileGrid grid_;
  FrequencyGrid freq_;
  std::vector<cplx> coeffs_;
};

/// One real FFT per level. Throws UsageError if the grid and series lengths differ.
ClippedDft clipped_dft(const IndicatorMatrix& ind, const FrequencyGrid& freq);

/// I^{tau1,tau2}(omega_f) = d^{tau1}(omega_f) conj(d^{tau2}(omega_f)) / (2 pi n).
/// Diagonal entries are returned as exactly real |d|^2 / (2 pi n).
cplx cr_periodogram(const ClippedDft& dft, std::size_t level1, std::size_t level2, std::size_t f);

/// Index of the unordered level pair (a, b), a <= b, in row-major upper-triangle order.
inline std::size_t pair_index(std::size_t a, std::size_t b, std::size_t levels) {
  if (a > b) std::swap(a, b);
  return a * levels - (a * (a + 1)) / 2 + b;
}
inline std::size_t pair_count(std::size_t levels) { return levels * (levels + 1) / 2; }

/// CR-periodogram over every level pair tau1 <= tau2 and every grid frequency.
/// Pairs with tau1 > tau2 are the complex conjugates of the stored ones.
class CrField {
 public:
  static constexpr std::size_t kDefaultBudget = 100'000'000;

  CrField(QuantileGrid grid, FrequencyGrid freq, std::vector<cplx> upper);

  const QuantileGrid& grid() const noexcept { return grid_; }
  const FrequencyGrid& frequencies() const noexcept { return freq_; }
  std::size_t n() const noexcept { return freq_.n(); }
  std::size_t levels() const noexcept { return grid_.size(); }

  /// I^{tau_a, tau_b}(omega_f) for a grid position f.
  cplx at(std::size_t a, std::size_t b, std::size_t f) const;

  /// I^{tau_a, tau_b}(2 pi s / n) for any s not divisible by n, completed from
  /// the stored frequencies via I(-omega) = conj(I(omega)). Throws UsageError
  /// if neither s nor n - s is stored.
  cplx at_fourier(std::size_t a, std::size_t b, std::int64_t s) const;

  /// True when every s = 1..n-1 is reachable through at_fourier.
  bool covers_all_fourier() const;

  /// Stored values of pair (a <= b) over the grid frequencies.
  std::span<const cplx> pair_values(std::size_t a, std::size_t b) const;

 private:
  QuantileGrid grid_;
  FrequencyGrid freq_;
  std::vector<cplx> upper_;
};

CrField cr_field(const ClippedDft& dft, std::size_t element_budget = CrField::kDefaultBudget);
CrField cr_field(const IndicatorMatrix& ind, const FrequencyGrid& freq,
                 std::size_t element_budget = CrField::kDefaultBudget);

}  // namespace qspec
