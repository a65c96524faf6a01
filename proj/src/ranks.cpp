#include "qspec/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qspec/error.hpp"

namespace qspec {

RankedSeries rank_transform(std::span<const double> values, TiePolicy policy) {
  const std::size_t n = values.size();
  if (n < 2) throw DataError("rank_transform: need at least 2 observations, got " + std::to_string(n));
  for (std::size_t t = 0; t < n; ++t) {
    if (!std::isfinite(values[t]))
      throw DataError("rank_transform: non-finite value at index " + std::to_string(t));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  RankedSeries out;
  out.values.assign(values.begin(), values.end());
  out.ranks.resize(n);

  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    out.tie_count += j - i - 1;
    for (std::size_t k = i; k < j; ++k) {
      if (policy == TiePolicy::StableIndex) {
        out.ranks[order[k]] = static_cast<std::int64_t>(k + 1);
      } else {
        // mean of ranks i+1..j is (i+1+j)/2
        out.ranks[order[k]] = static_cast<std::int64_t>((i + 1 + j) / 2);
      }
    }
    i = j;
  }
  return out;
}

namespace {

constexpr std::int64_t kMaxDenominator = 1'000'000;

// Continued-fraction search for p/q (q <= kMaxDenominator) whose nearest double is tau.
bool recover_rational(double tau, std::int64_t& num, std::int64_t& den) {
  if (tau == 0.0) { num = 0; den = 1; return true; }
  if (tau == 1.0) { num = 1; den = 1; return true; }
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = tau;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_d = std::floor(x);
    if (a_d > static_cast<double>(kMaxDenominator)) break;
    const auto a = static_cast<std::int64_t>(a_d);
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > kMaxDenominator) break;
    if (static_cast<double>(p2) / static_cast<double>(q2) == tau) {
      num = p2;
      den = q2;
      return true;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = x - a_d;
    if (frac == 0.0) break;
    x = 1.0 / frac;
  }
  return false;
}

}  // namespace

QuantileLevel::QuantileLevel(double tau) : tau_(tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw UsageError("quantile level must lie in [0, 1], got " + std::to_string(tau));
  if (!recover_rational(tau, num_, den_)) {
    num_ = 0;
    den_ = 0;
  }
}

std::int64_t QuantileLevel::rank_threshold(std::int64_t n) const {
  if (is_rational()) {
    const auto prod = static_cast<__int128>(n) * num_;
    return static_cast<std::int64_t>(prod / den_);
  }
  // floor(n * tau) with the product taken exactly: fma gives the sign of
  // n*tau - m without intermediate rounding.
  const double nd = static_cast<double>(n);
  double m = std::floor(nd * tau_);
  if (std::fma(nd, tau_, -m) < 0.0) m -= 1.0;
  else if (std::fma(nd, tau_, -(m + 1.0)) >= 0.0) m += 1.0;
  return static_cast<std::int64_t>(m);
}

QuantileGrid::QuantileGrid(std::vector<double> levels) {
  levels_.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw UsageError("quantile grid must be strictly increasing");
    levels_.emplace_back(levels[i]);
  }
}

std::vector<double> QuantileGrid::values() const {
  std::vector<double> out;
  out.reserve(levels_.size());
  for (const auto& l : levels_) out.push_back(l.value());
  return out;
}

std::optional<std::size_t> QuantileGrid::find(double tau) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i].value() == tau) return i;
  return std::nullopt;
}

IndicatorMatrix::IndicatorMatrix(QuantileGrid grid, std::size_t n, std::vector<std::uint8_t> bits)
    : grid_(std::move(grid)), n_(n), bits_(std::move(bits)) {
  if (bits_.size() != grid_.size() * n_)
    throw UsageError("indicator matrix: bit count does not match levels x n");
}

std::size_t IndicatorMatrix::row_sum(std::size_t level) const {
  const auto r = row(level);
  return static_cast<std::size_t>(std::count(r.begin(), r.end(), std::uint8_t{1}));
}

IndicatorMatrix indicator_matrix(const RankedSeries& series, const QuantileGrid& grid) {
  const std::size_t n = series.size();
  std::vector<std::uint8_t> bits(grid.size() * n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const std::int64_t threshold = grid.level(k).rank_threshold(static_cast<std::int64_t>(n));
    std::uint8_t* row = bits.data() + k * n;
    for (std::size_t t = 0; t < n; ++t) row[t] = series.ranks[t] <= threshold ? 1 : 0;
  }
  return IndicatorMatrix(grid, n, std::move(bits));
}

}  // namespace qspec
