#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qspec {

/// How tied observations are ranked.
///
/// StableIndex gives tied values distinct consecutive ranks in order of
/// occurrence, so ranks are always a permutation of 1..n. AverageFloor gives
/// every member of a tie group floor(mean rank of the group).
enum class TiePolicy { StableIndex, AverageFloor };

/// Observations together with their marginal ranks R_{n;t} in 1..n.
struct RankedSeries {
  std::vector<double> values;
  std::vector<std::int64_t> ranks;
  /// Number of adjacent equal pairs among the sorted observations.
  std::size_t tie_count = 0;

  std::size_t size() const noexcept { return ranks.size(); }
};

/// Ranks `values` (length >= 2, all finite). Throws DataError naming the
/// first non-finite index.
RankedSeries rank_transform(std::span<const double> values,
                            TiePolicy policy = TiePolicy::StableIndex);

/// A quantile level tau in [0, 1].
///
/// When tau is the double nearest to a rational p/q with a small denominator
/// (0.1, 0.3, 1/3, ...), the rational is kept so that R <= n*tau is decided in
/// exact integer arithmetic. Otherwise the comparison is done exactly against
/// the binary value of tau.
class QuantileLevel {
 public:
  explicit QuantileLevel(double tau);

  double value() const noexcept { return tau_; }
  bool is_rational() const noexcept { return den_ != 0; }
  std::int64_t numerator() const noexcept { return num_; }
  std::int64_t denominator() const noexcept { return den_; }

  /// Largest integer r with r <= n * tau.
  std::int64_t rank_threshold(std::int64_t n) const;

 private:
  double tau_;
  std::int64_t num_ = 0;
  std::int64_t den_ = 0;
};

/// Strictly increasing quantile levels in [0, 1].
class QuantileGrid {
 public:
  QuantileGrid() = default;
  explicit QuantileGrid(std::vector<double> levels);

  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i].value(); }
  const QuantileLevel& level(std::size_t i) const { return levels_[i]; }
  std::vector<double> values() const;
  /// Index of the level equal to `tau`, if present.
  std::optional<std::size_t> find(double tau) const;

 private:
  std::vector<QuantileLevel> levels_;
};

/// Binary matrix (levels x n) with entry (k, t) = I{R_{n;t} <= n tau_k}.
class IndicatorMatrix {
 public:
  IndicatorMatrix(QuantileGrid grid, std::size_t n, std::vector<std::uint8_t> bits);

  const QuantileGrid& grid() const noexcept { return grid_; }
  std::size_t levels() const noexcept { return grid_.size(); }
  std::size_t n() const noexcept { return n_; }
  std::span<const std::uint8_t> row(std::size_t level) const {
    return {bits_.data() + level * n_, n_};
  }
  std::uint8_t operator()(std::size_t level, std::size_t t) const { return bits_[level * n_ + t]; }
  std::size_t row_sum(std::size_t level) const;

 private:
  QuantileGrid grid_;
  std::size_t n_;
  std::vector<std::uint8_t> bits_;
};

IndicatorMatrix indicator_matrix(const RankedSeries& series, const QuantileGrid& grid);

}  // namespace qspec
