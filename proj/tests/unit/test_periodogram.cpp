#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qspec/error.hpp"
#include "qspec/oracle.hpp"
#include "qspec/periodogram.hpp"
#include "qspec/simulate.hpp"
#include "support.hpp"

using namespace qspec;
using Catch::Approx;
using std::numbers::pi;

namespace {

IndicatorMatrix ramp_indicators(std::size_t n, std::vector<double> levels) {
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = static_cast<double>(t + 1);
  return indicator_matrix(rank_transform(y), QuantileGrid(std::move(levels)));
}

}  // namespace

TEST_CASE("frequency grids", "[periodogram]") {
  REQUIRE(FrequencyGrid::positive_half(8).indices() == std::vector<std::int64_t>{1, 2, 3});
  REQUIRE(FrequencyGrid::positive_half(9).indices() == std::vector<std::int64_t>{1, 2, 3, 4});
  REQUIRE(FrequencyGrid::smoothing_support(8).indices() == std::vector<std::int64_t>{1, 2, 3, 4});
  REQUIRE(FrequencyGrid::full(4).size() == 4);
  REQUIRE(nearest_fourier_index(pi / 2 + 0.01, 8) == 2);
  REQUIRE(nearest_fourier_index(-pi / 2, 8) == 6);
  REQUIRE(nearest_fourier_index(2 * pi, 8) == 0);
  auto g = FrequencyGrid::positive_half(16);
  REQUIRE(g.position(3) == 2u);
  REQUIRE_FALSE(g.position(12).has_value());
  REQUIRE_THROWS_AS(FrequencyGrid(8, {1, 8}), UsageError);
  REQUIRE_THROWS_AS(FrequencyGrid(8, {1, 1}), UsageError);
}

TEST_CASE("clipped DFT worked cases", "[periodogram]") {
  auto ind = ramp_indicators(4, {0.0, 0.25, 0.5});
  auto dft = clipped_dft(ind, FrequencyGrid::full(4));
  // row (1,1,0,0) at omega = pi
  REQUIRE(std::abs(dft(2, 2)) < 1e-15);
  // row sums at omega = 0
  REQUIRE(dft(2, 0) == cplx(2.0, 0.0));
  REQUIRE(dft(0, 0) == cplx(0.0, 0.0));
  // row (1,0,0,0) at omega = pi/2
  REQUIRE(dft(1, 1).real() == Approx(1.0).margin(1e-15));
  REQUIRE(dft(1, 1).imag() == Approx(0.0).margin(1e-15));
  // d^{0.5}(pi/2) = 1 - i
  REQUIRE(dft(2, 1).real() == Approx(1.0).margin(1e-15));
  REQUIRE(dft(2, 1).imag() == Approx(-1.0).margin(1e-15));
}

TEST_CASE("CR-periodogram worked cases", "[periodogram]") {
  auto ind = ramp_indicators(4, {0.0, 0.5});
  auto dft = clipped_dft(ind, FrequencyGrid::positive_half(4));
  const cplx v = cr_periodogram(dft, 1, 1, 0);
  REQUIRE(v.real() == Approx(2.0 / (8.0 * pi)).epsilon(1e-14));
  REQUIRE(v.real() == Approx(0.0795775).margin(1e-7));
  REQUIRE(v.imag() == 0.0);
  REQUIRE(cr_periodogram(dft, 0, 1, 0) == cplx(0.0, 0.0));

  auto field = cr_field(ind, FrequencyGrid::positive_half(4));
  REQUIRE(field.at(1, 1, 0) == v);
}

TEST_CASE("clipped DFT agrees with direct summation", "[periodogram][oracle]") {
  QuantileGrid g({0.1, 0.25, 0.5, 0.9});
  for (std::uint64_t c = 0; c < 100; ++c) {
    const std::size_t n = 2 + (c * 37) % 127;
    auto y = c % 3 ? qspec_test::gaussian_series(n, c) : qspec_test::tied_series(n, 4, c);
    auto ind = indicator_matrix(rank_transform(y), g);
    auto freq = FrequencyGrid::full(n);
    auto dft = clipped_dft(ind, freq);
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::vector<int> row(ind.row(k).begin(), ind.row(k).end());
      for (std::size_t f = 0; f < freq.size(); ++f) {
        auto want = qspec_test::naive_dft(row, freq.omega(f));
        REQUIRE(std::abs(dft(k, f) - want) <= 1e-9);
      }
    }
  }
}

TEST_CASE("CR-periodogram agrees with the naive oracle", "[periodogram][oracle]") {
  const std::vector<double> levels{0.1, 0.3, 0.5, 0.9};
  QuantileGrid g(levels);
  for (std::uint64_t c = 0; c < 100; ++c) {
    const std::size_t n = 4 + (c * 53) % 125;
    auto y = qspec_test::gaussian_series(n, 1000 + c);
    auto field = cr_field(indicator_matrix(rank_transform(y), g), FrequencyGrid::positive_half(n));
    const std::size_t f = c % field.frequencies().size();
    for (std::size_t a = 0; a < levels.size(); ++a)
      for (std::size_t b = 0; b < levels.size(); ++b) {
        auto want = naive_cr_periodogram(y, levels[a], levels[b], field.frequencies().omega(f));
        REQUIRE(std::abs(field.at(a, b, f) - want) <= 1e-9);
      }
  }
}

TEST_CASE("CR field symmetries", "[periodogram][property]") {
  QuantileGrid g({0.1, 0.5, 0.9});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 32 + 11 * seed;
    auto ind = indicator_matrix(rank_transform(qspec_test::gaussian_series(n, seed)), g);
    auto full = cr_field(ind, FrequencyGrid::full(n));
    auto half = cr_field(ind, FrequencyGrid::smoothing_support(n));
    REQUIRE(half.covers_all_fourier());
    for (std::size_t j = 1; j < n; ++j)
      for (std::size_t a = 0; a < 3; ++a) {
        REQUIRE(full.at(a, a, j).imag() == 0.0);
        REQUIRE(full.at(a, a, j).real() >= 0.0);
        for (std::size_t b = 0; b < 3; ++b) {
          // Hermitian in the levels
          REQUIRE(full.at(a, b, j) == std::conj(full.at(b, a, j)));
          // I(2 pi - omega) = conj I(omega)
          REQUIRE(std::abs(full.at(a, b, n - j) - std::conj(full.at(a, b, j))) <= 1e-12);
          REQUIRE(std::abs(half.at_fourier(a, b, static_cast<std::int64_t>(j)) - full.at(a, b, j)) <= 1e-12);
        }
      }
  }
}

TEST_CASE("CR field limits and errors", "[periodogram]") {
  auto ind = ramp_indicators(64, {0.5});
  REQUIRE_THROWS_AS(cr_field(ind, FrequencyGrid::full(64), 10), UsageError);
  REQUIRE_THROWS_AS(clipped_dft(ind, FrequencyGrid::full(32)), UsageError);
  auto partial = cr_field(ind, FrequencyGrid(64, {1, 2}));
  REQUIRE_FALSE(partial.covers_all_fourier());
  REQUIRE_THROWS_AS(partial.at_fourier(0, 0, 5), UsageError);
  REQUIRE_NOTHROW(partial.at_fourier(0, 0, 63));
}

TEST_CASE("pair index enumerates the upper triangle", "[periodogram]") {
  for (std::size_t L = 1; L <= 7; ++L) {
    std::size_t expect = 0;
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t b = a; b < L; ++b) {
        REQUIRE(pair_index(a, b, L) == expect);
        REQUIRE(pair_index(b, a, L) == expect);
        ++expect;
      }
    REQUIRE(pair_count(L) == expect);
  }
}

TEST_CASE("white-noise mean of the CR-periodogram", "[periodogram][montecarlo]") {
  // For a uniformly random permutation with m = n/2 ones in the row,
  // E|d(omega_j)|^2 = m (n - m) / (n - 1) at every j != 0.
  const std::size_t n = 1024, reps = 500;
  const double m = n / 2.0;
  const double expect = m * (n - m) / (n - 1.0) / (2.0 * pi * n);
  QuantileGrid g({0.5});
  const std::int64_t j = n / 4;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    auto y = simulate({Model::GaussWn, n, 0, 7, r});
    auto field = cr_field(indicator_matrix(rank_transform(y), g), FrequencyGrid(n, {j}));
    const double v = field.at(0, 0, 0).real();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
  REQUIRE(std::abs(mean - expect) <= 3.0 * se);
  REQUIRE(expect == Approx(0.0397887).epsilon(2e-3));
}
