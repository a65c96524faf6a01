#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace qspec_test {

inline std::vector<double> gaussian_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  std::vector<double> y(n);
  for (auto& v : y) v = dist(gen);
  return y;
}

// Integer-valued series with many ties.
inline std::vector<double> tied_series(std::size_t n, int distinct, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> dist(0, distinct - 1);
  std::vector<double> y(n);
  for (auto& v : y) v = dist(gen);
  return y;
}

// sum_t x[t] e^{-i omega t}, t = 0..n-1, by direct summation.
template <class T>
std::complex<double> naive_dft(const std::vector<T>& x, double omega) {
  double re = 0.0, im = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    re += static_cast<double>(x[t]) * std::cos(omega * static_cast<double>(t));
    im -= static_cast<double>(x[t]) * std::sin(omega * static_cast<double>(t));
  }
  return {re, im};
}

// Ranks by counting: R_t = #{s : y_s < y_t} + #{s < t : y_s == y_t} + 1.
inline std::vector<std::int64_t> counted_ranks(const std::vector<double>& y) {
  std::vector<std::int64_t> r(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    std::int64_t c = 1;
    for (std::size_t s = 0; s < y.size(); ++s)
      if (y[s] < y[t] || (y[s] == y[t] && s < t)) ++c;
    r[t] = c;
  }
  return r;
}

inline double omega_of(std::int64_t j, std::size_t n) {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
}

}  // namespace qspec_test
