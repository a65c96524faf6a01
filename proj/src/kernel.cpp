#include "qspec/kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "qspec/error.hpp"

namespace qspec {

using std::numbers::pi;

SmoothingKernel SmoothingKernel::order4() { return {KernelKind::Order4, 4, "order4"}; }

SmoothingKernel SmoothingKernel::epanechnikov() {
  return {KernelKind::Epanechnikov, 2, "epanechnikov"};
}

SmoothingKernel SmoothingKernel::from_name(std::string_view name) {
  if (name == "order4") return order4();
  if (name == "epanechnikov") return epanechnikov();
  throw UsageError("unknown kernel '" + std::string(name) + "' (expected order4 or epanechnikov)");
}

double SmoothingKernel::operator()(double u) const noexcept {
  if (std::abs(u) > pi) return 0.0;
  const double x = u / pi;
  const double x2 = x * x;
  switch (kind_) {
    case KernelKind::Order4:
      return (15.0 / 32.0) / pi * (7.0 * x2 * x2 - 10.0 * x2 + 3.0);
    case KernelKind::Epanechnikov:
      return 3.0 / (4.0 * pi) * (1.0 - x2);
  }
  return 0.0;
}

double SmoothingKernel::moment(int j) const {
  if (j < 0) throw UsageError("kernel moment order must be >= 0");
  if (j == 0) return 1.0;
  if (j % 2 == 1 || j < order_) return 0.0;
  return integrate([&](double v) { return std::pow(v, j) * (*this)(v); }, -pi, pi);
}

double SmoothingKernel::squared_norm() const {
  return integrate([&](double v) { const double w = (*this)(v); return w * w; }, -pi, pi);
}

double integrate(double (*f)(double, const void*), const void* ctx, double a, double b, double tol) {
  auto g = [&](double x) { return f(x, ctx); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 15, tol, &err);
}

Bandwidth Bandwidth::standard(std::size_t n) {
  if (n < 1) throw UsageError("bandwidth: n must be positive");
  return {0.4 * std::pow(static_cast<double>(n), -0.25), BandwidthRule::Default};
}

Bandwidth Bandwidth::explicit_value(double b) {
  if (!(b > 0.0 && b <= pi)) throw UsageError("bandwidth must lie in (0, pi], got " + std::to_string(b));
  return {b, BandwidthRule::Explicit};
}

double periodized_weight(const SmoothingKernel& kernel, double bandwidth, double u) {
  const double reach = pi * bandwidth;
  const double two_pi = 2.0 * pi;
  const auto lo = static_cast<long long>(std::ceil((-reach - u) / two_pi));
  const auto hi = static_cast<long long>(std::floor((reach - u) / two_pi));
  double sum = 0.0;
  for (long long j = lo; j <= hi; ++j) sum += kernel((u + two_pi * static_cast<double>(j)) / bandwidth);
  return sum / bandwidth;
}

}  // namespace qspec
