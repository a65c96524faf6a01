#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace qspec {

enum class KernelKind { Order4, Epanechnikov };

/// An even weight function W supported on [-pi, pi] with unit mass.
///
/// `order` is the index of the first nonvanishing moment beyond the 0th;
/// moments of lower order are zero by construction and reported as such.
class SmoothingKernel {
 public:
  /// W(u) = (15/32)(1/pi)(7(u/pi)^4 - 10(u/pi)^2 + 3) on |u| <= pi; order 4.
  static SmoothingKernel order4();
  /// W(u) = (3/(4 pi))(1 - (u/pi)^2) on |u| <= pi; order 2.
  static SmoothingKernel epanechnikov();
  static SmoothingKernel from_name(std::string_view name);

  KernelKind kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }
  const std::string& name() const noexcept { return name_; }

  double operator()(double u) const noexcept;

  /// \int_{-pi}^{pi} v^j W(v) dv. Odd moments and moments below the order
  /// are exactly zero; the rest come from adaptive Gauss-Kronrod quadrature.
  double moment(int j) const;
  /// \int_{-pi}^{pi} W(v)^2 dv by quadrature.
  double squared_norm() const;

 private:
  SmoothingKernel(KernelKind kind, int order, std::string name)
      : kind_(kind), order_(order), name_(std::move(name)) {}

  KernelKind kind_;
  int order_;
  std::string name_;
};

/// Adaptive quadrature of f over [a, b] to absolute tolerance `tol`.
double integrate(double (*f)(double, const void*), const void* ctx, double a, double b,
                 double tol = 1e-12);

template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-12) {
  return integrate([](double x, const void* c) { return (*static_cast<const F*>(c))(x); }, &f, a,
                   b, tol);
}

enum class BandwidthRule { Explicit, Default };

/// Smoothing bandwidth b_n in (0, pi].
class Bandwidth {
 public:
  /// b_n = 0.4 n^{-1/4}.
  static Bandwidth standard(std::size_t n);
  static Bandwidth explicit_value(double b);

  double value() const noexcept { return value_; }
  BandwidthRule rule() const noexcept { return rule_; }

 private:
  Bandwidth(double v, BandwidthRule r) : value_(v), rule_(r) {}
  double value_;
  BandwidthRule rule_;
};

/// W_n(u) = sum_j b^{-1} W(b^{-1}(u + 2 pi j)). Only shifts with
/// |u + 2 pi j| <= pi b contribute; for b <= 1 that is at most one term.
double periodized_weight(const SmoothingKernel& kernel, double bandwidth, double u);

}  // namespace qspec
