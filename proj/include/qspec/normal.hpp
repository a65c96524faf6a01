#pragma once

namespace qspec {

/// Standard normal distribution function.
double normal_cdf(double x);

/// Standard normal quantile Phi^{-1}(p) for p in (0, 1), absolute error well
/// below 1e-9. Returns -inf / +inf at p = 0 / 1.
double normal_quantile(double p);

}  // namespace qspec
