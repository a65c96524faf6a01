#include "qspec/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "qspec/error.hpp"

namespace qspec::fft {
namespace {

// Plans use FFTW_ESTIMATE | FFTW_UNALIGNED, so the same plan is chosen for a
// given length regardless of buffer alignment and results are reproducible.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : forward_) fftw_destroy_plan(p);
    for (auto& [n, p] : inverse_) fftw_destroy_plan(p);
  }

  fftw_plan forward(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = forward_.find(n);
    if (it != forward_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw Error("fftw: failed to create r2c plan");
    forward_.emplace(n, p);
    return p;
  }

  fftw_plan inverse(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = inverse_.find(n);
    if (it != inverse_.end()) return it->second;
    std::vector<fftw_complex> in(n / 2 + 1);
    std::vector<double> out(n);
    fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    if (p == nullptr) throw Error("fftw: failed to create c2r plan");
    inverse_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> forward_;
  std::map<std::size_t, fftw_plan> inverse_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void forward_real(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  if (n == 0) throw UsageError("fft: empty input");
  if (out.size() != n / 2 + 1) throw UsageError("fft: output must hold n/2 + 1 coefficients");
  fftw_plan p = plans().forward(n);
  // r2c out-of-place transforms preserve their input.
  fftw_execute_dft_r2c(p, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

std::vector<std::complex<double>> forward_real(std::span<const double> in) {
  std::vector<std::complex<double>> out(in.size() / 2 + 1);
  forward_real(in, out);
  return out;
}

void inverse_real(std::span<std::complex<double>> in, std::span<double> out) {
  const std::size_t n = out.size();
  if (n == 0) throw UsageError("fft: empty output");
  if (in.size() != n / 2 + 1) throw UsageError("fft: input must hold n/2 + 1 coefficients");
  fftw_plan p = plans().inverse(n);
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace qspec::fft
