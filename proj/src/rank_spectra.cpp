#include "qspec/rank_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qspec/error.hpp"
#include "qspec/fft.hpp"

namespace qspec {

using std::numbers::pi;

DependenceMeasure DependenceMeasure::spearman() {
  DependenceMeasure m;
  m.uniform = 12.0;
  return m;
}

DependenceMeasure DependenceMeasure::blomqvist() { return atom(0.5, 0.5, 4.0); }

DependenceMeasure DependenceMeasure::gini() {
  DependenceMeasure m;
  m.diagonal = 4.0;
  m.anti_diagonal = 4.0;
  return m;
}

DependenceMeasure DependenceMeasure::atom(double u, double v, double mass) {
  DependenceMeasure m;
  m.atoms.push_back({u, v, mass});
  m.validate();
  return m;
}

DependenceMeasure DependenceMeasure::parse(std::istream& in) {
  DependenceMeasure m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string kind;
    if (!(ss >> kind) || kind[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw DataError("measure line " + std::to_string(lineno) + ": " + why);
    };
    auto read = [&](double& x) {
      if (!(ss >> x)) fail("expected a number after '" + kind + "'");
    };
    if (kind == "atom") {
      Atom a{};
      read(a.u);
      read(a.v);
      read(a.mass);
      m.atoms.push_back(a);
    } else if (kind == "uniform") {
      double x;
      read(x);
      m.uniform += x;
    } else if (kind == "diag") {
      double x;
      read(x);
      m.diagonal += x;
    } else if (kind == "antidiag") {
      double x;
      read(x);
      m.anti_diagonal += x;
    } else {
      fail("unsupported component '" + kind + "'");
    }
    std::string extra;
    if (ss >> extra) fail("trailing token '" + extra + "'");
  }
  try {
    m.validate();
  } catch (const UsageError& e) {
    throw DataError(e.what());
  }
  return m;
}

void DependenceMeasure::validate() const {
  auto ok_mass = [](double x) { return std::isfinite(x) && x >= 0.0; };
  for (const auto& a : atoms) {
    if (!(a.u >= 0.0 && a.u <= 1.0 && a.v >= 0.0 && a.v <= 1.0))
      throw UsageError("measure atom outside [0,1]^2");
    if (!ok_mass(a.mass)) throw UsageError("measure masses must be finite and >= 0");
  }
  if (!ok_mass(uniform) || !ok_mass(diagonal) || !ok_mass(anti_diagonal))
    throw UsageError("measure masses must be finite and >= 0");
}

double DependenceMeasure::total_mass() const {
  double t = uniform + diagonal + anti_diagonal;
  for (const auto& a : atoms) t += a.mass;
  return t;
}

namespace {

void check_lag(const RankedSeries& s, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(s.size());
  if (std::abs(k) >= n)
    throw UsageError("lag " + std::to_string(k) + " must satisfy |k| < n = " + std::to_string(n));
}

void check_fourier_index(std::int64_t j, std::size_t n) {
  if (j < 1 || j >= static_cast<std::int64_t>(n))
    throw UsageError("Fourier index " + std::to_string(j) + " outside 1..n-1");
}

// e^{-2 pi i k / n} for k = 0..n-1.
std::vector<cplx> roots_of_unity(std::size_t n) {
  std::vector<cplx> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = std::polar(1.0, -fourier_frequency(static_cast<std::int64_t>(k), n));
  return r;
}

// Full-length DFT (j = 0..n-1) of a real sequence.
std::vector<cplx> full_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  auto half = fft::forward_real(x);
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = j <= n / 2 ? half[j] : std::conj(half[n - j]);
  return out;
}

std::vector<cplx> clipped_full_dft(const RankedSeries& s, double tau) {
  const QuantileLevel level(tau);
  const auto thr = level.rank_threshold(static_cast<std::int64_t>(s.size()));
  std::vector<double> x(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) x[t] = s.ranks[t] <= thr ? 1.0 : 0.0;
  return full_dft(x);
}

}  // namespace

double spearman_rho_hat(const RankedSeries& s, std::int64_t k) {
  check_lag(s, k);
  const auto n = static_cast<std::int64_t>(s.size());
  const std::int64_t lag = std::abs(k);
  // Work with 2R - (n+1) so every product is an exact integer.
  long double acc = 0.0L;
  for (std::int64_t t = 0; t + lag < n; ++t) {
    const std::int64_t x = 2 * s.ranks[t] - (n + 1);
    const std::int64_t y = 2 * s.ranks[t + lag] - (n + 1);
    acc += static_cast<long double>(x) * static_cast<long double>(y);
  }
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(12.0L * acc / (4.0L * nn * nn * nn));
}

double blomqvist_beta_hat(const RankedSeries& s, std::int64_t k) {
  check_lag(s, k);
  const auto n = static_cast<std::int64_t>(s.size());
  const std::int64_t lag = std::abs(k);
  const std::int64_t thr = QuantileLevel(0.5).rank_threshold(n);
  std::int64_t sum = 0;
  for (std::int64_t t = 0; t + lag < n; ++t)
    sum += 4 * ((s.ranks[t] <= thr && s.ranks[t + lag] <= thr) ? 1 : 0) - 1;
  return static_cast<double>(sum) / static_cast<double>(n - lag);
}

double gini_gamma_hat(const RankedSeries& s, std::int64_t k) {
  check_lag(s, k);
  const auto n = static_cast<std::int64_t>(s.size());
  const std::int64_t lag = std::abs(k);
  std::int64_t sum = 0;
  for (std::int64_t t = 0; t + lag < n; ++t) {
    const std::int64_t a = s.ranks[t];
    const std::int64_t b = s.ranks[t + lag];
    sum += std::abs(a + b - n) - std::abs(a - b);
  }
  return 2.0 * static_cast<double>(sum) / (static_cast<double>(n) * static_cast<double>(n - lag));
}

std::vector<double> rank_autocorrelation(const RankedSeries& s, RankCoefficient kind,
                                         std::int64_t max_lag) {
  check_lag(s, max_lag);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_lag + 1));
  for (std::int64_t k = 0; k <= max_lag; ++k) {
    switch (kind) {
      case RankCoefficient::Spearman: out.push_back(spearman_rho_hat(s, k)); break;
      case RankCoefficient::Blomqvist: out.push_back(blomqvist_beta_hat(s, k)); break;
      case RankCoefficient::Gini: out.push_back(gini_gamma_hat(s, k)); break;
    }
  }
  return out;
}

std::vector<cplx> spearman_periodogram_all(const RankedSeries& s) {
  const std::size_t n = s.size();
  std::vector<double> r(n);
  for (std::size_t t = 0; t < n; ++t) r[t] = static_cast<double>(s.ranks[t]);
  const auto d = full_dft(r);
  const double nd = static_cast<double>(n);
  std::vector<cplx> out(n - 1);
  for (std::size_t j = 1; j < n; ++j) out[j - 1] = {12.0 / (2.0 * pi * nd) * std::norm(d[j] / nd), 0.0};
  return out;
}

cplx spearman_periodogram(const RankedSeries& s, std::int64_t j) {
  check_fourier_index(j, s.size());
  return spearman_periodogram_all(s)[static_cast<std::size_t>(j - 1)];
}

std::vector<cplx> measure_periodogram_all(const RankedSeries& s, const DependenceMeasure& mu) {
  mu.validate();
  const std::size_t n = s.size();
  const double nd = static_cast<double>(n);
  const double base = 1.0 / (2.0 * pi * nd);
  std::vector<cplx> out(n - 1, cplx{});

  for (const auto& atom : mu.atoms) {
    if (atom.mass == 0.0) continue;
    const auto du = clipped_full_dft(s, atom.u);
    const auto dv = atom.v == atom.u ? du : clipped_full_dft(s, atom.v);
    for (std::size_t j = 1; j < n; ++j) out[j - 1] += atom.mass * base * du[j] * std::conj(dv[j]);
  }

  if (mu.uniform != 0.0) {
    const auto sp = spearman_periodogram_all(s);
    for (std::size_t j = 1; j < n; ++j) out[j - 1] += (mu.uniform / 12.0) * sp[j - 1];
  }

  if (mu.diagonal != 0.0 || mu.anti_diagonal != 0.0) {
    // S_a(w) = sum_{t: R_t <= a} e^{-i w t}, a = 0..n-1, accumulated in rank order.
    // \int_0^1 I^{u,u} du        = (1/(2 pi n^2)) sum_a |S_a|^2
    // \int_0^1 I^{u,1-u} du      = (1/(2 pi n^2)) sum_a S_a conj(S_{n-1-a})
    std::vector<std::size_t> order(n);
    for (std::size_t t = 0; t < n; ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.ranks[a] < s.ranks[b]; });
    const auto roots = roots_of_unity(n);
    std::vector<cplx> partial(n);
    const double scale = base / nd;
    for (std::size_t j = 1; j < n; ++j) {
      cplx acc{};
      std::size_t next = 0;
      for (std::size_t a = 0; a < n; ++a) {
        while (next < n && s.ranks[order[next]] <= static_cast<std::int64_t>(a)) {
          acc += roots[(j * order[next]) % n];
          ++next;
        }
        partial[a] = acc;
      }
      cplx diag{}, anti{};
      for (std::size_t a = 0; a < n; ++a) {
        diag += std::norm(partial[a]);
        anti += partial[a] * std::conj(partial[n - 1 - a]);
      }
      out[j - 1] += scale * (mu.diagonal * diag + mu.anti_diagonal * anti);
    }
  }
  return out;
}

cplx measure_periodogram(const RankedSeries& s, const DependenceMeasure& mu, std::int64_t j) {
  check_fourier_index(j, s.size());
  return measure_periodogram_all(s, mu)[static_cast<std::size_t>(j - 1)];
}

namespace {

// Discretization of mu onto a level grid: mass[a][b] on level pair (a, b).
struct DiscreteMeasure {
  QuantileGrid grid;
  std::vector<double> mass;  // L x L row-major
};

DiscreteMeasure discretize(const DependenceMeasure& mu, std::size_t m) {
  const bool continuous = mu.uniform != 0.0 || mu.diagonal != 0.0 || mu.anti_diagonal != 0.0;
  std::vector<double> lv;
  std::vector<double> mid;
  if (continuous) {
    if (m == 0) throw UsageError("variance grid must be positive");
    for (std::size_t i = 0; i < m; ++i) mid.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(m));
    lv = mid;
  }
  for (const auto& a : mu.atoms) {
    lv.push_back(a.u);
    lv.push_back(a.v);
  }
  std::sort(lv.begin(), lv.end());
  lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
  DiscreteMeasure d{QuantileGrid(lv), std::vector<double>(lv.size() * lv.size(), 0.0)};
  const std::size_t L = lv.size();
  auto idx = [&](double x) { return *d.grid.find(x); };
  if (continuous) {
    const double md = static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t a = idx(mid[i]);
      for (std::size_t k = 0; k < m; ++k) d.mass[a * L + idx(mid[k])] += mu.uniform / (md * md);
      d.mass[a * L + a] += mu.diagonal / md;
      d.mass[a * L + idx(mid[m - 1 - i])] += mu.anti_diagonal / md;
    }
  }
  for (const auto& a : mu.atoms) d.mass[idx(a.u) * L + idx(a.v)] += a.mass;
  return d;
}

// out = A * B for L x L complex matrices (B given as complex, A real).
void mul_real_complex(const std::vector<double>& a, const std::vector<cplx>& b, std::vector<cplx>& out,
                      std::size_t L) {
  std::fill(out.begin(), out.end(), cplx{});
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t k = 0; k < L; ++k) {
      const double aik = a[i * L + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < L; ++j) out[i * L + j] += aik * b[k * L + j];
    }
}

double plug_in_variance(const DiscreteMeasure& d, const std::vector<cplx>& f, bool zero_mod_pi,
                        double kernel_l2) {
  const std::size_t L = d.grid.size();
  std::vector<cplx> mf(L * L);
  mul_real_complex(d.mass, f, mf, L);  // M F
  // (M F M^T)[a][a'] = sum_b' (M F)[a][b'] M[a'][b']
  cplx first{};
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t a2 = 0; a2 < L; ++a2) {
      cplx v{};
      for (std::size_t b2 = 0; b2 < L; ++b2) {
        const double w = d.mass[a2 * L + b2];
        if (w != 0.0) v += mf[a * L + b2] * w;
      }
      first += f[a * L + a2] * v;
    }
  cplx second{};
  if (zero_mod_pi) {
    // (M F M)[a][b'] = sum_a' (M F)[a][a'] M[a'][b']
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t b2 = 0; b2 < L; ++b2) {
        cplx v{};
        for (std::size_t a2 = 0; a2 < L; ++a2) {
          const double w = d.mass[a2 * L + b2];
          if (w != 0.0) v += mf[a * L + a2] * w;
        }
        second += f[a * L + b2] * v;
      }
  }
  return 2.0 * pi * kernel_l2 * (first + second).real();
}

}  // namespace

std::vector<MeasureSpectrumPoint> smoothed_measure_spectrum(
    const RankedSeries& series, const DependenceMeasure& mu, const SmoothingKernel& kernel,
    double bandwidth, const std::vector<double>& omegas, const MeasureSpectrumOptions& options) {
  const std::size_t n = series.size();
  const auto nn = static_cast<std::int64_t>(n);
  const WeightTable table(kernel, bandwidth, n);
  const auto ordinates = measure_periodogram_all(series, mu);
  const double step = 2.0 * pi / static_cast<double>(n);

  std::optional<DiscreteMeasure> disc;
  std::optional<CrField> field;
  double kernel_l2 = 0.0;
  if (options.compute_variance) {
    disc = discretize(mu, options.variance_grid);
    const auto ind = indicator_matrix(series, disc->grid);
    field = cr_field(ind, FrequencyGrid::smoothing_support(n));
    kernel_l2 = kernel.squared_norm();
  }

  std::vector<MeasureSpectrumPoint> out;
  out.reserve(omegas.size());
  for (const double omega : omegas) {
    MeasureSpectrumPoint p{omega, cplx{}, std::nullopt, std::nullopt};
    const double target = std::remainder(omega, 2.0 * pi);
    for (std::int64_t s = 1; s < nn; ++s) {
      const double w = periodized_weight(kernel, bandwidth, target - fourier_frequency(s, n));
      if (w != 0.0) p.raw += w * ordinates[static_cast<std::size_t>(s - 1)];
    }
    p.raw *= step;

    const std::int64_t j = nearest_fourier_index(omega, n);
    const bool on_grid = j != 0 && std::abs(target - std::remainder(fourier_frequency(j, n), 2.0 * pi)) <= 1e-12;
    double wj = 1.0;
    if (on_grid) {
      wj = table.normalizer(j, options.normalizer);
      p.normalized = normalize(p.raw, wj);
    }

    if (options.compute_variance) {
      const std::size_t L = disc->grid.size();
      const auto smoothed = smooth(*field, kernel, bandwidth, omega);
      std::vector<cplx> f(L * L);
      for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = 0; b < L; ++b) {
          cplx v = smoothed[pair_index(a, b, L)];
          if (a > b) v = std::conj(v);
          f[a * L + b] = v / wj;
        }
      const bool zero_mod_pi = on_grid ? (2 * j) % nn == 0 : std::remainder(omega, pi) == 0.0;
      p.variance = plug_in_variance(*disc, f, zero_mod_pi, kernel_l2);
    }
    out.push_back(p);
  }
  return out;
}

MeasureSpectrumPoint smoothed_measure_spectrum(const RankedSeries& series, const DependenceMeasure& mu,
                                               const SmoothingKernel& kernel, double bandwidth,
                                               double omega, const MeasureSpectrumOptions& options) {
  return smoothed_measure_spectrum(series, mu, kernel, bandwidth, std::vector<double>{omega}, options)
      .front();
}

double spearman_scale_factor(SpearmanScale scale) {
  return scale == SpearmanScale::Consistent ? 1.0 : 1.0 / 12.0;
}

double white_noise_measure_spectrum(const DependenceMeasure& mu) {
  mu.validate();
  double v = mu.uniform / 12.0 + mu.diagonal / 6.0 + mu.anti_diagonal / 12.0;
  for (const auto& a : mu.atoms) v += a.mass * (std::min(a.u, a.v) - a.u * a.v);
  return v / (2.0 * pi);
}

}  // namespace qspec
