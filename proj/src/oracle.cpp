#include "qspec/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "qspec/error.hpp"
#include "qspec/fft.hpp"
#include "qspec/rng.hpp"

namespace qspec {

using std::numbers::pi;

double white_noise_spectrum(double tau1, double tau2) {
  if (!(tau1 >= 0.0 && tau1 <= 1.0 && tau2 >= 0.0 && tau2 <= 1.0))
    throw UsageError("white_noise_spectrum: levels must lie in [0, 1]");
  return (std::min(tau1, tau2) - tau1 * tau2) / (2.0 * pi);
}

namespace {

// Decides r <= n * tau. Looks for the smallest q with (double)p/q == tau by
// trying every denominator; falls back to extended precision, which is exact
// for the small n this is used with.
bool rank_below(std::int64_t r, std::int64_t n, double tau) {
  for (std::int64_t q = 1; q <= 4096; ++q) {
    const double p = std::round(tau * static_cast<double>(q));
    if (p / static_cast<double>(q) == tau) return r * q <= n * static_cast<std::int64_t>(p);
  }
  return static_cast<long double>(r) <= static_cast<long double>(n) * static_cast<long double>(tau);
}

}  // namespace

cplx naive_cr_periodogram(std::span<const double> x, double tau1, double tau2, double omega) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<std::int64_t> rank(x.size());
  for (std::int64_t t = 0; t < n; ++t) {
    std::int64_t r = 0;
    for (std::int64_t s = 0; s < n; ++s)
      if (x[s] < x[t] || (x[s] == x[t] && s <= t)) ++r;
    rank[t] = r;
  }
  auto dft = [&](double tau) {
    double re = 0.0, im = 0.0;
    for (std::int64_t t = 0; t < n; ++t) {
      if (!rank_below(rank[t], n, tau)) continue;
      re += std::cos(omega * static_cast<double>(t));
      im -= std::sin(omega * static_cast<double>(t));
    }
    return cplx(re, im);
  };
  const cplx d1 = dft(tau1);
  const cplx d2 = dft(tau2);
  return d1 * std::conj(d2) / (2.0 * pi * static_cast<double>(n));
}

TruthSpectrum::TruthSpectrum(TruthProvenance provenance, QuantileGrid grid, std::size_t max_lag,
                             std::vector<std::vector<double>> lag_cov, std::vector<double> quantiles)
    : provenance_(provenance),
      grid_(std::move(grid)),
      max_lag_(max_lag),
      lag_cov_(std::move(lag_cov)),
      quantiles_(std::move(quantiles)) {
  const std::size_t expect = pair_count(grid_.size()) * (2 * max_lag_ + 1);
  if (lag_cov_.empty()) throw UsageError("truth spectrum needs at least one batch");
  for (const auto& b : lag_cov_)
    if (b.size() != expect) throw DataError("truth spectrum: lag covariance block has wrong size");
}

double TruthSpectrum::raw_gamma(std::size_t batch, std::size_t a, std::size_t b, std::int64_t k) const {
  // gamma_k(b, a) = gamma_{-k}(a, b)
  if (a > b) {
    std::swap(a, b);
    k = -k;
  }
  const auto K = static_cast<std::int64_t>(max_lag_);
  if (std::abs(k) > K) return 0.0;
  const std::size_t base = pair_index(a, b, grid_.size()) * (2 * max_lag_ + 1);
  return lag_cov_[batch][base + static_cast<std::size_t>(k + K)];
}

double TruthSpectrum::gamma(std::size_t a, std::size_t b, std::int64_t k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < lag_cov_.size(); ++i) s += raw_gamma(i, a, b, k);
  return s / static_cast<double>(lag_cov_.size());
}

cplx TruthSpectrum::batch_value(std::size_t batch, std::size_t a, std::size_t b, double omega) const {
  const auto K = static_cast<std::int64_t>(max_lag_);
  cplx acc{};
  for (std::int64_t k = -K; k <= K; ++k)
    acc += raw_gamma(batch, a, b, k) * std::polar(1.0, -omega * static_cast<double>(k));
  return acc / (2.0 * pi);
}

cplx TruthSpectrum::value(std::size_t a, std::size_t b, double omega) const {
  cplx s{};
  for (std::size_t i = 0; i < lag_cov_.size(); ++i) s += batch_value(i, a, b, omega);
  s /= static_cast<double>(lag_cov_.size());
  if (a == b) s.imag(0.0);
  return s;
}

std::optional<std::pair<double, double>> TruthSpectrum::standard_error(std::size_t a, std::size_t b,
                                                                       double omega) const {
  if (provenance_ == TruthProvenance::AnalyticWhiteNoise || lag_cov_.size() < 2) return std::nullopt;
  const auto B = static_cast<double>(lag_cov_.size());
  std::vector<cplx> v;
  cplx mean{};
  for (std::size_t i = 0; i < lag_cov_.size(); ++i) {
    v.push_back(batch_value(i, a, b, omega));
    mean += v.back();
  }
  mean /= B;
  double sr = 0.0, si = 0.0;
  for (const cplx& x : v) {
    sr += (x.real() - mean.real()) * (x.real() - mean.real());
    si += (x.imag() - mean.imag()) * (x.imag() - mean.imag());
  }
  const double re = std::sqrt(sr / (B - 1.0) / B);
  const double im = a == b ? 0.0 : std::sqrt(si / (B - 1.0) / B);
  return std::make_pair(re, im);
}

std::vector<std::string> TruthSpectrum::truncation_warnings() const {
  std::vector<std::string> out;
  if (provenance_ != TruthProvenance::LagWindowMC || lag_cov_.size() < 2) return out;
  const auto B = static_cast<double>(lag_cov_.size());
  const auto K = static_cast<std::int64_t>(max_lag_);
  for (std::size_t a = 0; a < grid_.size(); ++a)
    for (std::size_t b = a; b < grid_.size(); ++b)
      for (std::int64_t k : {-K, K}) {
        const double m = gamma(a, b, k);
        double ss = 0.0;
        for (std::size_t i = 0; i < lag_cov_.size(); ++i) {
          const double d = raw_gamma(i, a, b, k) - m;
          ss += d * d;
        }
        const double se = std::sqrt(ss / (B - 1.0) / B);
        if (std::abs(m) > 3.0 * se) {
          char buf[200];
          std::snprintf(buf, sizeof buf,
                        "truth: |gamma_%lld(%g, %g)| = %.3g exceeds 3 SE (%.3g); lag window may be too short",
                        static_cast<long long>(k), grid_[a], grid_[b], std::abs(m), se);
          out.emplace_back(buf);
        }
      }
  return out;
}

TruthSpectrum analytic_white_noise_truth(const QuantileGrid& grid) {
  const std::size_t L = grid.size();
  std::vector<double> g(pair_count(L));
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = a; b < L; ++b) g[pair_index(a, b, L)] = std::min(grid[a], grid[b]) - grid[a] * grid[b];
  return TruthSpectrum(TruthProvenance::AnalyticWhiteNoise, grid, 0, {std::move(g)});
}

namespace {

constexpr std::uint64_t kTruthSeedSalt = 0x7472757468ULL;

std::uint64_t truth_seed(const TruthConfig& c) { return mix64(c.seed ^ kTruthSeedSalt); }

// Empirical quantile: order statistic ceil(tau N) (1-based).
std::vector<double> calibrate(Model model, const QuantileGrid& grid, const TruthConfig& c) {
  ModelSpec spec{model, c.calibration_length, c.burn_in, truth_seed(c), 0};
  std::vector<double> path = simulate(spec);
  std::vector<double> q(grid.size());
  const double N = static_cast<double>(path.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double tau = grid[i];
    if (tau == 0.0) {
      q[i] = -std::numeric_limits<double>::infinity();
      continue;
    }
    auto r = static_cast<std::size_t>(std::ceil(tau * N));
    r = std::clamp<std::size_t>(r, 1, path.size());
    std::nth_element(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(r - 1), path.end());
    q[i] = tau == 1.0 ? std::numeric_limits<double>::infinity() : path[r - 1];
  }
  return q;
}

std::vector<double> batch_lag_covariances(Model model, const QuantileGrid& grid,
                                          const std::vector<double>& q, const TruthConfig& c,
                                          std::size_t batch) {
  const std::size_t L = grid.size();
  const std::size_t N = c.path_length;
  const std::size_t K = c.max_lag;
  const std::size_t M = fft::next_pow2(N + K + 1);
  const std::vector<double> path = simulate({model, N, c.burn_in, truth_seed(c), batch + 1});

  std::vector<std::vector<std::complex<double>>> spec(L);
  std::vector<double> x(M);
  for (std::size_t a = 0; a < L; ++a) {
    std::size_t hits = 0;
    for (std::size_t t = 0; t < N; ++t) hits += path[t] <= q[a];
    const double mean = static_cast<double>(hits) / static_cast<double>(N);
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t t = 0; t < N; ++t) x[t] = (path[t] <= q[a] ? 1.0 : 0.0) - mean;
    spec[a] = fft::forward_real(x);
  }

  std::vector<double> out(pair_count(L) * (2 * K + 1));
  std::vector<std::complex<double>> prod(M / 2 + 1);
  std::vector<double> corr(M);
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = a; b < L; ++b) {
      // IFFT(X_a conj X_b)[m] = sum_t x_a[t] x_b[t - m]
      for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = spec[a][j] * std::conj(spec[b][j]);
      fft::inverse_real(prod, corr);
      const std::size_t base = pair_index(a, b, L) * (2 * K + 1);
      for (std::int64_t k = -static_cast<std::int64_t>(K); k <= static_cast<std::int64_t>(K); ++k) {
        const std::size_t idx = k >= 0 ? static_cast<std::size_t>(k) : M - static_cast<std::size_t>(-k);
        const double terms = static_cast<double>(N - static_cast<std::size_t>(std::abs(k)));
        out[base + static_cast<std::size_t>(k + static_cast<std::int64_t>(K))] =
            corr[idx] / static_cast<double>(M) / terms;
      }
    }
  return out;
}

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

TruthSpectrum mc_truth_spectrum(Model model, const QuantileGrid& grid, const TruthConfig& c,
                                const std::function<void(const std::string&)>& warn) {
  if (c.batches < 2) throw UsageError("truth: need at least 2 batches for standard errors");
  if (c.max_lag >= c.path_length) throw UsageError("truth: max lag must be below the path length");
  const auto q = calibrate(model, grid, c);
  std::vector<std::vector<double>> cov(c.batches);
  parallel_for(c.batches, c.threads,
               [&](std::size_t b) { cov[b] = batch_lag_covariances(model, grid, q, c, b); });
  TruthSpectrum truth(TruthProvenance::LagWindowMC, grid, c.max_lag, std::move(cov), q);
  for (const auto& w : truth.truncation_warnings()) {
    if (c.strict) throw DataError(w);
    if (warn) warn(w);
  }
  return truth;
}

namespace {

std::string cache_key(Model model, const QuantileGrid& grid, const TruthConfig& c) {
  std::ostringstream k;
  k.precision(17);
  k << "model=" << model_name(model) << ";levels=";
  for (std::size_t i = 0; i < grid.size(); ++i) k << (i ? "," : "") << grid[i];
  k << ";calibration_length=" << c.calibration_length << ";path_length=" << c.path_length
    << ";batches=" << c.batches << ";max_lag=" << c.max_lag << ";burn_in=" << c.burn_in
    << ";seed=" << c.seed << ";stream_version=" << kStreamVersion;
  return k.str();
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) h = (h ^ ch) * 0x100000001b3ULL;
  return mix64(h);
}

}  // namespace

void write_truth_csv(std::ostream& out, const TruthSpectrum& t, Model model, const TruthConfig& c) {
  out << "# qspec truth\n# key=" << cache_key(model, t.grid(), c) << "\n# quantiles=";
  char buf[64];
  for (std::size_t i = 0; i < t.quantiles().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", t.quantiles()[i]);
    out << (i ? "," : "") << buf;
  }
  out << "\nbatch,tau1,tau2,lag,gamma\n";
  const std::size_t L = t.grid().size();
  const auto K = static_cast<std::int64_t>(t.max_lag());
  for (std::size_t b = 0; b < t.batches(); ++b)
    for (std::size_t a1 = 0; a1 < L; ++a1)
      for (std::size_t a2 = a1; a2 < L; ++a2)
        for (std::int64_t k = -K; k <= K; ++k) {
          const double g = t.lag_covariances()[b][pair_index(a1, a2, L) * (2 * t.max_lag() + 1) +
                                                  static_cast<std::size_t>(k + K)];
          std::snprintf(buf, sizeof buf, "%.17g", g);
          char t1[32], t2[32];
          *std::to_chars(t1, t1 + sizeof t1 - 1, t.grid()[a1]).ptr = '\0';
          *std::to_chars(t2, t2 + sizeof t2 - 1, t.grid()[a2]).ptr = '\0';
          out << b << ',' << t1 << ',' << t2 << ',' << k << ',' << buf << '\n';
        }
}

TruthSpectrum read_truth_csv(std::istream& in) {
  std::string line;
  std::map<std::string, std::string> key;
  std::vector<double> quantiles;
  std::size_t lineno = 0;
  while (in.peek() == '#' && std::getline(in, line)) {
    ++lineno;
    if (line.rfind("# key=", 0) == 0) {
      std::istringstream ks(line.substr(6));
      std::string item;
      while (std::getline(ks, item, ';')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos) key[item.substr(0, eq)] = item.substr(eq + 1);
      }
    } else if (line.rfind("# quantiles=", 0) == 0) {
      std::istringstream qs(line.substr(12));
      std::string item;
      while (std::getline(qs, item, ',')) quantiles.push_back(std::strtod(item.c_str(), nullptr));
    }
  }
  if (!key.count("levels") || !key.count("max_lag") || !key.count("batches"))
    throw DataError("truth cache: missing header");
  std::vector<double> levels;
  {
    std::istringstream ls(key["levels"]);
    std::string item;
    while (std::getline(ls, item, ',')) levels.push_back(std::strtod(item.c_str(), nullptr));
  }
  QuantileGrid grid(levels);
  const std::size_t K = std::stoul(key["max_lag"]);
  const std::size_t B = std::stoul(key["batches"]);
  const std::size_t L = grid.size();
  std::vector<std::vector<double>> cov(B, std::vector<double>(pair_count(L) * (2 * K + 1)));
  std::getline(in, line);  // column header
  ++lineno;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    unsigned long long b = 0;
    double t1 = 0, t2 = 0, g = 0;
    long long k = 0;
    if (std::sscanf(line.c_str(), "%llu,%lf,%lf,%lld,%lf", &b, &t1, &t2, &k, &g) != 5)
      throw DataError("truth cache line " + std::to_string(lineno) + ": malformed row");
    const auto a1 = grid.find(t1), a2 = grid.find(t2);
    if (b >= B || !a1 || !a2 || *a1 > *a2 || std::llabs(k) > static_cast<long long>(K))
      throw DataError("truth cache line " + std::to_string(lineno) + ": row out of range");
    cov[b][pair_index(*a1, *a2, L) * (2 * K + 1) + static_cast<std::size_t>(k + static_cast<long long>(K))] = g;
    ++rows;
  }
  if (rows != B * pair_count(L) * (2 * K + 1)) throw DataError("truth cache: truncated file");
  return TruthSpectrum(TruthProvenance::LagWindowMC, grid, K, std::move(cov), std::move(quantiles));
}

std::filesystem::path default_cache_dir() {
  if (const char* d = std::getenv("QSPEC_CACHE_DIR"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "qspec";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "qspec";
  return std::filesystem::temp_directory_path() / "qspec";
}

TruthSpectrum cached_truth_spectrum(Model model, const QuantileGrid& grid, const TruthConfig& c,
                                    const std::filesystem::path& dir,
                                    const std::function<void(const std::string&)>& warn) {
  if (dir.empty()) return mc_truth_spectrum(model, grid, c, warn);
  const std::string key = cache_key(model, grid, c);
  char name[64];
  std::snprintf(name, sizeof name, "truth_%s_%016" PRIx64 ".csv", model_name(model).c_str(),
                hash_string(key));
  const auto file = dir / name;
  if (std::ifstream in(file); in) {
    try {
      std::string first, second;
      std::getline(in, first);
      std::getline(in, second);
      if (second == "# key=" + key) {
        in.seekg(0);
        auto t = read_truth_csv(in);
        for (const auto& w : t.truncation_warnings()) {
          if (c.strict) throw DataError(w);
          if (warn) warn(w);
        }
        return t;
      }
    } catch (const DataError&) {
      if (c.strict) throw;
    }
  }
  auto t = mc_truth_spectrum(model, grid, c, warn);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (out) write_truth_csv(out, t, model, c);
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec && warn) warn("truth: could not write cache " + file.string());
  return t;
}

double L2Spectrum::value(double omega) const {
  double s = autocorrelation.empty() ? 0.0 : autocorrelation[0];
  for (std::size_t k = 1; k < autocorrelation.size(); ++k)
    s += 2.0 * autocorrelation[k] * std::cos(omega * static_cast<double>(k));
  return s / (2.0 * pi);
}

L2Spectrum l2_spectrum(Model model, std::size_t path_length, std::size_t max_lag, std::uint64_t seed) {
  if (max_lag >= path_length) throw UsageError("l2_spectrum: max lag must be below the path length");
  auto y = simulate({model, path_length, 1000, mix64(seed ^ kTruthSeedSalt), 0});
  const double N = static_cast<double>(path_length);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= N;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= N;
  const double sd = std::sqrt(var);
  const std::size_t M = fft::next_pow2(path_length + max_lag + 1);
  std::vector<double> x(M, 0.0);
  for (std::size_t t = 0; t < path_length; ++t) x[t] = (y[t] - mean) / sd;
  auto X = fft::forward_real(x);
  for (auto& c : X) c = std::norm(c);
  std::vector<double> corr(M);
  fft::inverse_real(X, corr);
  L2Spectrum out;
  for (std::size_t k = 0; k <= max_lag; ++k)
    out.autocorrelation.push_back(corr[k] / static_cast<double>(M) / (N - static_cast<double>(k)));
  return out;
}

}  // namespace qspec
