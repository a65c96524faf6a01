#include "qspec/coverage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include <json.hpp>

#include "qspec/error.hpp"
#include "qspec/kernel.hpp"
#include "qspec/periodogram.hpp"
#include "qspec/ranks.hpp"
#include "qspec/rng.hpp"

namespace qspec {

using std::numbers::pi;

namespace {

// Reference coverage frequencies, indexed [n][model][omega][column] with
// n in {256, 512, 1024, 2048}, models QAR(1), AR(2), ARCH(1),
// omega / pi in {1/8, 1/4, 1/2, 3/4, 7/8} and the five default columns.
constexpr double kReference[4][3][5][5] = {
    {{{0.911, 0.921, 0.906, 0.987, 0.899},
      {0.934, 0.917, 0.920, 0.979, 0.910},
      {0.947, 0.919, 0.932, 0.976, 0.915},
      {0.946, 0.918, 0.927, 0.979, 0.916},
      {0.941, 0.915, 0.931, 0.979, 0.921}},
     {{0.913, 0.926, 0.900, 0.975, 0.916},
      {0.935, 0.925, 0.917, 0.967, 0.940},
      {0.940, 0.927, 0.929, 0.966, 0.949},
      {0.939, 0.924, 0.928, 0.969, 0.947},
      {0.937, 0.920, 0.928, 0.972, 0.945}},
     {{0.860, 0.910, 0.906, 0.902, 0.878},
      {0.872, 0.905, 0.922, 0.909, 0.887},
      {0.902, 0.897, 0.937, 0.946, 0.914},
      {0.906, 0.894, 0.934, 0.959, 0.924},
      {0.906, 0.891, 0.935, 0.962, 0.920}}},
    {{{0.934, 0.932, 0.915, 0.974, 0.916},
      {0.953, 0.933, 0.931, 0.968, 0.925},
      {0.954, 0.932, 0.940, 0.968, 0.934},
      {0.952, 0.926, 0.939, 0.973, 0.932},
      {0.953, 0.923, 0.941, 0.975, 0.934}},
     {{0.930, 0.934, 0.913, 0.962, 0.932},
      {0.950, 0.932, 0.928, 0.956, 0.951},
      {0.948, 0.935, 0.933, 0.957, 0.949},
      {0.951, 0.932, 0.936, 0.964, 0.952},
      {0.949, 0.931, 0.937, 0.965, 0.955}},
     {{0.890, 0.932, 0.918, 0.913, 0.892},
      {0.900, 0.924, 0.938, 0.917, 0.903},
      {0.922, 0.912, 0.939, 0.948, 0.928},
      {0.926, 0.913, 0.944, 0.957, 0.934},
      {0.928, 0.908, 0.943, 0.958, 0.937}}},
    {{{0.942, 0.943, 0.933, 0.961, 0.924},
      {0.959, 0.938, 0.941, 0.963, 0.929},
      {0.953, 0.938, 0.941, 0.962, 0.934},
      {0.954, 0.935, 0.941, 0.967, 0.933},
      {0.956, 0.935, 0.943, 0.969, 0.936}},
     {{0.939, 0.943, 0.931, 0.953, 0.940},
      {0.954, 0.939, 0.942, 0.954, 0.952},
      {0.954, 0.944, 0.945, 0.953, 0.955},
      {0.950, 0.937, 0.942, 0.956, 0.954},
      {0.954, 0.937, 0.940, 0.959, 0.952}},
     {{0.900, 0.935, 0.933, 0.911, 0.906},
      {0.901, 0.930, 0.945, 0.916, 0.908},
      {0.929, 0.928, 0.945, 0.942, 0.928},
      {0.941, 0.916, 0.948, 0.954, 0.937},
      {0.940, 0.918, 0.948, 0.953, 0.936}}},
    {{{0.953, 0.945, 0.944, 0.957, 0.933},
      {0.957, 0.943, 0.945, 0.961, 0.932},
      {0.955, 0.938, 0.949, 0.960, 0.938},
      {0.952, 0.938, 0.946, 0.963, 0.939},
      {0.954, 0.936, 0.945, 0.964, 0.945}},
     {{0.953, 0.944, 0.943, 0.954, 0.947},
      {0.954, 0.944, 0.945, 0.953, 0.956},
      {0.955, 0.946, 0.945, 0.951, 0.954},
      {0.954, 0.947, 0.940, 0.954, 0.957},
      {0.952, 0.945, 0.943, 0.956, 0.951}},
     {{0.911, 0.942, 0.944, 0.918, 0.908},
      {0.918, 0.937, 0.950, 0.926, 0.917},
      {0.934, 0.931, 0.947, 0.946, 0.937},
      {0.944, 0.931, 0.949, 0.954, 0.943},
      {0.944, 0.928, 0.950, 0.958, 0.945}}},
};

constexpr OmegaFraction kReferenceOmegas[5] = {{1, 8}, {1, 4}, {1, 2}, {3, 4}, {7, 8}};
const CoverageColumn kReferenceColumns[5] = {{0.1, 0.1, Part::Re},
                                             {0.1, 0.9, Part::Im},
                                             {0.5, 0.5, Part::Re},
                                             {0.1, 0.9, Part::Re},
                                             {0.9, 0.9, Part::Re}};

bool same_fraction(OmegaFraction a, OmegaFraction b) { return a.num * b.den == b.num * a.den; }
bool same_column(const CoverageColumn& a, const CoverageColumn& b) {
  return a.tau1 == b.tau1 && a.tau2 == b.tau2 && a.part == b.part;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + ' ' : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string CoverageColumn::label() const {
  return "(" + fmt("%g", tau1) + "," + fmt("%g", tau2) + ")" + (part == Part::Re ? "Re" : "Im");
}

std::string OmegaFraction::label() const { return std::to_string(num) + "/" + std::to_string(den); }

std::int64_t OmegaFraction::fourier_index(std::size_t n) const {
  // pi num / den = 2 pi j / n  <=>  j = n num / (2 den)
  const auto nn = static_cast<std::int64_t>(n);
  if ((nn * num) % (2 * den) != 0)
    throw UsageError("omega/pi = " + label() + " is not a Fourier frequency for n = " + std::to_string(n));
  return nn * num / (2 * den);
}

void CoverageConfig::validate() const {
  if (reps < 1) throw UsageError("coverage: reps must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("coverage: alpha must lie in (0, 1)");
  if (models.empty() || n_values.empty() || omegas.empty() || columns.empty())
    throw UsageError("coverage: empty model, n, omega or column list");
  for (auto n : n_values) {
    if (n < 8) throw UsageError("coverage: n must be >= 8");
    for (const auto& w : omegas) {
      const auto j = w.fourier_index(n);
      if (j % static_cast<std::int64_t>(n) == 0) throw UsageError("coverage: omega = 0 mod 2 pi is excluded");
    }
  }
  for (const auto& c : columns)
    if (!(c.tau1 >= 0 && c.tau1 <= 1 && c.tau2 >= 0 && c.tau2 <= 1))
      throw UsageError("coverage: levels must lie in [0, 1]");
}

std::optional<double> reference_coverage(Model model, std::size_t n, OmegaFraction omega,
                                         const CoverageColumn& column) {
  int ni = -1;
  switch (n) {
    case 256: ni = 0; break;
    case 512: ni = 1; break;
    case 1024: ni = 2; break;
    case 2048: ni = 3; break;
    default: return std::nullopt;
  }
  int mi = -1;
  switch (model) {
    case Model::Qar1: mi = 0; break;
    case Model::Ar2: mi = 1; break;
    case Model::Arch1: mi = 2; break;
    case Model::GaussWn: return std::nullopt;
  }
  for (int w = 0; w < 5; ++w) {
    if (!same_fraction(kReferenceOmegas[w], omega)) continue;
    for (int c = 0; c < 5; ++c)
      if (same_column(kReferenceColumns[c], column)) return kReference[ni][mi][w][c];
  }
  return std::nullopt;
}

double CoverageCell::binomial_se(double alpha) const {
  const double p = 1.0 - alpha;
  return reps ? std::sqrt(p * (1.0 - p) / static_cast<double>(reps)) : 0.0;
}

std::optional<bool> CoverageCell::pass(double tolerance) const {
  if (!reference) return std::nullopt;
  return std::abs(coverage() - *reference) <= tolerance;
}

const CoverageCell* CoverageReport::find(Model model, std::size_t n, OmegaFraction omega,
                                         const CoverageColumn& column) const {
  for (const auto& c : cells)
    if (c.model == model && c.n == n && same_fraction(c.omega, omega) && same_column(c.column, column))
      return &c;
  return nullptr;
}

double CoverageReport::mean_abs_deviation(Model model, std::size_t n) const {
  double s = 0.0;
  std::size_t k = 0;
  for (const auto& c : cells)
    if (c.model == model && c.n == n) {
      s += std::abs(c.coverage() - (1.0 - config.alpha));
      ++k;
    }
  return k ? s / static_cast<double>(k) : 0.0;
}

bool CoverageReport::deviation_nonincreasing() const {
  std::vector<std::size_t> ns = config.n_values;
  std::sort(ns.begin(), ns.end());
  for (auto m : config.models)
    for (std::size_t i = 1; i < ns.size(); ++i)
      if (mean_abs_deviation(m, ns[i]) > mean_abs_deviation(m, ns[i - 1])) return false;
  return true;
}

bool CoverageReport::all_pass() const {
  for (const auto& c : cells)
    if (auto p = c.pass(config.tolerance); p && !*p) return false;
  return true;
}

void CoverageReport::write_csv(std::ostream& out) const {
  out << "model,n,omega_over_pi,tau1,tau2,part,reps,hits,coverage,binomial_se,truth,truth_se,"
         "reference,deviation,pass\n";
  for (const auto& c : cells) {
    out << model_name(c.model) << ',' << c.n << ',' << c.omega.label() << ',' << fmt("%g", c.column.tau1)
        << ',' << fmt("%g", c.column.tau2) << ',' << (c.column.part == Part::Re ? "re" : "im") << ','
        << c.reps << ',' << c.hits << ',' << fmt("%.6f", c.coverage()) << ','
        << fmt("%.6f", c.binomial_se(config.alpha)) << ',' << fmt("%.10g", c.truth) << ','
        << (c.truth_se ? fmt("%.3g", *c.truth_se) : "") << ','
        << (c.reference ? fmt("%.3f", *c.reference) : "") << ','
        << (c.reference ? fmt("%.6f", c.coverage() - *c.reference) : "") << ',';
    if (auto p = c.pass(config.tolerance)) out << (*p ? "pass" : "fail");
    out << '\n';
  }
}

void CoverageReport::write_json(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["reps"] = config.reps;
  j["alpha"] = config.alpha;
  j["seed"] = config.seed;
  j["tolerance"] = config.tolerance;
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json e;
    e["model"] = model_name(c.model);
    e["n"] = c.n;
    e["omega_over_pi"] = c.omega.label();
    e["tau1"] = c.column.tau1;
    e["tau2"] = c.column.tau2;
    e["part"] = c.column.part == Part::Re ? "re" : "im";
    e["reps"] = c.reps;
    e["hits"] = c.hits;
    e["coverage"] = c.coverage();
    e["binomial_se"] = c.binomial_se(config.alpha);
    e["truth"] = c.truth;
    e["truth_se"] = c.truth_se ? nlohmann::ordered_json(*c.truth_se) : nlohmann::ordered_json();
    e["reference"] = c.reference ? nlohmann::ordered_json(*c.reference) : nlohmann::ordered_json();
    if (auto p = c.pass(config.tolerance)) e["pass"] = *p;
    j["cells"].push_back(std::move(e));
  }
  j["mean_abs_deviation"] = nlohmann::ordered_json::object();
  for (auto m : config.models)
    for (auto n : config.n_values)
      j["mean_abs_deviation"][model_name(m)][std::to_string(n)] = mean_abs_deviation(m, n);
  j["deviation_nonincreasing"] = deviation_nonincreasing();
  j["warnings"] = warnings;
  out << j.dump(2) << '\n';
}

void CoverageReport::write_summary(std::ostream& out) const {
  for (auto n : config.n_values) {
    out << "n = " << n << ", reps = " << config.reps << ", 1 - alpha = " << fmt("%g", 1.0 - config.alpha)
        << "\n";
    out << pad("model", 8) << pad("w/pi", 7);
    for (const auto& col : config.columns) out << pad(col.label(), 18);
    out << '\n';
    for (auto m : config.models) {
      for (const auto& w : config.omegas) {
        out << pad(model_name(m), 8) << pad(w.label(), 7);
        for (const auto& col : config.columns) {
          const CoverageCell* c = find(m, n, w, col);
          std::string s = c ? fmt("%.3f", c->coverage()) : "-";
          if (c && c->reference) s += " (" + fmt("%.3f", *c->reference) + ")";
          out << pad(s, 18);
        }
        out << '\n';
      }
    }
    out << '\n';
  }
}

TruthSpectrum coverage_truth(Model model, const QuantileGrid& grid, const CoverageConfig& config,
                             const std::function<void(const std::string&)>& warn) {
  if (model == Model::GaussWn) return analytic_white_noise_truth(grid);
  TruthConfig tc = config.truth;
  tc.threads = std::max(tc.threads, config.threads);
  return cached_truth_spectrum(model, grid, tc, config.cache_dir, warn);
}

namespace {

// Coverage indicators for one replication, one byte per (omega, column).
void replicate(const ModelSpec& spec, const QuantileGrid& grid, const std::vector<std::size_t>& col_a,
               const std::vector<std::size_t>& col_b, const std::vector<std::int64_t>& js,
               const std::vector<std::vector<double>>& truth, const CoverageConfig& config,
               const SmoothingKernel& kernel, double bandwidth, std::uint8_t* out) {
  const auto y = simulate(spec);
  const auto ranked = rank_transform(y);
  const auto ind = indicator_matrix(ranked, grid);
  const auto field = cr_field(ind, FrequencyGrid::smoothing_support(spec.n));
  const SmoothedSpectrum est(field, kernel, bandwidth, config.normalizer);
  const std::size_t C = config.columns.size();
  for (std::size_t w = 0; w < js.size(); ++w)
    for (std::size_t c = 0; c < C; ++c) {
      const CiBand band = confidence_band(est, col_a[c], col_b[c], js[w], config.alpha, config.covariance);
      const double t = truth[w][c];
      out[w * C + c] = config.columns[c].part == Part::Re ? band.contains_re(t) : band.contains_im(t);
    }
}

}  // namespace

CoverageReport run_coverage(const CoverageConfig& config,
                            const std::function<void(const std::string&)>& log) {
  config.validate();
  CoverageReport report;
  report.config = config;
  auto warn = [&](const std::string& w) {
    report.warnings.push_back(w);
    if (log) log("warning: " + w);
  };

  std::set<double> level_set;
  for (const auto& c : config.columns) {
    level_set.insert(c.tau1);
    level_set.insert(c.tau2);
  }
  const QuantileGrid grid(std::vector<double>(level_set.begin(), level_set.end()));
  std::vector<std::size_t> col_a, col_b;
  for (const auto& c : config.columns) {
    col_a.push_back(*grid.find(c.tau1));
    col_b.push_back(*grid.find(c.tau2));
  }
  const SmoothingKernel kernel = SmoothingKernel::from_name(config.kernel);
  const std::size_t W = config.omegas.size();
  const std::size_t C = config.columns.size();

  for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
    const Model model = config.models[mi];
    if (log) log("truth for " + model_name(model));
    const TruthSpectrum truth = coverage_truth(model, grid, config, warn);

    std::vector<std::vector<double>> tvals(W, std::vector<double>(C));
    std::vector<std::vector<std::optional<double>>> tses(W, std::vector<std::optional<double>>(C));
    for (std::size_t w = 0; w < W; ++w)
      for (std::size_t c = 0; c < C; ++c) {
        const double omega = pi * config.omegas[w].value();
        const cplx v = truth.value(col_a[c], col_b[c], omega);
        const bool re = config.columns[c].part == Part::Re;
        tvals[w][c] = re ? v.real() : v.imag();
        if (auto se = truth.standard_error(col_a[c], col_b[c], omega)) tses[w][c] = re ? se->first : se->second;
      }

    for (const std::size_t n : config.n_values) {
      if (log) log("coverage " + model_name(model) + " n=" + std::to_string(n));
      std::vector<std::int64_t> js;
      for (const auto& w : config.omegas) js.push_back(w.fourier_index(n));
      const double bandwidth = Bandwidth::standard(n).value();
      const std::uint64_t seed = stream_seed(config.seed, n, 16 + static_cast<std::uint64_t>(model));

      std::vector<std::uint8_t> hits(config.reps * W * C);
      std::atomic<std::size_t> next{0};
      std::exception_ptr error;
      std::mutex error_mutex;
      auto worker = [&] {
        for (std::size_t r; (r = next++) < config.reps;) {
          try {
            ModelSpec spec{model, n, config.burn_in, seed, r};
            replicate(spec, grid, col_a, col_b, js, tvals, config, kernel, bandwidth, &hits[r * W * C]);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      };
      const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, config.reps));
      if (threads == 1) {
        worker();
      } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
      }
      if (error) std::rethrow_exception(error);

      for (std::size_t w = 0; w < W; ++w)
        for (std::size_t c = 0; c < C; ++c) {
          CoverageCell cell{model, n, config.omegas[w], config.columns[c], 0, 0, 0.0, std::nullopt, std::nullopt};
          cell.reps = config.reps;
          for (std::size_t r = 0; r < config.reps; ++r) cell.hits += hits[r * W * C + w * C + c];
          cell.truth = tvals[w][c];
          cell.truth_se = tses[w][c];
          cell.reference = reference_coverage(model, n, config.omegas[w], config.columns[c]);
          report.cells.push_back(cell);
        }
    }
  }
  return report;
}

}  // namespace qspec
