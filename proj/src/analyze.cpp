#include "qspec/analyze.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string_view>

#include <json.hpp>

#include "qspec/error.hpp"
#include "qspec/kernel.hpp"
#include "qspec/normal.hpp"
#include "qspec/periodogram.hpp"

namespace qspec {

using std::numbers::pi;

std::string format_double(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::vector<double> read_series_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  std::size_t blank = 0;  // first blank line after data, if any
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view cell = trim(line);
    if (cell.empty()) {
      if (!first && blank == 0) blank = lineno;
      continue;
    }
    if (blank != 0) throw DataError("line " + std::to_string(blank) + ": empty cell");
    if (cell.find(',') != std::string_view::npos)
      throw DataError("line " + std::to_string(lineno) + ": expected a single column");
    const auto v = parse_number(cell);
    if (!v) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw DataError("line " + std::to_string(lineno) + ": '" + std::string(cell) + "' is not a number");
    }
    if (!std::isfinite(*v))
      throw DataError("line " + std::to_string(lineno) + ": non-finite value '" + std::string(cell) + "'");
    first = false;
    out.push_back(*v);
  }
  if (out.empty()) throw DataError("no numeric values found");
  return out;
}

SpectrumKind parse_spectrum_kind(const std::string& name) {
  if (name == "copula") return SpectrumKind::Copula;
  if (name == "spearman") return SpectrumKind::Spearman;
  if (name == "blomqvist") return SpectrumKind::Blomqvist;
  if (name == "gini") return SpectrumKind::Gini;
  if (name == "custom") return SpectrumKind::Custom;
  throw UsageError("unknown spectrum '" + name + "' (expected copula, spearman, blomqvist, gini)");
}

std::string spectrum_kind_name(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::Copula: return "copula";
    case SpectrumKind::Spearman: return "spearman";
    case SpectrumKind::Blomqvist: return "blomqvist";
    case SpectrumKind::Gini: return "gini";
    case SpectrumKind::Custom: return "custom";
  }
  return "?";
}

void AnalyzeResult::write(std::ostream& out, OutputFormat format) const {
  if (format == OutputFormat::Csv) {
    bool lead = false;
    for (const auto& c : text_columns) {
      out << (lead ? "," : "") << c;
      lead = true;
    }
    for (const auto& c : columns) {
      out << (lead ? "," : "") << c;
      lead = true;
    }
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
      bool sep = false;
      for (const auto& t : text.empty() ? std::vector<std::string>{} : text[r]) {
        out << (sep ? "," : "") << t;
        sep = true;
      }
      for (double v : rows[r]) {
        out << (sep ? "," : "") << format_double(v);
        sep = true;
      }
      out << '\n';
    }
    return;
  }
  nlohmann::ordered_json j;
  j["n"] = n;
  j["bandwidth"] = bandwidth;
  j["rows"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    nlohmann::ordered_json row;
    for (std::size_t c = 0; c < text_columns.size(); ++c) row[text_columns[c]] = text[r][c];
    for (std::size_t c = 0; c < columns.size(); ++c) row[columns[c]] = rows[r][c];
    j["rows"].push_back(std::move(row));
  }
  j["warnings"] = warnings;
  out << j.dump(2) << '\n';
}

namespace {

std::vector<std::int64_t> target_indices(std::size_t n, const std::vector<double>& omegas,
                                         std::vector<std::string>& warnings) {
  std::vector<std::int64_t> js;
  if (omegas.empty()) {
    for (std::int64_t j = 1; j <= static_cast<std::int64_t>((n - 1) / 2); ++j) js.push_back(j);
    return js;
  }
  for (const double w : omegas) {
    if (!std::isfinite(w)) throw UsageError("frequency must be finite");
    const std::int64_t j = nearest_fourier_index(w, n);
    if (j == 0) throw UsageError("frequency " + format_double(w) + " is 0 mod 2 pi, which is excluded");
    const double snapped = fourier_frequency(j, n);
    if (std::abs(std::remainder(w - snapped, 2.0 * pi)) > 1e-12) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "omega = %.10g is not a Fourier frequency; using 2 pi %lld / %zu = %.10g",
                    w, static_cast<long long>(j), n, snapped);
      warnings.emplace_back(buf);
    }
    js.push_back(j);
  }
  return js;
}

DependenceMeasure measure_for(const AnalyzeOptions& o) {
  switch (o.spectrum) {
    case SpectrumKind::Spearman: return DependenceMeasure::spearman();
    case SpectrumKind::Blomqvist: return DependenceMeasure::blomqvist();
    case SpectrumKind::Gini: return DependenceMeasure::gini();
    case SpectrumKind::Custom:
      if (!o.measure) throw UsageError("custom spectrum needs a measure file");
      return *o.measure;
    case SpectrumKind::Copula: break;
  }
  throw UsageError("copula spectrum has no measure");
}

}  // namespace

AnalyzeResult analyze(const std::vector<double>& values, const AnalyzeOptions& o) {
  if (values.size() < 8) throw DataError("series needs at least 8 observations, got " + std::to_string(values.size()));
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  const std::size_t n = values.size();
  const RankedSeries series = rank_transform(values, o.ties);
  const SmoothingKernel kernel = SmoothingKernel::from_name(o.kernel);
  const double b = o.bandwidth ? Bandwidth::explicit_value(*o.bandwidth).value() : Bandwidth::standard(n).value();

  AnalyzeResult res;
  res.n = n;
  res.bandwidth = b;
  const auto js = target_indices(n, o.omegas, res.warnings);

  if (o.spectrum == SpectrumKind::Copula) {
    const QuantileGrid grid(o.levels);
    const auto ind = indicator_matrix(series, grid);
    const std::size_t L = grid.size();
    if (o.raw) {
      std::vector<std::int64_t> unique = js;
      std::sort(unique.begin(), unique.end());
      unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
      const FrequencyGrid freq(n, unique);
      const auto field = cr_field(ind, freq);
      res.columns = {"tau1", "tau2", "omega", "re", "im"};
      for (std::size_t a = 0; a < L; ++a)
        for (std::size_t c = a; c < L; ++c)
          for (const auto j : js) {
            const cplx v = field.at(a, c, *freq.position(j));
            res.rows.push_back({grid[a], grid[c], fourier_frequency(j, n), v.real(), v.imag()});
          }
      return res;
    }
    const auto field = cr_field(ind, FrequencyGrid::smoothing_support(n));
    const SmoothedSpectrum est(field, kernel, b, o.normalizer);
    res.columns = {"tau1", "tau2", "omega", "re", "im", "re_lo", "re_hi", "im_lo", "im_hi"};
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t c = a; c < L; ++c)
        for (const auto j : js) {
          const CiBand band = confidence_band(est, a, c, j, o.alpha, o.covariance);
          res.rows.push_back({grid[a], grid[c], fourier_frequency(j, n), band.center.real(),
                              band.center.imag(), band.re_low, band.re_high, band.im_low, band.im_high});
        }
    return res;
  }

  const DependenceMeasure mu = measure_for(o);
  std::vector<double> omegas;
  for (const auto j : js) omegas.push_back(fourier_frequency(j, n));
  if (o.raw) {
    const auto all = measure_periodogram_all(series, mu);
    res.text_columns = {"spectrum"};
    res.columns = {"omega", "re", "im"};
    for (const auto j : js) {
      const cplx v = all[static_cast<std::size_t>(j - 1)];
      res.text.push_back({spectrum_kind_name(o.spectrum)});
      res.rows.push_back({fourier_frequency(j, n), v.real(), v.imag()});
    }
    return res;
  }
  MeasureSpectrumOptions mo;
  mo.normalizer = o.normalizer;
  const auto pts = smoothed_measure_spectrum(series, mu, kernel, b, omegas, mo);
  const double z = normal_quantile(1.0 - o.alpha / 2.0);
  const double nb = static_cast<double>(n) * b;
  res.text_columns = {"spectrum"};
  res.columns = {"omega", "re", "im", "re_lo", "re_hi", "sigma2"};
  for (const auto& p : pts) {
    const cplx center = p.normalized.value_or(p.raw);
    const double var = std::max(0.0, p.variance.value_or(0.0));
    const double half = z * std::sqrt(var / nb);
    res.text.push_back({spectrum_kind_name(o.spectrum)});
    res.rows.push_back({p.omega, center.real(), center.imag(), center.real() - half, center.real() + half, var});
  }
  return res;
}

std::vector<std::filesystem::path> write_figures(Model model, const std::filesystem::path& dir,
                                                 const FigureOptions& o,
                                                 const std::function<void(const std::string&)>& warn) {
  std::filesystem::create_directories(dir);
  const QuantileGrid grid(o.levels);
  const TruthSpectrum truth = model == Model::GaussWn
                                  ? analytic_white_noise_truth(grid)
                                  : cached_truth_spectrum(model, grid, o.truth, o.cache_dir, warn);
  const std::string provenance =
      truth.provenance() == TruthProvenance::AnalyticWhiteNoise ? "analytic" : "simulated";
  const auto copula = dir / ("copula_" + model_name(model) + ".csv");
  const auto l2 = dir / ("l2_" + model_name(model) + ".csv");
  std::vector<double> xs;
  for (std::size_t i = 1; i <= o.points; ++i)
    xs.push_back(static_cast<double>(i) / (2.0 * static_cast<double>(o.points + 1)));
  {
    std::ofstream out(copula);
    if (!out) throw DataError("cannot write " + copula.string());
    out << "x,tau1,tau2,part,value,se,provenance\n";
    for (std::size_t a = 0; a < grid.size(); ++a)
      for (std::size_t c = 0; c < grid.size(); ++c) {
        const bool re = grid[c] <= grid[a];
        for (const double x : xs) {
          const double omega = 2.0 * pi * x;
          const cplx v = truth.value(a, c, omega);
          const auto se = truth.standard_error(a, c, omega);
          out << format_double(x) << ',' << grid[a] << ',' << grid[c] << ',' << (re ? "re" : "im") << ','
              << format_double(re ? v.real() : v.imag()) << ','
              << (se ? format_double(re ? se->first : se->second) : "") << ',' << provenance << '\n';
        }
      }
  }
  {
    // Rank-based curves are scale invariant; the L2 curve uses the series
    // standardized by its sample moments.
    const L2Spectrum s = l2_spectrum(model, o.l2_path_length, o.l2_max_lag, o.truth.seed);
    std::ofstream out(l2);
    if (!out) throw DataError("cannot write " + l2.string());
    out << "x,value\n";
    for (const double x : xs) out << format_double(x) << ',' << format_double(s.value(2.0 * pi * x)) << '\n';
  }
  return {copula, l2};
}

}  // namespace qspec
