#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

#include "qspec/analyze.hpp"
#include "qspec/coverage.hpp"
#include "qspec/error.hpp"
#include "qspec/oracle.hpp"
#include "qspec/simulate.hpp"

using namespace qspec;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCheck = 3;

struct Global {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string format = "csv";
  std::string out;
};

OutputFormat output_format(const Global& g) { return g.format == "json" ? OutputFormat::Json : OutputFormat::Csv; }

// Writes to --out when given, standard output otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw DataError("cannot open output file " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

NormalizerConvention parse_normalizer(const std::string& s) {
  if (s == "match") return NormalizerConvention::MatchEstimator;
  if (s == "exclude-target") return NormalizerConvention::ExcludeTarget;
  if (s == "leave-out") return NormalizerConvention::LeaveOut;
  throw UsageError("unknown normalizer '" + s + "'");
}

CovariancePrefactor parse_prefactor(const std::string& s) {
  if (s == "normalized") return CovariancePrefactor::Normalized;
  if (s == "literal") return CovariancePrefactor::Literal;
  throw UsageError("unknown prefactor '" + s + "'");
}

void warn(const std::string& s) { std::cerr << "warning: " << s << '\n'; }

std::vector<double> parse_omegas(const std::vector<std::string>& items) {
  // Accepts radians or "<p>/<q>pi" (e.g. 1/2pi, 0.25pi).
  std::vector<double> out;
  for (const auto& raw : items) {
    std::string s = raw;
    double scale = 1.0;
    if (s.size() > 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
      scale = std::numbers::pi;
      s.resize(s.size() - 2);
    }
    double v = 0.0;
    const auto slash = s.find('/');
    try {
      std::size_t pos = 0;
      if (slash == std::string::npos) {
        v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
      } else {
        const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        std::size_t p1 = 0, p2 = 0;
        v = std::stod(num, &p1) / std::stod(den, &p2);
        if (p1 != num.size() || p2 != den.size()) throw std::invalid_argument(s);
      }
    } catch (const std::exception&) {
      throw UsageError("cannot parse frequency '" + raw + "'");
    }
    out.push_back(v * scale);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-based copula spectral analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", g.out, "Output file (directory for figures); default standard output");

  // analyze
  auto* an = app.add_subcommand("analyze", "Estimate spectra of a single-column CSV series");
  std::string input;
  AnalyzeOptions ao;
  std::string bandwidth_rule = "paper-default";
  std::optional<double> bandwidth;
  std::string measure_file, ties = "stable", normalizer = "match", prefactor = "normalized", spectrum = "copula";
  std::vector<std::string> omega_items;
  an->add_option("input", input, "Input CSV ('-' for standard input)")->required();
  an->add_option("--levels", ao.levels, "Quantile levels")->delimiter(',');
  an->add_option("--kernel", ao.kernel, "Smoothing kernel")->check(CLI::IsMember({"order4", "epanechnikov"}))->capture_default_str();
  an->add_option("--bandwidth", bandwidth, "Explicit bandwidth b_n in (0, pi]");
  an->add_option("--bandwidth-rule", bandwidth_rule, "paper-default (0.4 n^-1/4) or explicit")
      ->check(CLI::IsMember({"paper-default", "default", "explicit"}))->capture_default_str();
  an->add_option("--alpha", ao.alpha, "Band level is 1 - alpha")->capture_default_str();
  an->add_option("--omega", omega_items, "Target frequencies (radians, or e.g. 1/2pi)")->delimiter(',');
  an->add_option("--spectrum", spectrum, "copula, spearman, blomqvist, gini")
      ->check(CLI::IsMember({"copula", "spearman", "blomqvist", "gini"}))->capture_default_str();
  an->add_option("--measure", measure_file, "Custom dependence measure file (atom/uniform/diag/antidiag lines)");
  an->add_flag("--raw", ao.raw, "Emit unsmoothed periodogram ordinates");
  an->add_option("--ties", ties, "stable or average-floor")->check(CLI::IsMember({"stable", "average-floor"}))->capture_default_str();
  an->add_option("--normalizer", normalizer, "match, exclude-target, leave-out")->capture_default_str();
  an->add_option("--prefactor", prefactor, "normalized or literal")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate replications of a test process");
  std::string model = "qar1";
  std::size_t sim_n = 1024, sim_reps = 1, burn_in = 1000;
  bool sim_long = false;
  sim->add_option("--model", model, "qar1, ar2, arch1, gausswn")->capture_default_str();
  sim->add_option("--n", sim_n, "Series length")->capture_default_str();
  sim->add_option("--reps", sim_reps, "Replications")->capture_default_str();
  sim->add_option("--burn-in", burn_in, "Discarded initial steps")->capture_default_str();
  sim->add_flag("--long", sim_long, "Long format (rep,t,value) instead of one column per replication");

  // coverage
  auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage study of the confidence bands");
  CoverageConfig cc;
  std::vector<std::string> model_names{"qar1", "ar2", "arch1"};
  bool check = false, no_cache = false, summary = false;
  std::string cache_dir, cov_normalizer = "match", cov_prefactor = "normalized";
  cov->add_option("--models", model_names, "Models")->delimiter(',');
  cov->add_option("--n-values", cc.n_values, "Series lengths")->delimiter(',');
  cov->add_option("--reps", cc.reps, "Replications per (model, n)")->capture_default_str();
  cov->add_option("--alpha", cc.alpha)->capture_default_str();
  cov->add_option("--tolerance", cc.tolerance, "Allowed |coverage - reference|")->capture_default_str();
  cov->add_option("--burn-in", cc.burn_in)->capture_default_str();
  cov->add_option("--normalizer", cov_normalizer)->capture_default_str();
  cov->add_option("--prefactor", cov_prefactor)->capture_default_str();
  cov->add_option("--truth-calibration", cc.truth.calibration_length)->capture_default_str();
  cov->add_option("--truth-path", cc.truth.path_length)->capture_default_str();
  cov->add_option("--truth-batches", cc.truth.batches)->capture_default_str();
  cov->add_option("--truth-lags", cc.truth.max_lag)->capture_default_str();
  cov->add_option("--cache-dir", cache_dir, "Truth cache directory");
  cov->add_flag("--no-cache", no_cache, "Recompute truth spectra");
  cov->add_flag("--strict", cc.truth.strict, "Treat truth truncation warnings as errors");
  cov->add_flag("--check", check, "Exit with status 3 unless every reference cell passes and deviations shrink in n");
  cov->add_flag("--summary", summary, "Print the table layout to standard error");

  // truth
  auto* tr = app.add_subcommand("truth", "Monte Carlo truth spectra");
  TruthConfig tc;
  std::string truth_model = "qar1";
  std::vector<double> truth_levels{0.1, 0.5, 0.9};
  std::vector<std::string> truth_omegas;
  std::string truth_cache;
  bool truth_no_cache = false;
  tr->add_option("--model", truth_model)->capture_default_str();
  tr->add_option("--levels", truth_levels)->delimiter(',');
  tr->add_option("--omega", truth_omegas, "Frequencies (radians, or e.g. 1/2pi)")->delimiter(',');
  tr->add_option("--calibration", tc.calibration_length)->capture_default_str();
  tr->add_option("--path", tc.path_length)->capture_default_str();
  tr->add_option("--batches", tc.batches)->capture_default_str();
  tr->add_option("--lags", tc.max_lag)->capture_default_str();
  tr->add_option("--cache-dir", truth_cache);
  tr->add_flag("--no-cache", truth_no_cache);
  tr->add_flag("--strict", tc.strict);

  // figures
  auto* fig = app.add_subcommand("figures", "Plot-ready truth and L2 spectrum curves");
  std::string fig_model = "qar1", fig_cache;
  FigureOptions fo;
  bool fig_no_cache = false;
  fig->add_option("--model", fig_model)->capture_default_str();
  fig->add_option("--points", fo.points)->capture_default_str();
  fig->add_option("--cache-dir", fig_cache);
  fig->add_flag("--no-cache", fig_no_cache);
  fig->add_option("--truth-calibration", fo.truth.calibration_length)->capture_default_str();
  fig->add_option("--truth-path", fo.truth.path_length)->capture_default_str();
  fig->add_option("--truth-batches", fo.truth.batches)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*an) {
      std::vector<double> values;
      if (input == "-") {
        values = read_series_csv(std::cin);
      } else {
        std::ifstream in(input);
        if (!in) throw DataError("cannot open " + input);
        values = read_series_csv(in);
      }
      if (bandwidth_rule == "explicit" && !bandwidth) throw UsageError("--bandwidth-rule explicit needs --bandwidth");
      if (bandwidth && bandwidth_rule != "explicit" && an->count("--bandwidth-rule"))
        throw UsageError("--bandwidth conflicts with --bandwidth-rule " + bandwidth_rule);
      ao.bandwidth = bandwidth;
      ao.ties = ties == "stable" ? TiePolicy::StableIndex : TiePolicy::AverageFloor;
      ao.normalizer = parse_normalizer(normalizer);
      ao.covariance.prefactor = parse_prefactor(prefactor);
      ao.omegas = parse_omegas(omega_items);
      ao.spectrum = parse_spectrum_kind(spectrum);
      if (!measure_file.empty()) {
        if (an->count("--spectrum")) throw UsageError("--measure and --spectrum are exclusive");
        std::ifstream in(measure_file);
        if (!in) throw DataError("cannot open measure file " + measure_file);
        ao.measure = DependenceMeasure::parse(in);
        ao.spectrum = SpectrumKind::Custom;
      }
      const AnalyzeResult res = analyze(values, ao);
      for (const auto& w : res.warnings) warn(w);
      Sink sink(g.out);
      res.write(sink.stream(), output_format(g));
      return 0;
    }

    if (*sim) {
      const Model m = parse_model(model);
      std::vector<std::vector<double>> cols;
      for (std::size_t r = 0; r < sim_reps; ++r) cols.push_back(simulate({m, sim_n, burn_in, g.seed, r}));
      Sink sink(g.out);
      std::ostream& out = sink.stream();
      if (g.format == "json") {
        out << "{\"model\": \"" << model_name(m) << "\", \"n\": " << sim_n << ", \"seed\": " << g.seed
            << ", \"replications\": [";
        for (std::size_t r = 0; r < cols.size(); ++r) {
          out << (r ? ", " : "") << '[';
          for (std::size_t t = 0; t < sim_n; ++t) out << (t ? ", " : "") << format_double(cols[r][t]);
          out << ']';
        }
        out << "]}\n";
      } else if (sim_long) {
        out << "rep,t,value\n";
        for (std::size_t r = 0; r < cols.size(); ++r)
          for (std::size_t t = 0; t < sim_n; ++t) out << r << ',' << t << ',' << format_double(cols[r][t]) << '\n';
      } else {
        for (std::size_t r = 0; r < cols.size(); ++r) out << (r ? "," : "") << "rep" << r;
        out << '\n';
        for (std::size_t t = 0; t < sim_n; ++t) {
          for (std::size_t r = 0; r < cols.size(); ++r) out << (r ? "," : "") << format_double(cols[r][t]);
          out << '\n';
        }
      }
      return 0;
    }

    if (*cov) {
      cc.models.clear();
      for (const auto& name : model_names) cc.models.push_back(parse_model(name));
      cc.seed = g.seed;
      cc.threads = g.threads;
      cc.normalizer = parse_normalizer(cov_normalizer);
      cc.covariance.prefactor = parse_prefactor(cov_prefactor);
      cc.cache_dir = no_cache ? std::filesystem::path() : (cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir));
      const auto t0 = std::chrono::steady_clock::now();
      const CoverageReport report = run_coverage(cc, [](const std::string& s) { std::cerr << s << '\n'; });
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      {
        Sink sink(g.out);
        if (g.format == "json") report.write_json(sink.stream());
        else report.write_csv(sink.stream());
      }
      if (summary) report.write_summary(std::cerr);
      std::fprintf(stderr, "coverage finished in %.1f s\n", secs);
      if (check && (!report.all_pass() || !report.deviation_nonincreasing())) {
        std::cerr << "check failed: " << (report.all_pass() ? "" : "reference cells outside tolerance; ")
                  << (report.deviation_nonincreasing() ? "" : "deviation not decreasing in n") << '\n';
        return kExitCheck;
      }
      return 0;
    }

    if (*tr) {
      const Model m = parse_model(truth_model);
      const QuantileGrid grid(truth_levels);
      tc.seed = g.seed;
      tc.threads = g.threads;
      const auto dir = truth_no_cache ? std::filesystem::path() : (truth_cache.empty() ? default_cache_dir() : std::filesystem::path(truth_cache));
      const TruthSpectrum t = m == Model::GaussWn ? analytic_white_noise_truth(grid)
                                                  : cached_truth_spectrum(m, grid, tc, dir, warn);
      std::vector<double> omegas = parse_omegas(truth_omegas);
      if (omegas.empty())
        for (const auto& w : CoverageConfig{}.omegas) omegas.push_back(std::numbers::pi * w.value());
      AnalyzeResult res;
      res.columns = {"tau1", "tau2", "omega", "re", "im", "se_re", "se_im"};
      for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = a; b < grid.size(); ++b)
          for (double w : omegas) {
            const cplx v = t.value(a, b, w);
            const auto se = t.standard_error(a, b, w);
            res.rows.push_back({grid[a], grid[b], w, v.real(), v.imag(), se ? se->first : 0.0, se ? se->second : 0.0});
          }
      Sink sink(g.out);
      res.write(sink.stream(), output_format(g));
      return 0;
    }

    if (*fig) {
      const Model m = parse_model(fig_model);
      fo.truth.seed = g.seed;
      fo.truth.threads = g.threads;
      fo.cache_dir = fig_no_cache ? std::filesystem::path() : (fig_cache.empty() ? default_cache_dir() : std::filesystem::path(fig_cache));
      const std::filesystem::path dir = g.out.empty() ? "figures" : g.out;
      for (const auto& p : write_figures(m, dir, fo, warn)) std::cout << p.string() << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
