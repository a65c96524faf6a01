#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qspec/inference.hpp"
#include "qspec/oracle.hpp"
#include "qspec/rank_spectra.hpp"
#include "qspec/ranks.hpp"
#include "qspec/smoothing.hpp"

namespace qspec {

/// Reads a single-column CSV of finite numbers. A non-numeric first row is
/// taken as a header. Empty, non-numeric or non-finite cells and extra
/// columns raise DataError naming the line.
std::vector<double> read_series_csv(std::istream& in);

enum class SpectrumKind { Copula, Spearman, Blomqvist, Gini, Custom };
SpectrumKind parse_spectrum_kind(const std::string& name);
std::string spectrum_kind_name(SpectrumKind kind);

enum class OutputFormat { Csv, Json };

struct AnalyzeOptions {
  std::vector<double> levels{0.1, 0.5, 0.9};
  std::string kernel = "order4";
  /// Explicit bandwidth; otherwise 0.4 n^{-1/4}.
  std::optional<double> bandwidth;
  double alpha = 0.05;
  /// Target frequencies in radians; default is 2 pi j / n, j = 1..floor((n-1)/2).
  std::vector<double> omegas;
  SpectrumKind spectrum = SpectrumKind::Copula;
  /// Used when spectrum == Custom.
  std::optional<DependenceMeasure> measure;
  /// Emit the raw CR-periodogram instead of smoothed estimates (copula only).
  bool raw = false;
  TiePolicy ties = TiePolicy::StableIndex;
  NormalizerConvention normalizer = NormalizerConvention::MatchEstimator;
  CovarianceOptions covariance{};
};

/// Results of one analysis, one row per (pair, frequency) or per frequency.
struct AnalyzeResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> text_columns;  // leading text columns (e.g. spectrum name)
  std::vector<std::vector<std::string>> text;
  std::vector<std::string> warnings;
  std::size_t n = 0;
  double bandwidth = 0.0;

  void write(std::ostream& out, OutputFormat format) const;
};

/// Full pipeline: rank, clipped DFTs, CR-periodogram, smoothing and bands
/// (or measure spectra with plug-in bands G +- z sqrt(sigma^2 / (n b))).
/// Off-grid frequencies snap to the nearest Fourier frequency with a warning;
/// frequencies equal to 0 mod 2 pi are rejected.
AnalyzeResult analyze(const std::vector<double>& values, const AnalyzeOptions& options);

struct FigureOptions {
  std::vector<double> levels{0.1, 0.5, 0.9};
  std::size_t points = 99;  // x = omega / (2 pi) = i / (2 (points + 1)), i = 1..points
  TruthConfig truth{};
  std::filesystem::path cache_dir;
  std::size_t l2_path_length = 1'000'000;
  std::size_t l2_max_lag = 100;
};

/// Writes copula_<model>.csv (x, tau1, tau2, part, value, se, provenance) and
/// l2_<model>.csv (x, value) into dir. Real parts for tau2 <= tau1, imaginary
/// parts for tau2 > tau1. Returns the written paths.
std::vector<std::filesystem::path> write_figures(Model model, const std::filesystem::path& dir,
                                                 const FigureOptions& options,
                                                 const std::function<void(const std::string&)>& warn = {});

/// Shortest representation that reads back to the same double.
std::string format_double(double x);

}  // namespace qspec
