#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qspec/inference.hpp"
#include "qspec/oracle.hpp"
#include "qspec/simulate.hpp"
#include "qspec/smoothing.hpp"

namespace qspec {

enum class Part { Re, Im };

/// One column of the coverage tables: a level pair and the part of the band checked.
struct CoverageColumn {
  double tau1, tau2;
  Part part;
  std::string label() const;
};

/// omega / pi as a fraction num / den.
struct OmegaFraction {
  std::int64_t num, den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string label() const;
  /// Fourier index j with 2 pi j / n = pi num / den; throws when n is not a multiple.
  std::int64_t fourier_index(std::size_t n) const;
};

struct CoverageConfig {
  std::vector<Model> models{Model::Qar1, Model::Ar2, Model::Arch1};
  std::vector<std::size_t> n_values{256, 512, 1024, 2048};
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::vector<OmegaFraction> omegas{{1, 8}, {1, 4}, {1, 2}, {3, 4}, {7, 8}};
  std::vector<CoverageColumn> columns{{0.1, 0.1, Part::Re},
                                      {0.1, 0.9, Part::Im},
                                      {0.5, 0.5, Part::Re},
                                      {0.1, 0.9, Part::Re},
                                      {0.9, 0.9, Part::Re}};
  std::uint64_t seed = 1;
  std::size_t burn_in = 1000;
  std::size_t threads = 1;
  double tolerance = 0.03;
  std::string kernel = "order4";
  NormalizerConvention normalizer = NormalizerConvention::MatchEstimator;
  CovarianceOptions covariance{};
  TruthConfig truth{};
  /// Empty disables the truth cache.
  std::filesystem::path cache_dir;

  void validate() const;
};

/// Reference coverage frequency for a table cell, if it is one of the
/// 4 x 3 x 5 x 5 reference cells.
std::optional<double> reference_coverage(Model model, std::size_t n, OmegaFraction omega,
                                         const CoverageColumn& column);

struct CoverageCell {
  Model model;
  std::size_t n;
  OmegaFraction omega;
  CoverageColumn column;
  std::size_t hits = 0;
  std::size_t reps = 0;
  double truth = 0.0;
  std::optional<double> truth_se;
  std::optional<double> reference;

  double coverage() const { return reps ? static_cast<double>(hits) / static_cast<double>(reps) : 0.0; }
  /// sqrt(p (1 - p) / reps) at the nominal level p = 1 - alpha.
  double binomial_se(double alpha) const;
  /// |coverage - reference| <= tolerance, when a reference exists.
  std::optional<bool> pass(double tolerance) const;
};

struct CoverageReport {
  CoverageConfig config;
  std::vector<CoverageCell> cells;
  std::vector<std::string> warnings;

  const CoverageCell* find(Model model, std::size_t n, OmegaFraction omega,
                           const CoverageColumn& column) const;
  /// Mean |coverage - (1 - alpha)| over the cells of one (model, n).
  double mean_abs_deviation(Model model, std::size_t n) const;
  /// For every model, mean_abs_deviation is nonincreasing along config.n_values.
  bool deviation_nonincreasing() const;
  /// All cells with a reference pass.
  bool all_pass() const;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
  /// Table layout: one block per n, rows model x omega, "ours (reference)" entries.
  void write_summary(std::ostream& out) const;
};

/// Monte Carlo coverage study. Replication r of (model, n) is simulated from
/// its own stream, so the report depends only on the config (not on threads).
CoverageReport run_coverage(const CoverageConfig& config,
                            const std::function<void(const std::string&)>& log = {});

/// Truth used for (model, grid): analytic for white noise, otherwise the
/// (cached) lag-window Monte Carlo oracle.
TruthSpectrum coverage_truth(Model model, const QuantileGrid& grid, const CoverageConfig& config,
                             const std::function<void(const std::string&)>& warn = {});

}  // namespace qspec
