#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "qspec/error.hpp"
#include "qspec/oracle.hpp"

using namespace qspec;
using Catch::Approx;
using std::numbers::pi;

namespace {

TruthConfig small_config() {
  TruthConfig c;
  c.calibration_length = 200'000;
  c.path_length = 100'000;
  c.batches = 10;
  c.max_lag = 30;
  return c;
}

const std::vector<double> kOmegas{pi / 8, pi / 4, pi / 2, 3 * pi / 4, 7 * pi / 8};

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("qspec_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("white-noise copula spectrum", "[oracle]") {
  REQUIRE(white_noise_spectrum(0.5, 0.5) == Approx(0.0397887).margin(1e-7));
  REQUIRE(white_noise_spectrum(0.1, 0.9) == Approx(0.0015915).margin(1e-7));
  REQUIRE(white_noise_spectrum(0.9, 0.1) == white_noise_spectrum(0.1, 0.9));
  REQUIRE(white_noise_spectrum(0.0, 0.4) == 0.0);
  REQUIRE(white_noise_spectrum(1.0, 0.4) == 0.0);
  auto t = analytic_white_noise_truth(QuantileGrid({0.1, 0.5}));
  REQUIRE(t.provenance() == TruthProvenance::AnalyticWhiteNoise);
  REQUIRE(t.value(0, 1, 1.0).real() == Approx(white_noise_spectrum(0.1, 0.5)).epsilon(1e-14));
  REQUIRE(t.value(0, 1, 1.0).imag() == 0.0);
  REQUIRE_FALSE(t.standard_error(0, 1, 1.0).has_value());
}

TEST_CASE("naive CR-periodogram", "[oracle]") {
  std::vector<double> y{1, 2, 3, 4};
  REQUIRE(naive_cr_periodogram(y, 0.5, 0.5, pi / 2).real() == Approx(2.0 / (8.0 * pi)).epsilon(1e-14));
  REQUIRE(naive_cr_periodogram(y, 0.0, 0.5, pi / 2) == cplx(0.0, 0.0));
  // exact rational levels: 0.3 * 10 must count 3 ranks
  std::vector<double> z{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  REQUIRE(naive_cr_periodogram(z, 0.3, 0.3, 0.0).real() == Approx(9.0 / (2 * pi * 10)).epsilon(1e-14));
}

TEST_CASE("truth spectrum assembly", "[oracle]") {
  // one level, K = 1: gamma_0 = 0.2, gamma_{+1} = 0.05, gamma_{-1} = 0.03
  std::vector<std::vector<double>> cov{{0.03, 0.2, 0.05}, {0.03, 0.2, 0.05}};
  TruthSpectrum t(TruthProvenance::LagWindowMC, QuantileGrid({0.5}), 1, cov);
  for (double w : {0.3, 1.2, 2.9}) {
    const cplx want = (0.2 + 0.05 * std::polar(1.0, -w) + 0.03 * std::polar(1.0, w)) / (2 * pi);
    REQUIRE(t.value(0, 0, w).real() == Approx(want.real()).epsilon(1e-14));
    REQUIRE(t.value(0, 0, w).imag() == 0.0);  // stored real on the diagonal
    REQUIRE(t.standard_error(0, 0, w)->first == 0.0);
  }
  REQUIRE(t.gamma(0, 0, 1) == 0.05);
  REQUIRE(t.gamma(0, 0, 2) == 0.0);
  REQUIRE_THROWS_AS(TruthSpectrum(TruthProvenance::LagWindowMC, QuantileGrid({0.5}), 2, cov), DataError);

  SECTION("truncation warnings") {
    std::vector<std::vector<double>> big{{0.1, 0.2, 0.1}, {0.11, 0.2, 0.12}, {0.09, 0.2, 0.1}};
    TruthSpectrum w(TruthProvenance::LagWindowMC, QuantileGrid({0.5}), 1, big);
    REQUIRE(w.truncation_warnings().size() == 2);
    std::vector<std::vector<double>> small{{0.001, 0.2, -0.002}, {-0.001, 0.2, 0.002}, {0.0, 0.2, 0.0}};
    TruthSpectrum ok(TruthProvenance::LagWindowMC, QuantileGrid({0.5}), 1, small);
    REQUIRE(ok.truncation_warnings().empty());
  }
}

TEST_CASE("Monte Carlo truth reproduces white noise", "[oracle][montecarlo]") {
  // The SE comes from 20 batch means, so "3 SE" is taken at the same tail
  // probability under Student t with 19 degrees of freedom.
  const double k3 = 3.4472331506037124;
  QuantileGrid g({0.1, 0.5, 0.9});
  auto c = small_config();
  c.batches = 20;
  auto truth = mc_truth_spectrum(Model::GaussWn, g, c);
  REQUIRE(truth.provenance() == TruthProvenance::LagWindowMC);
  REQUIRE(truth.quantiles().size() == 3);
  REQUIRE(truth.quantiles()[1] == Approx(0.0).margin(0.01));
  REQUIRE(truth.quantiles()[0] == Approx(-1.2815515655).margin(0.02));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (double w : kOmegas) {
        const cplx v = truth.value(a, b, w);
        const auto se = *truth.standard_error(a, b, w);
        REQUIRE(std::abs(v.real() - white_noise_spectrum(g[a], g[b])) <= k3 * se.first);
        REQUIRE(std::abs(v.imag()) <= k3 * se.second);
        // Hermitian in the levels and periodic in omega
        REQUIRE(std::abs(truth.value(b, a, w) - std::conj(v)) <= 1e-15);
        REQUIRE(std::abs(truth.value(a, b, w + 2 * pi) - v) <= 1e-13);
      }
}

TEST_CASE("Monte Carlo truth shapes", "[oracle][montecarlo]") {
  QuantileGrid g({0.1, 0.5, 0.9});
  SECTION("AR(2) peaks at pi/2") {
    auto truth = mc_truth_spectrum(Model::Ar2, g, small_config());
    const double peak = truth.value(1, 1, pi / 2).real();
    REQUIRE(peak > white_noise_spectrum(0.5, 0.5));
    REQUIRE(peak > truth.value(1, 1, pi / 8).real());
    REQUIRE(peak > truth.value(1, 1, 7 * pi / 8).real());
  }
  SECTION("QAR(1) is not time reversible") {
    auto c = small_config();
    c.path_length = 200'000;
    auto truth = mc_truth_spectrum(Model::Qar1, g, c);
    bool found = false;
    for (double w : kOmegas) {
      const double im = truth.value(0, 2, w).imag();
      if (std::abs(im) > 5 * truth.standard_error(0, 2, w)->second) found = true;
    }
    REQUIRE(found);
  }
}

TEST_CASE("truth CSV round trip and cache", "[oracle]") {
  QuantileGrid g({0.1, 0.3, 0.9});
  auto c = small_config();
  c.calibration_length = 50'000;
  c.path_length = 20'000;
  c.batches = 3;
  c.max_lag = 10;
  auto t = mc_truth_spectrum(Model::Ar2, g, c);
  std::stringstream buf;
  write_truth_csv(buf, t, Model::Ar2, c);
  auto back = read_truth_csv(buf);
  REQUIRE(back.lag_covariances() == t.lag_covariances());
  REQUIRE(back.quantiles() == t.quantiles());
  REQUIRE(back.grid().values() == t.grid().values());
  REQUIRE(back.max_lag() == 10);

  std::istringstream broken("# qspec truth\nbatch,tau1\n0,x\n");
  REQUIRE_THROWS_AS(read_truth_csv(broken), DataError);

  auto dir = scratch_dir("cache");
  auto first = cached_truth_spectrum(Model::Ar2, g, c, dir);
  REQUIRE(first.lag_covariances() == t.lag_covariances());
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    ++files;
    REQUIRE(e.path().filename().string().rfind("truth_ar2_", 0) == 0);
  }
  REQUIRE(files == 1);
  auto second = cached_truth_spectrum(Model::Ar2, g, c, dir);
  REQUIRE(second.lag_covariances() == t.lag_covariances());
  auto other = c;
  other.seed += 1;
  auto third = cached_truth_spectrum(Model::Ar2, g, other, dir);
  REQUIRE(third.lag_covariances() != t.lag_covariances());
  std::filesystem::remove_all(dir);
}

TEST_CASE("truth configuration errors", "[oracle]") {
  auto c = small_config();
  c.batches = 1;
  REQUIRE_THROWS_AS(mc_truth_spectrum(Model::Ar2, QuantileGrid({0.5}), c), UsageError);
  c = small_config();
  c.max_lag = c.path_length;
  REQUIRE_THROWS_AS(mc_truth_spectrum(Model::Ar2, QuantileGrid({0.5}), c), UsageError);
}

TEST_CASE("default cache directory", "[oracle]") {
  ::setenv("QSPEC_CACHE_DIR", "/tmp/somewhere", 1);
  REQUIRE(default_cache_dir() == std::filesystem::path("/tmp/somewhere"));
  ::unsetenv("QSPEC_CACHE_DIR");
  ::setenv("XDG_CACHE_HOME", "/tmp/xdg", 1);
  REQUIRE(default_cache_dir() == std::filesystem::path("/tmp/xdg/qspec"));
  ::unsetenv("XDG_CACHE_HOME");
}

TEST_CASE("L2 spectrum", "[oracle]") {
  auto wn = l2_spectrum(Model::GaussWn, 1'000'000, 20, 3);
  REQUIRE(wn.autocorrelation[0] == Approx(1.0).epsilon(1e-12));
  for (double w : kOmegas) REQUIRE(wn.value(w) == Approx(1 / (2 * pi)).epsilon(0.05));
  // AR(2): rho_2 = -0.36, odd lags vanish
  auto ar = l2_spectrum(Model::Ar2, 1'000'000, 20, 3);
  REQUIRE(ar.autocorrelation[2] == Approx(-0.36).margin(0.01));
  REQUIRE(ar.autocorrelation[1] == Approx(0.0).margin(0.01));
  REQUIRE_THROWS_AS(l2_spectrum(Model::Ar2, 10, 10, 1), UsageError);
}
