#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "qspec/analyze.hpp"
#include "qspec/error.hpp"
#include "support.hpp"

#include <unistd.h>

using namespace qspec;
using Catch::Approx;
using std::numbers::pi;

namespace {

std::string render(const AnalyzeResult& r, OutputFormat f = OutputFormat::Csv) {
  std::ostringstream out;
  r.write(out, f);
  return out.str();
}

void expect_data_error(const std::string& text, const std::string& needle) {
  std::istringstream in(text);
  try {
    read_series_csv(in);
    FAIL("expected DataError for: " << text);
  } catch (const DataError& e) {
    INFO(e.what());
    REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("series CSV reader", "[analyze]") {
  SECTION("plain and with header") {
    std::istringstream a("1.5\n-2\n3e-1\n");
    REQUIRE(read_series_csv(a) == std::vector<double>{1.5, -2.0, 0.3});
    std::istringstream b("value\r\n1\r\n+2\r\n  4 \n\n\n");
    REQUIRE(read_series_csv(b) == std::vector<double>{1.0, 2.0, 4.0});
  }
  SECTION("errors name the line") {
    expect_data_error("1\n2\nabc\n", "line 3");
    expect_data_error("1\nnan\n", "line 2");
    expect_data_error("1\ninf\n", "line 2");
    expect_data_error("1,2\n", "line 1");
    expect_data_error("x\n1\n\n2\n", "line 3");
    expect_data_error("header\n", "no numeric values");
    expect_data_error("", "no numeric values");
  }
}

TEST_CASE("spectrum kinds", "[analyze]") {
  for (auto k : {SpectrumKind::Copula, SpectrumKind::Spearman, SpectrumKind::Blomqvist, SpectrumKind::Gini})
    REQUIRE(parse_spectrum_kind(spectrum_kind_name(k)) == k);
  REQUIRE_THROWS_AS(parse_spectrum_kind("kendall"), UsageError);
}

TEST_CASE("format_double round-trips", "[analyze]") {
  REQUIRE(format_double(0.1) == "0.1");
  REQUIRE(format_double(-2.5) == "-2.5");
  for (double x : {1.0 / 3.0, pi, 1e-300, 123456.789e10}) REQUIRE(std::stod(format_double(x)) == x);
}

TEST_CASE("copula analysis structure", "[analyze]") {
  const std::size_t n = 1024;
  auto y = qspec_test::gaussian_series(n, 17);
  AnalyzeOptions o;
  auto r = analyze(y, o);
  const std::size_t freqs = (n - 1) / 2;
  REQUIRE(r.n == n);
  REQUIRE(r.bandwidth == Approx(0.4 / std::pow(1024.0, 0.25)));
  REQUIRE(r.columns.size() == 9);
  REQUIRE(r.rows.size() == 6 * freqs);
  REQUIRE(r.warnings.empty());
  for (const auto& row : r.rows) {
    if (row[0] == row[1]) {
      REQUIRE(row[4] == 0.0);  // im
      REQUIRE(row[7] == 0.0);
      REQUIRE(row[8] == 0.0);
    }
    REQUIRE(row[5] <= row[3]);
    REQUIRE(row[3] <= row[6]);
  }
  // the first slice is (0.1, 0.1) over j = 1..freqs
  REQUIRE(r.rows[0][2] == Approx(2 * pi / n));
  REQUIRE(r.rows[freqs][1] == 0.5);

  std::ostringstream js;
  r.write(js, OutputFormat::Json);
  auto doc = nlohmann::json::parse(js.str());
  REQUIRE(doc["rows"].size() == r.rows.size());
  REQUIRE(doc["rows"][0]["tau1"] == 0.1);
  REQUIRE(doc["n"] == n);
}

TEST_CASE("analysis is deterministic and rank invariant", "[analyze][property]") {
  auto y = qspec_test::gaussian_series(300, 5);
  std::vector<double> e(y.size()), affine(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    e[i] = std::exp(y[i]);
    affine[i] = 3.0 * y[i] + 7.0;
  }
  for (auto kind : {SpectrumKind::Copula, SpectrumKind::Spearman, SpectrumKind::Gini}) {
    AnalyzeOptions o;
    o.spectrum = kind;
    o.omegas = {0.5, pi / 2, 2.5};
    const auto base = render(analyze(y, o));
    REQUIRE(render(analyze(y, o)) == base);
    REQUIRE(render(analyze(e, o)) == base);
    REQUIRE(render(analyze(affine, o)) == base);
    REQUIRE(render(analyze(y, o), OutputFormat::Json) == render(analyze(e, o), OutputFormat::Json));
  }
}

TEST_CASE("target frequencies", "[analyze]") {
  auto y = qspec_test::gaussian_series(64, 1);
  AnalyzeOptions o;
  o.levels = {0.5};
  o.omegas = {2 * pi * 8 / 64, 1.0};
  auto r = analyze(y, o);
  REQUIRE(r.rows.size() == 2);
  REQUIRE(r.warnings.size() == 1);
  REQUIRE(r.warnings[0].find("not a Fourier frequency") != std::string::npos);
  REQUIRE(r.rows[1][2] == Approx(2 * pi * 10 / 64));
  o.omegas = {0.0};
  REQUIRE_THROWS_AS(analyze(y, o), UsageError);
  o.omegas = {2 * pi};
  REQUIRE_THROWS_AS(analyze(y, o), UsageError);
  o.omegas = {};
  REQUIRE_THROWS_AS(analyze(std::vector<double>(7, 1.0), o), DataError);
  o.alpha = 0.0;
  REQUIRE_THROWS_AS(analyze(y, o), UsageError);
}

TEST_CASE("raw CR-periodogram output", "[analyze]") {
  std::vector<double> y{1, 2, 3, 4, 5, 6, 7, 8};
  AnalyzeOptions o;
  o.levels = {0.5};
  o.raw = true;
  o.omegas = {pi / 2};
  auto r = analyze(y, o);
  REQUIRE(r.columns == std::vector<std::string>{"tau1", "tau2", "omega", "re", "im"});
  // row (1,1,1,1,0,0,0,0): d(pi/2) = 1 - i - 1 + i = 0
  REQUIRE(std::abs(r.rows[0][3]) < 1e-15);
  o.omegas = {pi / 4};
  auto s = analyze(y, o);
  const cplx d = 1.0 + std::polar(1.0, -pi / 4) + std::polar(1.0, -pi / 2) + std::polar(1.0, -3 * pi / 4);
  REQUIRE(s.rows[0][3] == Approx(std::norm(d) / (2 * pi * 8)).epsilon(1e-13));
}

TEST_CASE("measure spectrum output", "[analyze]") {
  auto y = qspec_test::gaussian_series(512, 8);
  AnalyzeOptions o;
  o.spectrum = SpectrumKind::Blomqvist;
  o.omegas = {pi / 4, pi / 2};
  auto r = analyze(y, o);
  REQUIRE(r.text_columns == std::vector<std::string>{"spectrum"});
  REQUIRE(r.rows.size() == 2);
  const double nb = 512 * r.bandwidth;
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE(r.text[i][0] == "blomqvist");
    const auto& row = r.rows[i];
    REQUIRE(row[4] - row[1] == Approx(1.959963984540054 * std::sqrt(row[5] / nb)).epsilon(1e-12));
    REQUIRE(row[1] == Approx(1 / (2 * pi)).margin(0.1));
  }
  auto csv = render(r);
  REQUIRE(csv.rfind("spectrum,omega,re,im,re_lo,re_hi,sigma2\nblomqvist,", 0) == 0);

  o.spectrum = SpectrumKind::Custom;
  REQUIRE_THROWS_AS(analyze(y, o), UsageError);
  o.measure = DependenceMeasure::blomqvist();
  auto custom = analyze(y, o);
  REQUIRE(custom.rows == r.rows);
  REQUIRE(custom.text[0][0] == "custom");
}

TEST_CASE("figure data", "[analyze]") {
  auto dir = std::filesystem::temp_directory_path() / ("qspec_fig_" + std::to_string(::getpid()));
  FigureOptions o;
  o.points = 9;
  o.l2_path_length = 100'000;
  o.l2_max_lag = 10;
  auto files = write_figures(Model::GaussWn, dir, o);
  REQUIRE(files.size() == 2);
  std::ifstream in(dir / "copula_gausswn.csv");
  std::string header, line;
  std::getline(in, header);
  REQUIRE(header == "x,tau1,tau2,part,value,se,provenance");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ss(line);
    std::string x, t1, t2, part, value;
    std::getline(ss, x, ',');
    std::getline(ss, t1, ',');
    std::getline(ss, t2, ',');
    std::getline(ss, part, ',');
    std::getline(ss, value, ',');
    const double a = std::stod(t1), b = std::stod(t2);
    REQUIRE(part == (b <= a ? "re" : "im"));
    const double want = b <= a ? (std::min(a, b) - a * b) / (2 * pi) : 0.0;
    REQUIRE(std::stod(value) == Approx(want).margin(1e-15));
  }
  REQUIRE(rows == 9 * 9);
  std::filesystem::remove_all(dir);
}
