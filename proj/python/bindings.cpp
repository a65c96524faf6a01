// Python bindings for the qspec core.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "qspec/analyze.hpp"
#include "qspec/error.hpp"
#include "qspec/oracle.hpp"
#include "qspec/periodogram.hpp"
#include "qspec/rank_spectra.hpp"
#include "qspec/ranks.hpp"
#include "qspec/simulate.hpp"

namespace py = pybind11;
using namespace qspec;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw UsageError("expected a one-dimensional series");
  return {a.data(), a.data() + a.size()};
}

TiePolicy parse_ties(const std::string& s) {
  if (s == "stable") return TiePolicy::StableIndex;
  if (s == "average-floor") return TiePolicy::AverageFloor;
  throw UsageError("unknown tie policy '" + s + "'");
}

DependenceMeasure measure_of(const std::string& name) {
  if (name == "spearman") return DependenceMeasure::spearman();
  if (name == "blomqvist") return DependenceMeasure::blomqvist();
  if (name == "gini") return DependenceMeasure::gini();
  throw UsageError("unknown measure '" + name + "'");
}

template <class T>
using Out = py::array_t<T, py::array::c_style>;

template <class T>
Out<T> to_array(const std::vector<T>& v) {
  Out<T> out({static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_qspec, m) {
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  m.def(
      "rank_transform",
      [](const Array& y, const std::string& ties) {
        const auto v = to_vector(y);
        const auto r = rank_transform(v, parse_ties(ties));
        return to_array(r.ranks);
      },
      py::arg("values"), py::arg("ties") = "stable", "Ranks 1..n of a series.");

  // K x K x F array of CR-periodogram ordinates at Fourier indices j
  m.def(
      "cr_periodogram",
      [](const Array& y, std::vector<double> levels, std::vector<std::int64_t> js) {
        const auto v = to_vector(y);
        const std::size_t n = v.size(), k = levels.size(), nf = js.size();
        const auto field = cr_field(indicator_matrix(rank_transform(v), QuantileGrid(std::move(levels))),
                                    FrequencyGrid(n, js));
        Out<cplx> out({k, k, nf});
        auto o = out.mutable_unchecked<3>();
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t b = 0; b < k; ++b)
            for (std::size_t f = 0; f < nf; ++f) o(a, b, f) = field.at(a, b, f);
        return out;
      },
      py::arg("values"), py::arg("levels"), py::arg("indices"));

  m.def(
      "spearman_periodogram",
      [](const Array& y) { return to_array(spearman_periodogram_all(rank_transform(to_vector(y)))); },
      py::arg("values"), "Spearman periodogram at Fourier indices 1..n-1.");

  m.def(
      "measure_periodogram",
      [](const Array& y, const std::string& measure) {
        return to_array(measure_periodogram_all(rank_transform(to_vector(y)), measure_of(measure)));
      },
      py::arg("values"), py::arg("measure"), "Measure periodogram (spearman, blomqvist, gini) at indices 1..n-1.");

  m.def(
      "simulate",
      [](const std::string& model, std::size_t n, std::uint64_t seed, std::uint64_t replication,
         std::size_t burn_in) {
        return to_array(simulate({parse_model(model), n, burn_in, seed, replication}));
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 1, py::arg("replication") = 0, py::arg("burn_in") = 1000);

  m.def("white_noise_spectrum", &white_noise_spectrum, py::arg("tau1"), py::arg("tau2"));

  m.def(
      "analyze",
      [](const Array& y, std::vector<double> levels, const std::string& spectrum, std::vector<double> omegas,
         double alpha, std::optional<double> bandwidth, bool raw, const std::string& ties) {
        AnalyzeOptions o;
        o.levels = std::move(levels);
        o.spectrum = parse_spectrum_kind(spectrum);
        o.omegas = std::move(omegas);
        o.alpha = alpha;
        o.bandwidth = bandwidth;
        o.raw = raw;
        o.ties = parse_ties(ties);
        const auto r = analyze(to_vector(y), o);
        Out<double> rows({r.rows.size(), r.columns.size()});
        auto w = rows.mutable_unchecked<2>();
        for (std::size_t i = 0; i < r.rows.size(); ++i)
          for (std::size_t c = 0; c < r.columns.size(); ++c) w(i, c) = r.rows[i][c];
        py::dict d;
        d["columns"] = r.columns;
        d["rows"] = rows;
        d["text_columns"] = r.text_columns;
        d["text"] = r.text;
        d["warnings"] = r.warnings;
        d["n"] = r.n;
        d["bandwidth"] = r.bandwidth;
        return d;
      },
      py::arg("values"), py::arg("levels") = std::vector<double>{0.1, 0.5, 0.9}, py::arg("spectrum") = "copula",
      py::arg("omegas") = std::vector<double>{}, py::arg("alpha") = 0.05, py::arg("bandwidth") = py::none(),
      py::arg("raw") = false, py::arg("ties") = "stable");
}
