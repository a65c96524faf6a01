#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qspec/rng.hpp"

namespace qspec {

enum class Model { Qar1, Ar2, Arch1, GaussWn };

struct ModelSpec {
  Model model = Model::GaussWn;
  std::size_t n = 0;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;

  void validate() const;
};

/// QAR(1):  Y_t = 0.1 Phi^{-1}(U_t) + 1.9 (U_t - 0.5) Y_{t-1}
/// AR(2):   Y_t = -0.36 Y_{t-2} + e_t
/// ARCH(1): Y_t = sqrt(1/1.9 + 0.9 Y_{t-1}^2) e_t
/// GaussWn: Y_t = e_t
/// Recursions start from zero and discard burn_in steps. The output depends
/// only on (model, n, burn_in, seed, replication).
std::vector<double> simulate(const ModelSpec& spec);

/// Generates spec.n values into out (out.size() == spec.n).
void simulate_into(const ModelSpec& spec, std::span<double> out);

/// Continues a stream for a long path without holding it in memory: calls
/// sink(chunk) with consecutive chunks of at most `chunk` values.
template <class Sink>
void simulate_chunked(const ModelSpec& spec, std::size_t chunk, Sink&& sink);

Model parse_model(std::string_view name);
std::string model_name(Model m);

namespace detail {

// Process state carried between chunks.
class ModelState {
 public:
  explicit ModelState(const ModelSpec& spec);
  void fill(std::span<double> out);

 private:
  double step();

  Model model_;
  Stream stream_;
  double y1_ = 0.0, y2_ = 0.0;  // Y_{t-1}, Y_{t-2}
};

}  // namespace detail

template <class Sink>
void simulate_chunked(const ModelSpec& spec, std::size_t chunk, Sink&& sink) {
  detail::ModelState state(spec);
  std::vector<double> buf(chunk);
  std::size_t left = spec.n;
  while (left > 0) {
    const std::size_t m = left < chunk ? left : chunk;
    state.fill(std::span<double>(buf.data(), m));
    sink(std::span<const double>(buf.data(), m));
    left -= m;
  }
}

}  // namespace qspec
