#include "qspec/simulate.hpp"

#include <cassert>
#include <cmath>

#include "qspec/error.hpp"
#include "qspec/normal.hpp"

namespace qspec {

namespace {
constexpr std::uint64_t kSimulationDomain = 1;
}

void ModelSpec::validate() const {
  if (n < 2) throw UsageError("model length must be at least 2");
}

namespace detail {

ModelState::ModelState(const ModelSpec& spec)
    : model_(spec.model), stream_(stream_seed(spec.seed, spec.replication, kSimulationDomain)) {
  spec.validate();
  for (std::size_t i = 0; i < spec.burn_in; ++i) step();
}

double ModelState::step() {
  double y = 0.0;
  switch (model_) {
    case Model::Qar1: {
      const double u = stream_.uniform();
      const double coef = 1.9 * (u - 0.5);
      assert(std::abs(coef) < 0.95);
      y = 0.1 * normal_quantile(u) + coef * y1_;
      break;
    }
    case Model::Ar2:
      y = -0.36 * y2_ + stream_.normal();
      break;
    case Model::Arch1:
      y = std::sqrt(1.0 / 1.9 + 0.9 * y1_ * y1_) * stream_.normal();
      break;
    case Model::GaussWn:
      y = stream_.normal();
      break;
  }
  y2_ = y1_;
  y1_ = y;
  return y;
}

void ModelState::fill(std::span<double> out) {
  for (double& v : out) v = step();
}

}  // namespace detail

void simulate_into(const ModelSpec& spec, std::span<double> out) {
  if (out.size() != spec.n) throw UsageError("simulate_into: output length differs from spec.n");
  detail::ModelState state(spec);
  state.fill(out);
}

std::vector<double> simulate(const ModelSpec& spec) {
  std::vector<double> out(spec.n);
  simulate_into(spec, out);
  return out;
}

Model parse_model(std::string_view name) {
  if (name == "qar1") return Model::Qar1;
  if (name == "ar2") return Model::Ar2;
  if (name == "arch1") return Model::Arch1;
  if (name == "gausswn") return Model::GaussWn;
  throw UsageError("unknown model '" + std::string(name) + "' (expected qar1, ar2, arch1, gausswn)");
}

std::string model_name(Model m) {
  switch (m) {
    case Model::Qar1: return "qar1";
    case Model::Ar2: return "ar2";
    case Model::Arch1: return "arch1";
    case Model::GaussWn: return "gausswn";
  }
  return "?";
}

}  // namespace qspec
