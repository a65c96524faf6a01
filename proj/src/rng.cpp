#include "qspec/rng.hpp"

#include "qspec/normal.hpp"

namespace qspec {

double Stream::normal() { return normal_quantile(uniform()); }

}  // namespace qspec
