#include "hpsurf/normal.hpp"

#include <boost/math/special_functions/erf.hpp>

#include "hpsurf/errors.hpp"

namespace hpsurf::normal {

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace hpsurf::normal
