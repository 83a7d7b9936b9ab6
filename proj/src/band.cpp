#include "hpsurf/band.hpp"

#include <algorithm>

#include "hpsurf/errors.hpp"

namespace hpsurf {

double step_value(const std::vector<double>& xs, const std::vector<double>& values, double before, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return before;
  return values[static_cast<std::size_t>(it - xs.begin()) - 1];
}

std::optional<double> step_inverse(const std::vector<double>& xs, const std::vector<double>& values, double before,
                                   double target) {
  if (before >= target) return std::nullopt;
  const auto it = std::lower_bound(values.begin(), values.end(), target);
  if (it == values.end()) return std::nullopt;
  return xs[static_cast<std::size_t>(it - values.begin())];
}

void CdfBand::validate() const {
  const auto n = xs.size();
  if (ecdf.size() != n || lower.size() != n || upper.size() != n) throw DomainError("band: size mismatch");
  if (!(lower_before >= 0.0 && lower_before <= ecdf_before && ecdf_before <= upper_before && upper_before <= 1.0)) {
    throw DomainError("band: inconsistent values below the first point");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(xs[i] > xs[i - 1])) throw DomainError("band: xs must be strictly increasing");
    if (!(lower[i] >= 0.0 && lower[i] <= ecdf[i] && ecdf[i] <= upper[i] && upper[i] <= 1.0)) {
      throw DomainError("band: require 0 <= lower <= ecdf <= upper <= 1");
    }
    const double pl = i > 0 ? lower[i - 1] : lower_before;
    const double pe = i > 0 ? ecdf[i - 1] : ecdf_before;
    const double pu = i > 0 ? upper[i - 1] : upper_before;
    if (lower[i] < pl || ecdf[i] < pe || upper[i] < pu) throw DomainError("band: curves must be nondecreasing");
  }
}

double CdfBand::ecdf_at(double x) const { return step_value(xs, ecdf, ecdf_before, x); }
double CdfBand::lower_at(double x) const { return step_value(xs, lower, lower_before, x); }
double CdfBand::upper_at(double x) const { return step_value(xs, upper, upper_before, x); }

}  // namespace hpsurf
