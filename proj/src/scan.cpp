#include <algorithm>
#include <cmath>

#include "hpsurf/errors.hpp"
#include "hpsurf/estimation.hpp"

namespace hpsurf {

std::vector<ScanRow> threshold_scan(const ScoreSample& sample, const std::vector<double>& candidates,
                                    const ScanOptions& options) {
  sample.validate();
  const CdfBand band = dkw_band(sample, options.confidence);
  const auto n = static_cast<double>(sample.size());
  std::vector<ScanRow> rows;
  rows.reserve(candidates.size());
  for (double theta : candidates) {
    ScanRow row;
    row.threshold = theta;
    row.n_uncensored = sample.count_in_regime(theta);
    row.regime_fraction = static_cast<double>(row.n_uncensored) / n;
    if (!std::isfinite(theta)) {
      row.skipped = true;
      row.reason = "non-finite threshold";
      rows.push_back(std::move(row));
      continue;
    }
    if (row.n_uncensored < options.fit.min_uncensored) {
      row.skipped = true;
      row.reason = row.n_uncensored == 0 ? "no uncensored scores" : "too few uncensored scores";
      rows.push_back(std::move(row));
      continue;
    }
    try {
      row.fit = fit_noisy_quadratic(sample, theta, options.fit);
    } catch (const std::exception& e) {
      row.skipped = true;
      row.reason = e.what();
      rows.push_back(std::move(row));
      continue;
    }
    const auto& d = row.fit->dist;
    const auto& q = options.fit.quadrature;
    double dev = 0.0;
    bool inside = true;
    // Compare against both sides of each eCDF jump.
    const auto points = consonance_points(sample, theta);
    for (double x : points) {
      const double F = d.cdf(x, q);
      const auto i = static_cast<std::size_t>(std::upper_bound(band.xs.begin(), band.xs.end(), x) - band.xs.begin());
      const double after = i == 0 ? 0.0 : band.ecdf[i - 1];
      const bool at_jump = i > 0 && band.xs[i - 1] == x;
      const double before = at_jump ? (i >= 2 ? band.ecdf[i - 2] : 0.0) : after;
      dev = std::max({dev, std::abs(F - after), std::abs(F - before)});
      if (F < band.lower_at(x) || F > band.upper_at(x)) inside = false;
    }
    row.max_deviation = dev;
    row.within_band = inside;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hpsurf
