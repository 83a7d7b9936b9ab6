#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "hpsurf/band.hpp"

namespace hpsurf {

enum class Direction { Minimize, Maximize };

std::string_view to_string(Direction d);
/// Accepts "min"/"minimize" and "max"/"maximize".
Direction parse_direction(std::string_view s);

/// CDF of the best of k draws at a point where one draw has CDF value p:
/// 1 - (1-p)^k when minimizing, p^k when maximizing. Real k > 0 allowed.
double best_of_k_cdf(double p, double k, Direction dir);

/// Single-draw CDF level whose best-of-k quantile is `level`:
/// 1 - (1-level)^(1/k) when minimizing, level^(1/k) when maximizing.
double best_of_k_level(double level, double k, Direction dir);

using QuantileFn = std::function<double(double)>;

/// The level-quantile of the best score after k iterations (the median
/// tuning curve at level 0.5).
double tuning_curve_point(const QuantileFn& quantile_fn, double k, double level = 0.5,
                          Direction dir = Direction::Minimize);

struct TuningCurve {
  std::vector<double> ks;
  std::vector<double> values;
  /// Absent entries are unbounded in that direction.
  std::vector<std::optional<double>> lower;
  std::vector<std::optional<double>> upper;
  std::optional<double> confidence;

  bool has_band() const { return !lower.empty(); }
  /// Throws DomainError on malformed shapes, non-increasing ks, or
  /// lower > value > upper where both are present.
  void validate() const;
};

/// `count` log-spaced points from 1 to k_max inclusive (count >= 2 unless
/// k_max == 1).
std::vector<double> log_k_grid(double k_max, std::size_t count = 64);

TuningCurve tuning_curve(const QuantileFn& quantile_fn, const std::vector<double>& ks, Direction dir,
                         double level = 0.5);

/// Point curve from the band's eCDF; the lower curve comes from the upper
/// CDF envelope and the upper curve from the lower envelope. Throws
/// DomainError on an empty band.
TuningCurve tuning_curve_from_band(const CdfBand& band, const std::vector<double>& ks, Direction dir,
                                   double level = 0.5);

}  // namespace hpsurf
