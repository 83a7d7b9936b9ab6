#include "hpsurf/search_theory.hpp"

#include <cmath>
#include <string>

#include "hpsurf/errors.hpp"

namespace hpsurf {

std::string_view to_string(Direction d) { return d == Direction::Minimize ? "min" : "max"; }

Direction parse_direction(std::string_view s) {
  if (s == "min" || s == "minimize") return Direction::Minimize;
  if (s == "max" || s == "maximize") return Direction::Maximize;
  throw DomainError("unknown direction: " + std::string(s));
}

double best_of_k_cdf(double p, double k, Direction dir) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("best_of_k_cdf: k must be positive and finite");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("best_of_k_cdf: p outside [0, 1]");
  if (dir == Direction::Maximize) return std::pow(p, k);
  if (p == 1.0) return 1.0;
  return -std::expm1(k * std::log1p(-p));
}

double best_of_k_level(double level, double k, Direction dir) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("best_of_k_level: k must be positive and finite");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("best_of_k_level: level outside (0, 1)");
  if (dir == Direction::Maximize) return std::exp(std::log(level) / k);
  return -std::expm1(std::log1p(-level) / k);
}

double tuning_curve_point(const QuantileFn& quantile_fn, double k, double level, Direction dir) {
  return quantile_fn(best_of_k_level(level, k, dir));
}

void TuningCurve::validate() const {
  if (values.size() != ks.size()) throw DomainError("tuning curve: size mismatch");
  if (has_band() && (lower.size() != ks.size() || upper.size() != ks.size())) {
    throw DomainError("tuning curve: band size mismatch");
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0) || (i > 0 && !(ks[i] > ks[i - 1]))) throw DomainError("tuning curve: ks must increase");
    if (has_band()) {
      if (lower[i] && *lower[i] > values[i]) throw DomainError("tuning curve: lower above value");
      if (upper[i] && *upper[i] < values[i]) throw DomainError("tuning curve: upper below value");
    }
  }
}

std::vector<double> log_k_grid(double k_max, std::size_t count) {
  if (!(k_max >= 1.0) || !std::isfinite(k_max)) throw DomainError("k grid: k_max must be >= 1");
  if (k_max == 1.0) return {1.0};
  if (count < 2) throw DomainError("k grid: need at least two points");
  std::vector<double> ks(count);
  const double log_max = std::log(k_max);
  for (std::size_t i = 0; i < count; ++i) {
    ks[i] = std::exp(log_max * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  ks.front() = 1.0;
  ks.back() = k_max;
  return ks;
}

TuningCurve tuning_curve(const QuantileFn& quantile_fn, const std::vector<double>& ks, Direction dir, double level) {
  TuningCurve curve;
  curve.ks = ks;
  curve.values.reserve(ks.size());
  for (double k : ks) curve.values.push_back(tuning_curve_point(quantile_fn, k, level, dir));
  curve.validate();
  return curve;
}

TuningCurve tuning_curve_from_band(const CdfBand& band, const std::vector<double>& ks, Direction dir,
                                   double level) {
  if (band.empty()) throw DomainError("tuning curve from band: empty band");
  TuningCurve curve;
  curve.ks = ks;
  curve.confidence = band.confidence;
  for (double k : ks) {
    const double target = best_of_k_level(level, k, dir);
    const auto point = step_inverse(band.xs, band.ecdf, band.ecdf_before, target);
    curve.values.push_back(point ? *point : (band.ecdf_before >= target ? band.xs.front() : band.xs.back()));
    curve.lower.push_back(step_inverse(band.xs, band.upper, band.upper_before, target));
    curve.upper.push_back(step_inverse(band.xs, band.lower, band.lower_before, target));
  }
  curve.validate();
  return curve;
}

}  // namespace hpsurf
