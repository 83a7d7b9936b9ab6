#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hpsurf {

/// A simultaneous band for a CDF, represented as right-continuous step
/// functions over ascending xs. The *_before fields give each curve's value
/// for x < xs.front().
struct CdfBand {
  std::vector<double> xs;
  std::vector<double> ecdf;
  std::vector<double> lower;
  std::vector<double> upper;
  double confidence = 0.0;
  double ecdf_before = 0.0;
  double lower_before = 0.0;
  double upper_before = 0.0;
  /// Construction label, e.g. "dkw" or "consonance".
  std::string method;

  bool empty() const { return xs.empty(); }
  /// Throws DomainError unless sizes match, xs ascend and
  /// 0 <= lower <= ecdf <= upper <= 1 with all three nondecreasing.
  void validate() const;

  double ecdf_at(double x) const;
  double lower_at(double x) const;
  double upper_at(double x) const;
};

/// Right-continuous step value: values[i] for the last xs[i] <= x, or
/// `before` when x < xs.front().
double step_value(const std::vector<double>& xs, const std::vector<double>& values, double before, double x);

/// Generalized inverse: the smallest xs[i] whose step value is >= target.
/// Empty when `before` already reaches the target (unbounded below) or no
/// value reaches it (unbounded above).
std::optional<double> step_inverse(const std::vector<double>& xs, const std::vector<double>& values, double before,
                                   double target);

}  // namespace hpsurf
