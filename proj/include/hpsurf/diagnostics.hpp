#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hpsurf {

struct QqPoint {
  double theoretical;
  double sample;
};

struct QqData {
  std::vector<QqPoint> points;
  /// Sample std was zero: `sample` holds raw ranks 1..n instead.
  bool degenerate = false;
};

/// Normal probability plot data with plotting positions (i - 0.5) / n.
/// With standardize = false the sorted values are emitted as-is.
QqData normal_qq(const std::vector<double>& sample, bool standardize = true);

/// q-quantile of the chi-squared distribution with nu degrees of freedom,
/// by bracketed root search on the regularized lower incomplete gamma.
double chisq_quantile(double q, double nu);

/// Sample standard deviation (n - 1 denominator).
double sample_std(const std::vector<double>& sample);

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Chi-squared confidence interval for a normal standard deviation.
Interval std_ci_chisq(const std::vector<double>& sample, double confidence);

struct GroupedScores {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> groups;

  void validate() const;
};

struct GroupInterval {
  std::string label;
  std::size_t n;
  double std;
  Interval interval;
};

struct SidakReport {
  double overall_confidence = 0.0;
  double individual_confidence = 0.0;
  std::vector<GroupInterval> intervals;
  /// Mean of the reference group stds and whether it lies in every interval.
  std::vector<std::size_t> reference;
  double common_value = 0.0;
  bool common_value_in_all = false;
};

/// Individual confidence c^(1/m) so that m independent intervals hold
/// simultaneously with confidence c.
double sidak_individual_confidence(double overall, std::size_t m);

/// Simultaneous std intervals; `reference` selects the groups whose mean std
/// is checked against every interval (default: the last three groups).
SidakReport sidak_simultaneous_std_cis(const GroupedScores& groups, double overall_confidence,
                                       std::optional<std::vector<std::size_t>> reference = std::nullopt);

}  // namespace hpsurf
