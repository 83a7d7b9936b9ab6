#include "hpsurf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "hpsurf/errors.hpp"
#include "hpsurf/normal.hpp"

namespace hpsurf {
namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

void check_confidence(double c) {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("confidence must lie in (0, 1)");
}

}  // namespace

QqData normal_qq(const std::vector<double>& sample, bool standardize) {
  if (sample.empty()) throw DomainError("normal_qq: empty sample");
  for (double x : sample) {
    if (!std::isfinite(x)) throw DomainError("normal_qq: non-finite value");
  }
  std::vector<double> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  QqData out;
  double center = 0.0, scale = 1.0;
  if (standardize) {
    center = mean_of(sorted);
    scale = n >= 2 ? sample_std(sorted) : 0.0;
    out.degenerate = !(scale > 0.0);
  }
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double y = out.degenerate ? static_cast<double>(i + 1) : (sorted[i] - center) / scale;
    out.points.push_back({normal::quantile(pos), y});
  }
  return out;
}

double chisq_quantile(double q, double nu) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("chisq_quantile: q must lie in (0, 1)");
  if (!(nu > 0.0)) throw DomainError("chisq_quantile: nu must be positive");
  auto f = [&](double x) { return boost::math::gamma_p(0.5 * nu, 0.5 * x) - q; };
  double lo = 0.0, hi = std::max(1.0, nu);
  for (int i = 0; f(hi) < 0.0; ++i) {
    if (i == 200) throw NumericFailure("chisq_quantile: no bracket");
    lo = hi;
    hi *= 2.0;
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, f(lo), f(hi),
      [](double a, double b) { return std::abs(b - a) <= 1e-10 * std::max(std::abs(a), 1e-300); }, iters);
  return 0.5 * (r.first + r.second);
}

double sample_std(const std::vector<double>& sample) {
  if (sample.size() < 2) throw DomainError("sample std needs at least two values");
  const double m = mean_of(sample);
  double ss = 0.0;
  for (double x : sample) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(sample.size() - 1));
}

Interval std_ci_chisq(const std::vector<double>& sample, double confidence) {
  check_confidence(confidence);
  if (sample.size() < 2) throw DomainError("std_ci_chisq: need at least two values");
  for (double x : sample) {
    if (!std::isfinite(x)) throw DomainError("std_ci_chisq: non-finite value");
  }
  const double s = sample_std(sample);
  if (s == 0.0) return {0.0, 0.0};
  const double nu = static_cast<double>(sample.size() - 1);
  const double upper_q = chisq_quantile(0.5 * (1.0 + confidence), nu);
  const double lower_q = chisq_quantile(0.5 * (1.0 - confidence), nu);
  return {s * std::sqrt(nu / upper_q), s * std::sqrt(nu / lower_q)};
}

void GroupedScores::validate() const {
  if (groups.empty()) throw DomainError("grouped scores: no groups");
  if (labels.size() != groups.size()) throw DomainError("grouped scores: label count mismatch");
  for (const auto& g : groups) {
    if (g.size() < 2) throw DomainError("grouped scores: every group needs at least two values");
  }
}

double sidak_individual_confidence(double overall, std::size_t m) {
  check_confidence(overall);
  if (m == 0) throw DomainError("sidak: need at least one interval");
  if (m == 1) return overall;
  return std::exp(std::log(overall) / static_cast<double>(m));
}

SidakReport sidak_simultaneous_std_cis(const GroupedScores& groups, double overall_confidence,
                                       std::optional<std::vector<std::size_t>> reference) {
  groups.validate();
  const std::size_t m = groups.groups.size();
  SidakReport report;
  report.overall_confidence = overall_confidence;
  report.individual_confidence = sidak_individual_confidence(overall_confidence, m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& g = groups.groups[i];
    report.intervals.push_back(
        {groups.labels[i], g.size(), sample_std(g), std_ci_chisq(g, report.individual_confidence)});
  }
  if (reference) {
    report.reference = *reference;
  } else {
    for (std::size_t i = m >= 3 ? m - 3 : 0; i < m; ++i) report.reference.push_back(i);
  }
  if (report.reference.empty()) throw DomainError("sidak: empty reference subset");
  double sum = 0.0;
  for (std::size_t i : report.reference) {
    if (i >= m) throw DomainError("sidak: reference index out of range");
    sum += report.intervals[i].std;
  }
  report.common_value = sum / static_cast<double>(report.reference.size());
  report.common_value_in_all = std::all_of(report.intervals.begin(), report.intervals.end(),
                                           [&](const GroupInterval& g) { return g.interval.contains(report.common_value); });
  return report;
}

}  // namespace hpsurf
