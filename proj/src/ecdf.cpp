#include <algorithm>
#include <cmath>

#include "hpsurf/errors.hpp"
#include "hpsurf/estimation.hpp"

namespace hpsurf {

void ScoreSample::validate(bool require_nonempty) const {
  if (require_nonempty && scores.empty()) throw DomainError("score sample is empty");
  for (double s : scores) {
    if (!std::isfinite(s)) throw DomainError("score sample contains a non-finite value");
  }
}

std::size_t ScoreSample::count_in_regime(double threshold) const {
  return static_cast<std::size_t>(std::count_if(scores.begin(), scores.end(), [&](double s) {
    return direction == Direction::Minimize ? s <= threshold : s >= threshold;
  }));
}

StepFunction ecdf(const ScoreSample& sample) {
  sample.validate();
  std::vector<double> sorted = sample.scores;
  std::sort(sorted.begin(), sorted.end());
  StepFunction out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.xs.push_back(sorted[i]);
    out.values.push_back(static_cast<double>(i + 1) / n);
  }
  out.values.back() = 1.0;
  return out;
}

double dkw_epsilon(std::size_t n, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
  if (n == 0) throw DomainError("DKW band of an empty sample");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

CdfBand dkw_band(const ScoreSample& sample, double confidence) {
  const double eps = dkw_epsilon(sample.size(), confidence);
  const StepFunction f = ecdf(sample);
  CdfBand band;
  band.xs = f.xs;
  band.ecdf = f.values;
  band.confidence = confidence;
  band.method = "dkw";
  band.lower.reserve(f.xs.size());
  band.upper.reserve(f.xs.size());
  for (double v : f.values) {
    band.lower.push_back(std::max(v - eps, 0.0));
    band.upper.push_back(std::min(v + eps, 1.0));
  }
  band.ecdf_before = 0.0;
  band.lower_before = 0.0;
  band.upper_before = std::min(eps, 1.0);
  return band;
}

}  // namespace hpsurf
