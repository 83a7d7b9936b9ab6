#include "hpsurf/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hpsurf/errors.hpp"

namespace hpsurf {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& steps, const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0 || steps.size() != n) throw DomainError("nelder_mead: dimension mismatch");
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  std::size_t evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  values[0] = eval(x0);
  for (std::size_t i = 0; i < n; ++i) {
    // Try the forward step, then the backward one, then shorter ones, so the
    // initial simplex avoids rejected regions where possible.
    double step = steps[i];
    for (int attempt = 0; attempt < 8; ++attempt) {
      simplex[i + 1] = x0;
      simplex[i + 1][i] += step;
      values[i + 1] = eval(simplex[i + 1]);
      if (std::isfinite(values[i + 1])) break;
      step = attempt % 2 == 0 ? -step : -0.5 * step;
    }
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;
  while (evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    if (std::isfinite(values[worst])) {
      const double spread = values[worst] - values[best];
      double size = 0.0;
      for (std::size_t v = 0; v <= n; ++v) {
        for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(simplex[v][j] - simplex[best][j]));
      }
      if (spread <= options.f_tolerance * (1.0 + std::abs(values[best])) && size <= options.x_tolerance) {
        converged = true;
        break;
      }
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= n; ++v) {
      if (v == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[v][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    for (std::size_t j = 0; j < n; ++j) trial[j] = centroid[j] + kReflect * (centroid[j] - simplex[worst][j]);
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      for (std::size_t j = 0; j < n; ++j) trial2[j] = centroid[j] + kExpand * (trial[j] - centroid[j]);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    for (std::size_t j = 0; j < n; ++j) {
      trial2[j] = outside ? centroid[j] + kContract * (trial[j] - centroid[j])
                          : centroid[j] + kContract * (simplex[worst][j] - centroid[j]);
    }
    const double f_contract = eval(trial2);
    if (f_contract < std::min(f_reflect, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t v = 0; v <= n; ++v) {
      if (v == best) continue;
      for (std::size_t j = 0; j < n; ++j) {
        simplex[v][j] = simplex[best][j] + kShrink * (simplex[v][j] - simplex[best][j]);
      }
      values[v] = eval(simplex[v]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  return {simplex[idx], *it, evaluations, converged};
}

}  // namespace hpsurf
