#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hpsurf/errors.hpp"
#include "hpsurf/estimation.hpp"
#include "hpsurf/optimize.hpp"
#include "hpsurf/rng.hpp"

namespace hpsurf {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Objective for Minimize on ascending regime values `u` with `n_censored`
// observations beyond the threshold.
double msp_core(const std::vector<double>& u, double theta, std::size_t n_censored,
                const NoisyQuadraticDistribution& d, const QuadratureSpec& q) {
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i > 0 && u[i] == u[i - 1]) {
      const double f = d.pdf(u[i], q);
      if (!(f > 0.0)) return kNegInf;
      sum += std::log(f);
      continue;
    }
    const double F = d.cdf(u[i], q);
    const double spacing = F - prev;
    if (!(spacing > 0.0)) return kNegInf;
    sum += std::log(spacing);
    prev = F;
  }
  if (theta == u.back()) {
    const double f = d.pdf(theta, q);
    if (!(f > 0.0)) return kNegInf;
    sum += std::log(f);
  } else {
    const double spacing = d.cdf(theta, q) - prev;
    if (!(spacing > 0.0)) return kNegInf;
    sum += std::log(spacing);
  }
  if (n_censored > 0) {
    const double s = d.sf(theta, q);
    if (!(s > 0.0)) return kNegInf;
    sum += static_cast<double>(n_censored) * std::log(s);
  }
  return sum;
}

NoisyQuadraticDistribution mirrored(const NoisyQuadraticDistribution& d) {
  const Variant v = d.variant() == Variant::Convex ? Variant::Concave : Variant::Convex;
  return {-d.beta(), -d.alpha(), d.gamma(), d.sigma(), v};
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double msp_objective(const ScoreSample& sample, double threshold, const NoisyQuadraticDistribution& d,
                     const QuadratureSpec& q) {
  sample.validate(false);
  if (!std::isfinite(threshold)) throw DomainError("msp_objective: non-finite threshold");
  const bool minimize = sample.direction == Direction::Minimize;
  std::vector<double> u;
  for (double s : sample.scores) {
    if (minimize ? s <= threshold : s >= threshold) u.push_back(minimize ? s : -s);
  }
  if (u.empty()) throw NoUncensoredData();
  std::sort(u.begin(), u.end());
  const std::size_t censored = sample.size() - u.size();
  return minimize ? msp_core(u, threshold, censored, d, q) : msp_core(u, -threshold, censored, mirrored(d), q);
}

FitResult fit_noisy_quadratic(const ScoreSample& sample, double threshold, const FitOptions& options) {
  sample.validate();
  if (!std::isfinite(threshold)) throw DomainError("fit: non-finite threshold");
  if (options.starts == 0) throw DomainError("fit: need at least one start");
  if (!(options.gamma_max > 0.0)) throw DomainError("fit: gamma_max must be positive");
  const bool minimize = sample.direction == Direction::Minimize;
  const std::size_t n = sample.size();
  const std::size_t m = sample.count_in_regime(threshold);
  if (m == 0) throw NoUncensoredData();
  if (m < options.min_uncensored) throw TooFewUncensored(m, options.min_uncensored);

  // Work in a normalized frame where the regime is z <= 0 and the model is
  // convex: z = +-(y - threshold) / range.
  const auto [lo_it, hi_it] = std::minmax_element(sample.scores.begin(), sample.scores.end());
  double scale = *hi_it - *lo_it;
  if (!(scale > 0.0)) scale = 1.0;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = (minimize ? sample.scores[i] - threshold : threshold - sample.scores[i]) / scale;
  }
  std::sort(z.begin(), z.end());
  std::vector<double> regime(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(m));
  const std::size_t censored = n - m;
  const double sigma_min = 1e-6;
  const double sigma_max = 1.0;

  auto objective = [&](const std::vector<double>& x) {
    const double alpha = x[0];
    const double beta = x[1];
    const double sigma = std::exp(x[2]);
    const double gamma = x[3];
    if (!(alpha < beta) || !(beta >= 0.0) || !(gamma > 0.0) || !(gamma <= options.gamma_max) ||
        !(sigma >= sigma_min) || !(sigma <= sigma_max)) {
      return std::numeric_limits<double>::infinity();
    }
    try {
      const NoisyQuadraticDistribution d(alpha, beta, gamma, sigma);
      const double v = msp_core(regime, 0.0, censored, d, options.quadrature);
      return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    } catch (const NumericFailure&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Moment heuristics for the seed ladder.
  const double best = regime.front();
  double s_reg = sample_sd(regime);
  double width = -best;
  if (!(width > 0.0)) width = s_reg > 0.0 ? s_reg : 1e-3;
  if (!(s_reg > 0.0)) s_reg = width;
  const std::size_t decile = std::max<std::size_t>(2, (n + 9) / 10);
  std::vector<double> top(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(std::min(decile, n)));
  double sigma0 = sample_sd(top);
  if (!(sigma0 > 0.0)) sigma0 = s_reg;
  sigma0 = std::clamp(sigma0, 10.0 * sigma_min, 0.5 * sigma_max);
  const double alpha0 = best - s_reg;
  const double beta0 = width;
  constexpr std::array<double, 3> kGammaLadder{1.0, 2.0, 4.0};
  const CounterRng rng(options.seed, 0x6d7370u);

  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  nm.f_tolerance = 1e-11;
  nm.x_tolerance = 1e-7;

  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  bool best_converged = false;
  for (std::size_t j = 0; j < options.starts; ++j) {
    double a = alpha0;
    double b = beta0;
    double s = sigma0;
    double g = std::min(kGammaLadder[j % 3], options.gamma_max);
    if (j >= kGammaLadder.size()) {
      const auto u01 = rng.uniform2(j, 0);
      const auto u23 = rng.uniform2(j, 1);
      a = alpha0 + s_reg * (2.0 * u01[0] - 1.0);
      b = beta0 * std::exp(0.7 * (2.0 * u01[1] - 1.0));
      s = sigma0 * std::exp(1.5 * (2.0 * u23[0] - 1.0));
      g = std::min(g * std::exp(0.35 * (2.0 * u23[1] - 1.0)), options.gamma_max);
    }
    if (!(a < b)) a = b - s_reg;
    s = std::clamp(s, 10.0 * sigma_min, 0.5 * sigma_max);
    std::vector<double> x0{a, b, std::log(s), g};
    const std::vector<double> steps{0.25 * s_reg, 0.25 * b, 0.5, 0.25 * g};
    auto r = nelder_mead(objective, x0, steps, nm);
    if (!std::isfinite(r.value)) continue;
    // Restart from the optimum with a fresh, smaller simplex to escape
    // premature collapse.
    const std::vector<double> polish_steps{0.05 * s_reg, 0.05 * std::max(r.x[1], 1e-3), 0.1, 0.05 * r.x[3]};
    auto p = nelder_mead(objective, r.x, polish_steps, nm);
    if (p.value <= r.value) r = p;
    if (r.value < best_value) {
      best_value = r.value;
      best_x = r.x;
      best_converged = r.converged;
    }
  }
  if (best_x.empty()) throw AllStartsFailed();

  const double sigma = std::exp(best_x[2]) * scale;
  FitResult result{NoisyQuadraticDistribution(0.0, 1.0, 1.0, 0.0)};
  if (minimize) {
    result.dist = NoisyQuadraticDistribution(threshold + scale * best_x[0], threshold + scale * best_x[1], best_x[3],
                                             sigma, Variant::Convex);
  } else {
    result.dist = NoisyQuadraticDistribution(threshold - scale * best_x[1], threshold - scale * best_x[0], best_x[3],
                                             sigma, Variant::Concave);
  }
  result.threshold = threshold;
  result.n = n;
  result.n_censored = censored;
  result.objective = msp_objective(sample, threshold, result.dist, options.quadrature);
  result.converged = best_converged;
  result.starts_tried = options.starts;
  result.direction = sample.direction;
  return result;
}

}  // namespace hpsurf
