#pragma once

#include <cstdint>
#include <vector>

#include "hpsurf/quadratic.hpp"

namespace hpsurf {

/// Gaussian: fixed Gauss-Jacobi / Gauss-Hermite / Gauss-Legendre rules
/// (relative error around 1e-12, a few dozen evaluations).
/// Adaptive: globally adaptive Gauss-Kronrod subdivision to
/// relative_tolerance; much slower, used as a reference.
enum class QuadratureMethod { Gaussian, Adaptive };

/// Accuracy controls for the partial-expectation integrals.
struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::Gaussian;
  double relative_tolerance = 1e-10;
  int max_subdivisions = 200;
  /// Integration is restricted to mean +/- clip_width standard deviations.
  double clip_width = 10.0;

  /// Throws DomainError on nonpositive tolerance, subdivisions or width.
  void validate() const;
};

/// Partial expectation of V^p over [a, b] for V ~ Normal(mu, s):
///   integral_a^b v^p phi((v - mu) / s) / s dv.
/// For non-integral p the range is further restricted to v >= 0, and the
/// endpoint singularity at v = 0 is absorbed into a Gauss-Jacobi weight
/// (adaptive mode for p in (-1, 0) substitutes u = v^(p+1) instead).
double partial_power_expectation(double mu, double s, double p, double a, double b, const QuadratureSpec& q = {});

/// The noisy quadratic distribution: Q + E with Q quadratic(alpha, beta,
/// gamma) and E ~ Normal(0, sigma) independent. sigma = 0 reduces every
/// operation to the noiseless quadratic distribution.
class NoisyQuadraticDistribution {
 public:
  NoisyQuadraticDistribution(double alpha, double beta, double gamma, double sigma, Variant variant = Variant::Convex);

  double alpha() const { return base_.alpha(); }
  double beta() const { return base_.beta(); }
  double gamma() const { return base_.gamma(); }
  double sigma() const { return sigma_; }
  Variant variant() const { return base_.variant(); }
  const QuadraticDistribution& noiseless() const { return base_; }

  double cdf(double y, const QuadratureSpec& q = {}) const;
  /// Survival function 1 - cdf(y); both tails are computed as sums of
  /// nonnegative terms, so either is accurate where it is small.
  double sf(double y, const QuadratureSpec& q = {}) const;
  double pdf(double y, const QuadratureSpec& q = {}) const;
  /// Numerical inverse of cdf. Throws DomainError for p in {0, 1} when
  /// sigma > 0, NumericFailure if no bracket is found.
  double quantile(double p, const QuadratureSpec& q = {}) const;
  /// Definitional draws Q + sigma * Z; draw i depends only on (seed, i).
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  friend bool operator==(const NoisyQuadraticDistribution&, const NoisyQuadraticDistribution&) = default;

 private:
  QuadraticDistribution base_;
  double sigma_;
};

}  // namespace hpsurf
