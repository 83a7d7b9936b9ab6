#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace hpsurf {

/// Convex variants describe the left (minimization) tail, concave the right
/// (maximization) tail.
enum class Variant { Convex, Concave };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

/// The quadratic distribution on [alpha, beta] with shape gamma, the
/// effective number of hyperparameters.
///
/// Convex:  F(y) = ((y - alpha) / (beta - alpha))^(gamma / 2)
/// Concave: F(y) = 1 - ((beta - y) / (beta - alpha))^(gamma / 2)
///
/// The alternative scale omega = (beta - alpha)^(-gamma / 2) is available
/// through omega() but not stored.
class QuadraticDistribution {
 public:
  /// Throws DomainError unless alpha < beta, gamma > 0, all finite.
  QuadraticDistribution(double alpha, double beta, double gamma, Variant variant = Variant::Convex);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  Variant variant() const { return variant_; }
  double omega() const;

  double cdf(double y) const;
  /// 1 - cdf(y), computed without cancellation.
  double sf(double y) const;
  /// Density; +inf at the singular support edge when gamma < 2.
  double pdf(double y) const;
  double quantile(double p) const;
  /// Inverse-transform draws; draw i depends only on (seed, i).
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  friend bool operator==(const QuadraticDistribution&, const QuadraticDistribution&) = default;

 private:
  // Fraction of the support between the tail edge and y, in [0, 1]; the
  // tail edge is alpha (convex) or beta (concave).
  double edge_fraction(double y) const;

  double alpha_;
  double beta_;
  double gamma_;
  Variant variant_;
};

}  // namespace hpsurf
