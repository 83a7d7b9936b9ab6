#include "hpsurf/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hpsurf/errors.hpp"
#include "hpsurf/rng.hpp"

namespace hpsurf {

std::string_view to_string(Variant v) { return v == Variant::Convex ? "convex" : "concave"; }

Variant parse_variant(std::string_view s) {
  if (s == "convex") return Variant::Convex;
  if (s == "concave") return Variant::Concave;
  throw DomainError("unknown variant: " + std::string(s));
}

QuadraticDistribution::QuadraticDistribution(double alpha, double beta, double gamma, Variant variant)
    : alpha_(alpha), beta_(beta), gamma_(gamma), variant_(variant) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw DomainError("quadratic distribution parameters must be finite");
  }
  if (!(alpha < beta)) throw DomainError("quadratic distribution requires alpha < beta");
  if (!(gamma > 0.0)) throw DomainError("quadratic distribution requires gamma > 0");
}

double QuadraticDistribution::omega() const { return std::pow(beta_ - alpha_, -0.5 * gamma_); }

double QuadraticDistribution::edge_fraction(double y) const {
  const double span = beta_ - alpha_;
  const double t = variant_ == Variant::Convex ? (y - alpha_) / span : (beta_ - y) / span;
  return std::clamp(t, 0.0, 1.0);
}

namespace {

// 1 - t^e without cancellation near t = 1.
double complement_power(double t, double e) { return t > 0.0 ? -std::expm1(e * std::log(t)) : 1.0; }

}  // namespace

double QuadraticDistribution::cdf(double y) const {
  if (!std::isfinite(y)) throw DomainError("quadratic cdf: non-finite argument");
  const double t = edge_fraction(y);
  return variant_ == Variant::Convex ? std::pow(t, 0.5 * gamma_) : complement_power(t, 0.5 * gamma_);
}

double QuadraticDistribution::sf(double y) const {
  if (!std::isfinite(y)) throw DomainError("quadratic sf: non-finite argument");
  const double t = edge_fraction(y);
  return variant_ == Variant::Convex ? complement_power(t, 0.5 * gamma_) : std::pow(t, 0.5 * gamma_);
}

double QuadraticDistribution::pdf(double y) const {
  if (!std::isfinite(y)) throw DomainError("quadratic pdf: non-finite argument");
  if (y < alpha_ || y > beta_) return 0.0;
  const double t = edge_fraction(y);
  const double exponent = 0.5 * (gamma_ - 2.0);
  if (t == 0.0 && exponent < 0.0) return std::numeric_limits<double>::infinity();
  return gamma_ / (2.0 * (beta_ - alpha_)) * std::pow(t, exponent);
}

double QuadraticDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quadratic quantile: p outside [0, 1]");
  const double span = beta_ - alpha_;
  if (variant_ == Variant::Convex) return alpha_ + span * std::pow(p, 2.0 / gamma_);
  return beta_ - span * std::pow(1.0 - p, 2.0 / gamma_);
}

std::vector<double> QuadraticDistribution::sample(std::size_t n, std::uint64_t seed) const {
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = quantile(rng.uniform(i));
  return out;
}

}  // namespace hpsurf
