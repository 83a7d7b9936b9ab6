#include "hpsurf/noisy_quadratic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "hpsurf/errors.hpp"
#include "hpsurf/gauss_rules.hpp"
#include "hpsurf/normal.hpp"
#include "hpsurf/quadrature.hpp"
#include "hpsurf/rng.hpp"

namespace hpsurf {
namespace {

// Beyond this many noise standard deviations from the support, the
// distribution is treated as fully saturated.
constexpr double kSaturation = 38.0;

enum class Kernel {
  Power,            // v^p
  ComplementPower,  // 1 - v^p
};

bool is_integral(double p) { return p == std::floor(p); }

// P(z1 <= Z <= z2) without cancellation in either tail.
double normal_mass(double z1, double z2) {
  if (z2 <= z1) return 0.0;
  if (z1 > 0.0) return normal::sf(z1) - normal::sf(z2);
  return normal::cdf(z2) - normal::cdf(z1);
}

double kernel_value(Kernel kernel, double v, double p, bool integral) {
  if (integral) {
    const double vp = std::pow(v, p);
    return kernel == Kernel::Power ? vp : 1.0 - vp;
  }
  if (v <= 0.0) return kernel == Kernel::Power ? 0.0 : 1.0;
  const double lv = p * std::log(v);
  return kernel == Kernel::Power ? std::exp(lv) : -std::expm1(lv);
}

double phi(double z) { return normal::kInvSqrt2Pi * std::exp(-0.5 * z * z); }

int rule_size(double width) {
  if (width <= 3.0) return 16;
  if (width <= 8.0) return 24;
  if (width <= 14.0) return 32;
  return 40;
}

double adaptive_integral(Kernel kernel, double mu, double s, double p, double lo, double hi,
                         const QuadratureSpec& q) {
  const double z_lo = (lo - mu) / s;
  const double z_hi = (hi - mu) / s;
  const quad::Tolerance tol{q.relative_tolerance, 1e-300, q.max_subdivisions};
  if (kernel == Kernel::Power && p < 0.0 && lo == 0.0) {
    // v = u^(1/(p+1)) turns v^p dv into du / (p + 1).
    const double e = p + 1.0;
    const double inv_e = 1.0 / e;
    auto f = [&](double u) { return phi((std::pow(u, inv_e) - mu) / s); };
    std::array<double, 3> bp{0.0, std::pow(hi, e), 0.0};
    std::size_t count = 2;
    if (mu > 0.0 && mu < hi) {
      bp = {0.0, std::pow(mu, e), std::pow(hi, e)};
      count = 3;
    }
    const auto r = quad::integrate(f, std::span<const double>(bp.data(), count), tol);
    return r.value / (e * s);
  }
  const bool integral = is_integral(p);
  auto f = [&](double z) { return kernel_value(kernel, mu + s * z, p, integral) * phi(z); };
  std::array<double, 3> bp{z_lo, z_hi, z_hi};
  std::size_t count = 2;
  if (z_lo < 0.0 && z_hi > 0.0) {
    bp = {z_lo, 0.0, z_hi};
    count = 3;
  }
  return quad::integrate(f, std::span<const double>(bp.data(), count), tol).value;
}

// integral_0^hi v^p phi((v - mu)/s)/s dv by Gauss-Jacobi with weight
// (1+x)^p, which absorbs the endpoint singularity of v^p at 0.
double jacobi_panel(double mu, double s, double p, double hi) {
  const double z_c = -mu / s;
  const double half_t = 0.5 * hi / s;
  const auto& rule = quad::jacobi_cached(rule_size(2.0 * half_t), p);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * phi(z_c + half_t * (1.0 + rule.nodes[i]));
  }
  return std::exp((p + 1.0) * std::log(0.5 * hi)) / s * sum;
}

// integral over z in [z_lo, z_hi] of k(mu + s z) phi(z) by Gauss-Legendre.
double legendre_panel(Kernel kernel, double mu, double s, double p, double z_lo, double z_hi) {
  const bool integral = is_integral(p);
  const double half = 0.5 * (z_hi - z_lo);
  const double mid = 0.5 * (z_hi + z_lo);
  const auto& rule = quad::legendre(rule_size(z_hi - z_lo));
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z = mid + half * rule.nodes[i];
    sum += rule.weights[i] * kernel_value(kernel, mu + s * z, p, integral) * phi(z);
  }
  return half * sum;
}

double gaussian_integral(Kernel kernel, double mu, double s, double p, double lo, double hi,
                         const QuadratureSpec& q) {
  const double z_lo = (lo - mu) / s;
  const double z_hi = (hi - mu) / s;

  if (lo == 0.0) {
    // When the mean lies well below 0 the integrand decays steeply from the
    // singular end: a short Jacobi panel, then Legendre panels growing
    // geometrically away from the singularity.
    const double z_c = -mu / s;
    const double t_hi = hi / s;
    double power;
    if (z_c > 2.0 && t_hi > 2.0 / z_c) {
      double t = 2.0 / z_c;
      power = jacobi_panel(mu, s, p, s * t);
      while (t < t_hi) {
        const double t_next = std::min(4.0 * t, t_hi);
        power += legendre_panel(Kernel::Power, mu, s, p, z_c + t, z_c + t_next);
        t = t_next;
      }
    } else {
      power = jacobi_panel(mu, s, p, hi);
    }
    return kernel == Kernel::Power ? power : std::max(normal_mass(z_lo, z_hi) - power, 0.0);
  }

  const double window = q.clip_width;
  const bool untruncated = z_lo <= -window * (1.0 - 1e-12) && z_hi >= window * (1.0 - 1e-12);
  if (untruncated && window >= 9.0) {
    const bool integral = is_integral(p);
    const auto& rule = quad::hermite(20);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      sum += rule.weights[i] * kernel_value(kernel, mu + s * rule.nodes[i], p, integral);
    }
    return sum;
  }
  return legendre_panel(kernel, mu, s, p, z_lo, z_hi);
}

// integral over [lo, hi] of k(v) phi((v - mu)/s)/s dv, where [lo, hi] has
// already been intersected with the clip window and (if needed) v >= 0.
double kernel_integral(Kernel kernel, double mu, double s, double p, double lo, double hi, const QuadratureSpec& q) {
  if (!(hi > lo)) return 0.0;
  const double z_lo = (lo - mu) / s;
  const double z_hi = (hi - mu) / s;

  if (p == 0.0) return kernel == Kernel::Power ? normal_mass(z_lo, z_hi) : 0.0;
  if (p == 1.0) {
    const double mass = normal_mass(z_lo, z_hi);
    const double tilt = s * (normal::pdf(z_lo) - normal::pdf(z_hi));
    return kernel == Kernel::Power ? mu * mass + tilt : (1.0 - mu) * mass - tilt;
  }
  if (q.method == QuadratureMethod::Adaptive) return adaptive_integral(kernel, mu, s, p, lo, hi, q);
  return gaussian_integral(kernel, mu, s, p, lo, hi, q);
}

// Restricts [a, b] to the clip window and, for non-integral p, to v >= 0.
std::pair<double, double> integration_window(double mu, double s, double p, double a, double b,
                                             const QuadratureSpec& q) {
  double lo = std::max(a, mu - q.clip_width * s);
  double hi = std::min(b, mu + q.clip_width * s);
  if (!is_integral(p)) lo = std::max(lo, 0.0);
  return {lo, hi};
}

// Convex-form quantities for a point whose standardized position inside the
// support is mu (0 at the tail edge, 1 at the far edge) with noise scale s;
// z_edge = (tail edge - y)/sigma and z_far = (y - far edge)/sigma.
struct ConvexPoint {
  double mu;
  double s;
  double z_edge;
  double z_far;
};

double convex_cdf(const ConvexPoint& pt, double p, const QuadratureSpec& q) {
  if (pt.z_far > kSaturation) return 1.0;
  if (pt.z_edge > kSaturation) return 0.0;
  const auto [lo, hi] = integration_window(pt.mu, pt.s, p, 0.0, 1.0, q);
  const double value = normal::cdf(pt.z_far) + kernel_integral(Kernel::Power, pt.mu, pt.s, p, lo, hi, q);
  return std::clamp(value, 0.0, 1.0);
}

double convex_sf(const ConvexPoint& pt, double p, const QuadratureSpec& q) {
  if (pt.z_far > kSaturation) return 0.0;
  if (pt.z_edge > kSaturation) return 1.0;
  const auto [lo, hi] = integration_window(pt.mu, pt.s, p, 0.0, 1.0, q);
  const double value = normal::cdf(pt.z_edge) + kernel_integral(Kernel::ComplementPower, pt.mu, pt.s, p, lo, hi, q);
  return std::clamp(value, 0.0, 1.0);
}

double convex_pdf_unscaled(const ConvexPoint& pt, double p, const QuadratureSpec& q) {
  if (pt.z_far > kSaturation || pt.z_edge > kSaturation) return 0.0;
  const auto [lo, hi] = integration_window(pt.mu, pt.s, p, 0.0, 1.0, q);
  return kernel_integral(Kernel::Power, pt.mu, pt.s, p, lo, hi, q);
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0)) throw DomainError("quadrature tolerance must be positive");
  if (max_subdivisions < 1) throw DomainError("quadrature needs at least one subdivision");
  if (!(clip_width > 0.0)) throw DomainError("quadrature clip width must be positive");
}

double partial_power_expectation(double mu, double s, double p, double a, double b, const QuadratureSpec& q) {
  q.validate();
  if (!(p > -1.0)) throw DomainError("partial expectation of v^p diverges for p <= -1");
  if (!(s > 0.0)) throw DomainError("partial expectation needs a positive scale");
  if (a > b) throw DomainError("partial expectation needs a <= b");
  if (!std::isfinite(mu)) throw DomainError("partial expectation needs a finite mean");
  const auto [lo, hi] = integration_window(mu, s, p, a, b, q);
  return kernel_integral(Kernel::Power, mu, s, p, lo, hi, q);
}

NoisyQuadraticDistribution::NoisyQuadraticDistribution(double alpha, double beta, double gamma, double sigma,
                                                       Variant variant)
    : base_(alpha, beta, gamma, variant), sigma_(sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw DomainError("noise scale must be finite and nonnegative");
}

namespace {

ConvexPoint convex_point(const NoisyQuadraticDistribution& d, double y) {
  const double span = d.beta() - d.alpha();
  if (d.variant() == Variant::Convex) {
    return {(y - d.alpha()) / span, d.sigma() / span, (d.alpha() - y) / d.sigma(), (y - d.beta()) / d.sigma()};
  }
  // Mirror image through the midpoint of the support.
  return {(d.beta() - y) / span, d.sigma() / span, (y - d.beta()) / d.sigma(), (d.alpha() - y) / d.sigma()};
}

}  // namespace

double NoisyQuadraticDistribution::cdf(double y, const QuadratureSpec& q) const {
  if (!std::isfinite(y)) throw DomainError("noisy quadratic cdf: non-finite argument");
  if (sigma_ == 0.0) return base_.cdf(y);
  const auto pt = convex_point(*this, y);
  const double p = 0.5 * gamma();
  return variant() == Variant::Convex ? convex_cdf(pt, p, q) : convex_sf(pt, p, q);
}

double NoisyQuadraticDistribution::sf(double y, const QuadratureSpec& q) const {
  if (!std::isfinite(y)) throw DomainError("noisy quadratic sf: non-finite argument");
  if (sigma_ == 0.0) return base_.sf(y);
  const auto pt = convex_point(*this, y);
  const double p = 0.5 * gamma();
  return variant() == Variant::Convex ? convex_sf(pt, p, q) : convex_cdf(pt, p, q);
}

double NoisyQuadraticDistribution::pdf(double y, const QuadratureSpec& q) const {
  if (!std::isfinite(y)) throw DomainError("noisy quadratic pdf: non-finite argument");
  if (sigma_ == 0.0) return base_.pdf(y);
  const auto pt = convex_point(*this, y);
  const double span = beta() - alpha();
  return gamma() / (2.0 * span) * convex_pdf_unscaled(pt, 0.5 * gamma() - 1.0, q);
}

double NoisyQuadraticDistribution::quantile(double p, const QuadratureSpec& q) const {
  if (sigma_ == 0.0) return base_.quantile(p);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("noisy quadratic quantile: p must lie in (0, 1)");
  // Increasing in y; uses the smaller tail for precision.
  auto g = [&](double y) { return p <= 0.5 ? cdf(y, q) - p : (1.0 - p) - sf(y, q); };
  double lo = alpha() - 10.0 * sigma_;
  double hi = beta() + 10.0 * sigma_;
  double width = hi - lo;
  int expansions = 0;
  while (g(lo) > 0.0) {
    if (++expansions > 60) throw NumericFailure("noisy quadratic quantile: bracket expansion failed");
    width *= 2.0;
    lo -= width;
  }
  while (g(hi) < 0.0) {
    if (++expansions > 60) throw NumericFailure("noisy quadratic quantile: bracket expansion failed");
    width *= 2.0;
    hi += width;
  }
  const double scale = std::max(beta() - alpha(), sigma_);
  auto done = [scale](double a, double b) { return std::abs(b - a) <= 1e-10 * std::max(scale, std::abs(a)); };
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, done, max_iter);
  return 0.5 * (a + b);
}

std::vector<double> NoisyQuadraticDistribution::sample(std::size_t n, std::uint64_t seed) const {
  const CounterRng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = base_.quantile(rng.uniform(i));
    out[i] = sigma_ == 0.0 ? q : q + sigma_ * rng.normal(i, 1);
  }
  return out;
}

}  // namespace hpsurf
