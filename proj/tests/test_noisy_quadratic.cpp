#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hpsurf/errors.hpp"
#include "hpsurf/noisy_quadratic.hpp"
#include "hpsurf/normal.hpp"
#include "hpsurf/quadrature.hpp"
#include "hpsurf/rng.hpp"

using namespace hpsurf;

namespace {

double Phi(double z) { return normal::cdf(z); }

// Composite trapezoid of v^p phi((v - mu)/s)/s over [0, b], on dyadic panels
// [2^-(k+1) b, 2^-k b] shrinking toward the singular endpoint; the last
// sliver uses the leading-order term v^p phi(-mu/s)/s.
double trapezoid_oracle(double mu, double s, double p, double b) {
  auto f = [&](double v) { return std::pow(v, p) * normal::pdf((v - mu) / s) / s; };
  double total = 0.0, hi = b;
  const int levels = 80, steps = 4000;
  for (int k = 0; k < levels; ++k) {
    const double lo = 0.5 * hi;
    const double h = (hi - lo) / steps;
    double panel = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < steps; ++i) panel += f(lo + i * h);
    total += panel * h;
    hi = lo;
  }
  total += std::pow(hi, p + 1) / (p + 1) * normal::pdf(-mu / s) / s;
  return total;
}

template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

QuadratureSpec adaptive() {
  QuadratureSpec q;
  q.method = QuadratureMethod::Adaptive;
  q.relative_tolerance = 1e-12;
  q.max_subdivisions = 400;
  return q;
}

}  // namespace

TEST(PartialExpectation, ZeroPowerIsNormalProbability) {
  EXPECT_NEAR(partial_power_expectation(0.5, 0.1, 0.0, 0.0, 1.0), Phi(5) - Phi(-5), 1e-14);
  EXPECT_NEAR(partial_power_expectation(0.5, 0.1, 0.0, 0.0, 1.0), 0.99999942, 1e-8);
}

TEST(PartialExpectation, UnitPowerSymmetricTruncation) {
  EXPECT_NEAR(partial_power_expectation(0.5, 0.1, 1.0, 0.0, 1.0), 0.5 * (Phi(5) - Phi(-5)), 1e-14);
  EXPECT_NEAR(partial_power_expectation(0.5, 0.1, 1.0, 0.0, 1.0), 0.49999971, 1e-8);
}

TEST(PartialExpectation, SingularPowerMatchesTrapezoidOracle) {
  const double oracle = trapezoid_oracle(0.3, 0.2, -0.5, 1.0);
  EXPECT_NEAR(partial_power_expectation(0.3, 0.2, -0.5, 0.0, 1.0), oracle, 1e-6);
  EXPECT_NEAR(partial_power_expectation(0.3, 0.2, -0.5, 0.0, 1.0, adaptive()), oracle, 1e-6);
}

TEST(PartialExpectation, Errors) {
  EXPECT_THROW(partial_power_expectation(0.3, 0.2, -1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(partial_power_expectation(0.3, 0.2, 0.5, 1.0, 0.0), DomainError);
  EXPECT_THROW(partial_power_expectation(0.3, 0.0, 0.5, 0.0, 1.0), DomainError);
  QuadratureSpec bad;
  bad.relative_tolerance = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = {};
  bad.max_subdivisions = 0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = {};
  bad.clip_width = -1;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(PartialExpectation, GaussianRulesAgreeWithAdaptive) {
  double worst = 0.0;
  for (double p : {-0.9, -0.75, -0.5, -0.25, 0.25, 0.5, 1.5, 2.0, 3.75, 7.0, 15.5}) {
    for (double s : {1e-5, 1e-3, 0.01, 0.1, 0.5, 2.0}) {
      for (double mu : {-3.0, -0.5, -0.01, 0.0, 0.02, 0.3, 0.7, 1.0, 1.3, 4.0}) {
        const double fast = partial_power_expectation(mu, s, p, 0.0, 1.0);
        const double ref = partial_power_expectation(mu, s, p, 0.0, 1.0, adaptive());
        const double err = std::abs(fast - ref) / std::max(std::abs(ref), 1e-280);
        if (ref > 1e-280) worst = std::max(worst, err);
        EXPECT_LE(err, 1e-9) << "p=" << p << " s=" << s << " mu=" << mu << " fast=" << fast << " ref=" << ref;
      }
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(NoisyCdf, Examples) {
  EXPECT_NEAR(NoisyQuadraticDistribution(0, 1, 2, 0.1).cdf(0.5), 0.5, 1e-12);
  EXPECT_NEAR(NoisyQuadraticDistribution(0, 1, 3, 1e-14).cdf(0.5), std::pow(0.5, 1.5), 1e-9);
  EXPECT_NEAR(NoisyQuadraticDistribution(0, 1, 3, 1e-14).cdf(0.5), 0.35355, 1e-5);
}

TEST(NoisyCdf, MonteCarloOracle) {
  const NoisyQuadraticDistribution d(0, 1, 3, 0.1);
  const std::size_t n = 10000000;
  const auto xs = d.sample(n, 77);
  const auto below = static_cast<double>(std::count_if(xs.begin(), xs.end(), [](double x) { return x <= 0.5; }));
  const double F = d.cdf(0.5);
  EXPECT_NEAR(below / n, F, 3.0 * std::sqrt(F * (1 - F) / n));
}

TEST(NoisyCdf, NonFiniteArgument) {
  const NoisyQuadraticDistribution d(0, 1, 3, 0.1);
  EXPECT_THROW(d.cdf(std::nan("")), DomainError);
  EXPECT_THROW(d.pdf(-INFINITY), DomainError);
  EXPECT_THROW(d.sf(INFINITY), DomainError);
  EXPECT_THROW(NoisyQuadraticDistribution(0, 1, 3, -0.1), DomainError);
}

TEST(NoisyPdf, Examples) {
  const NoisyQuadraticDistribution d(0, 1, 2, 0.1);
  for (double t : {0.1, 0.3}) EXPECT_NEAR(d.pdf(0.5 - t), d.pdf(0.5 + t), 1e-12);
  EXPECT_NEAR(NoisyQuadraticDistribution(0, 1, 4, 1e-14).pdf(0.5), 1.0, 1e-9);
}

TEST(NoisyPdf, IntegratesToOne) {
  const NoisyQuadraticDistribution d(0, 1, 1, 0.05);
  const std::vector<double> bp{-1.0, -0.2, 0.0, 0.05, 0.2, 1.0, 1.2, 2.0};
  quad::Tolerance tol;
  tol.relative = 1e-10;
  tol.max_subdivisions = 500;
  const auto r = quad::integrate([&](double y) { return d.pdf(y); }, std::span<const double>(bp), tol);
  EXPECT_NEAR(r.value, 1.0, 1e-6);
}

TEST(NoisyQuantile, Examples) {
  const NoisyQuadraticDistribution d(0, 1, 2, 0.1);
  EXPECT_NEAR(d.quantile(0.5), 0.5, 1e-9);
  for (double p : {0.01, 0.5, 0.99}) EXPECT_NEAR(d.cdf(d.quantile(p)), p, 1e-8);
  EXPECT_THROW(d.quantile(0.0), DomainError);
  EXPECT_THROW(d.quantile(1.0), DomainError);
  const NoisyQuadraticDistribution noiseless(0, 1, 2, 0.0);
  EXPECT_DOUBLE_EQ(noiseless.quantile(0.0), 0.0);
  EXPECT_DOUBLE_EQ(noiseless.quantile(1.0), 1.0);
}

TEST(NoisyQuantile, OrderStatisticOracle) {
  const NoisyQuadraticDistribution d(0, 1, 3, 0.1);
  const std::size_t n = 10000000;
  auto xs = d.sample(n, 12345);
  const auto k = static_cast<std::size_t>(0.1 * n);
  std::nth_element(xs.begin(), xs.begin() + k, xs.end());
  const double q = d.quantile(0.1);
  const double se = std::sqrt(0.1 * 0.9 / n) / d.pdf(q);
  EXPECT_NEAR(xs[k], q, 4.0 * se);
}

TEST(NoisySample, NoiselessAndDeterministic) {
  const NoisyQuadraticDistribution noisy(0, 1, 3, 0.0);
  const QuadraticDistribution plain(0, 1, 3);
  EXPECT_EQ(noisy.sample(1000, 5), plain.sample(1000, 5));
  const NoisyQuadraticDistribution d(0, 1, 3, 0.1);
  EXPECT_EQ(d.sample(500, 8), d.sample(500, 8));
  EXPECT_TRUE(d.sample(0, 8).empty());
}

TEST(NoisySample, KsMillion) {
  const NoisyQuadraticDistribution d(0, 1, 3, 0.1);
  const std::size_t n = 1000000;
  const auto xs = d.sample(n, 99);
  EXPECT_LT(ks_distance(xs, [&](double x) { return d.cdf(x); }), 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(NoisyInvariants, ReflectionDuality) {
  for (double g : {0.5, 1.0, 2.0, 4.5}) {
    for (double s : {0.01, 0.1, 0.7}) {
      const NoisyQuadraticDistribution cv(-1, 2, g, s), cc(-1, 2, g, s, Variant::Concave);
      for (int i = 0; i <= 60; ++i) {
        const double y = -2.0 + 5.0 * i / 60.0;
        EXPECT_NEAR(cc.cdf(y), 1.0 - cv.cdf(1.0 - y), 1e-9);
        EXPECT_NEAR(cc.sf(y), cv.cdf(1.0 - y), 1e-9);
      }
    }
  }
}

TEST(NoisyInvariants, StrictlyIncreasingWithLimits) {
  for (double g : {0.5, 2.0, 6.0}) {
    const NoisyQuadraticDistribution d(0, 1, g, 0.05);
    double prev = -1.0;
    for (int i = 0; i <= 400; ++i) {
      const double y = -0.3 + 1.6 * i / 400.0;
      const double F = d.cdf(y);
      ASSERT_GT(F, prev) << y;
      prev = F;
    }
    EXPECT_LT(d.cdf(-5.0), 1e-300);
    EXPECT_EQ(d.cdf(5.0), 1.0);
    EXPECT_EQ(d.sf(-5.0), 1.0);
  }
}

TEST(NoisyInvariants, CdfPlusSfIsOne) {
  const NoisyQuadraticDistribution d(0, 1, 1.5, 0.2);
  for (int i = 0; i <= 50; ++i) {
    const double y = -1.0 + 3.0 * i / 50.0;
    EXPECT_NEAR(d.cdf(y) + d.sf(y), 1.0, 1e-12);
  }
}

TEST(NoisyInvariants, NoiselessReduction) {
  double worst = 0.0;
  for (double a : {-1.0, 0.0, 2.0}) {
    for (double w : {0.5, 1.0, 3.0}) {
      for (double g : {0.5, 2.0, 5.0}) {
        const NoisyQuadraticDistribution noisy(a, a + w, g, 1e-12);
        const QuadraticDistribution plain(a, a + w, g);
        for (int i = 0; i <= 1000; ++i) {
          const double y = a - 0.1 * w + 1.2 * w * i / 1000.0;
          worst = std::max(worst, std::abs(noisy.cdf(y) - plain.cdf(y)));
        }
      }
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(NoisyInvariants, PdfIsDerivativeOfCdf) {
  for (double g : {0.7, 2.0, 3.0, 6.0}) {
    const NoisyQuadraticDistribution d(0, 1, g, 0.1);
    for (int i = 0; i < 21; ++i) {
      const double y = -0.2 + 1.4 * (i + 0.5) / 21.0;
      const double h = 1e-5;
      const double fd = (d.cdf(y + h) - d.cdf(y - h)) / (2 * h);
      EXPECT_NEAR(fd / d.pdf(y), 1.0, 1e-5) << "g=" << g << " y=" << y;
    }
  }
}

TEST(NoisyInvariants, LocationScaleEquivariance) {
  for (double g : {0.5, 2.0, 3.5}) {
    const NoisyQuadraticDistribution d(0.2, 1.1, g, 0.07);
    for (double c : {0.01, 3.0, 250.0}) {
      for (double b : {-7.0, 0.0, 40.0}) {
        const NoisyQuadraticDistribution t(c * 0.2 + b, c * 1.1 + b, g, c * 0.07);
        for (int i = 0; i <= 30; ++i) {
          const double y = -0.1 + 1.4 * i / 30.0;
          EXPECT_NEAR(t.cdf(c * y + b), d.cdf(y), 1e-10);
        }
      }
    }
  }
}

TEST(NoisyTail, ExtremeUpperTailSaturates) {
  const NoisyQuadraticDistribution d(0, 1, 2, 0.01);
  EXPECT_EQ(d.cdf(1.0 + 39 * 0.01), 1.0);
  EXPECT_EQ(d.sf(1.0 + 39 * 0.01), 0.0);
  EXPECT_GT(d.sf(1.0 + 5 * 0.01), 0.0);
}

TEST(NoisyTail, SmallTailsAreRelativelyAccurate) {
  const NoisyQuadraticDistribution d(0, 1, 3, 0.05);
  const auto q = adaptive();
  for (double y : {-0.3, -0.2, -0.1, 1.1, 1.2}) {
    const double F = d.cdf(y), Fr = d.cdf(y, q);
    const double S = d.sf(y), Sr = d.sf(y, q);
    EXPECT_NEAR(F / Fr, 1.0, 1e-8) << y;
    EXPECT_NEAR(S / Sr, 1.0, 1e-8) << y;
  }
}
