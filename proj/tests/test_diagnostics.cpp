#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hpsurf/diagnostics.hpp"
#include "hpsurf/errors.hpp"
#include "hpsurf/normal.hpp"
#include "hpsurf/quadrature.hpp"
#include "hpsurf/rng.hpp"

using namespace hpsurf;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  const CounterRng r(seed);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = scale * r.normal(i);
  return v;
}

// Chi-squared quantile by integrating the density with adaptive quadrature
// and bisecting on the cumulative integral.
double chisq_quantile_by_integration(double q, double nu) {
  auto density = [nu](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp((0.5 * nu - 1.0) * std::log(x) - 0.5 * x - 0.5 * nu * std::log(2.0) - std::lgamma(0.5 * nu));
  };
  quad::Tolerance tol;
  tol.relative = 1e-13;
  auto cdf = [&](double x) { return quad::integrate(density, 0.0, x, tol).value; };
  double lo = 0.0, hi = 10.0 * nu + 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(NormalQq, SinglePoint) {
  const auto qq = normal_qq({7.0});
  ASSERT_EQ(qq.points.size(), 1u);
  EXPECT_DOUBLE_EQ(qq.points[0].theoretical, 0.0);
}

TEST(NormalQq, ExactOrderStatisticsLieOnDiagonal) {
  const std::size_t n = 50;
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(normal::quantile((i + 0.5) / n));
  std::reverse(v.begin(), v.end());
  const auto qq = normal_qq(v, false);
  EXPECT_FALSE(qq.degenerate);
  for (const auto& p : qq.points) EXPECT_NEAR(p.sample, p.theoretical, 1e-9);
}

TEST(NormalQq, SlopeOfNormalDraws) {
  const auto qq = normal_qq(normals(10000, 5));
  double sxy = 0, sxx = 0;
  for (const auto& p : qq.points) {
    sxy += p.theoretical * p.sample;
    sxx += p.theoretical * p.theoretical;
  }
  const double slope = sxy / sxx;
  EXPECT_GE(slope, 0.98);
  EXPECT_LE(slope, 1.02);
}

TEST(NormalQq, AscendingAndPermutationInvariant) {
  auto v = normals(101, 7, 3.0);
  const auto a = normal_qq(v);
  std::rotate(v.begin(), v.begin() + 40, v.end());
  const auto b = normal_qq(v);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].theoretical, b.points[i].theoretical);
    EXPECT_DOUBLE_EQ(a.points[i].sample, b.points[i].sample);
    if (i > 0) {
      EXPECT_GT(a.points[i].theoretical, a.points[i - 1].theoretical);
      EXPECT_GE(a.points[i].sample, a.points[i - 1].sample);
    }
  }
}

TEST(NormalQq, ConstantSampleIsDegenerate) {
  const auto qq = normal_qq({2.0, 2.0, 2.0});
  EXPECT_TRUE(qq.degenerate);
  EXPECT_EQ(qq.points[0].sample, 1.0);
  EXPECT_EQ(qq.points[2].sample, 3.0);
  EXPECT_THROW(normal_qq({}), DomainError);
}

TEST(StdCi, ConstantSample) {
  const auto ci = std_ci_chisq({3.0, 3.0, 3.0, 3.0}, 0.95);
  EXPECT_EQ(ci.lo, 0.0);
  EXPECT_EQ(ci.hi, 0.0);
}

TEST(StdCi, Errors) {
  EXPECT_THROW(std_ci_chisq({1.0}, 0.95), DomainError);
  EXPECT_THROW(std_ci_chisq({1.0, 2.0}, 1.0), DomainError);
  EXPECT_THROW(std_ci_chisq({1.0, 2.0}, 0.0), DomainError);
}

TEST(StdCi, MatchesIntegratedQuantiles) {
  // Eleven values with sample std exactly 2.
  std::vector<double> v;
  for (int i = -5; i <= 5; ++i) v.push_back(i);
  const double s0 = sample_std(v);
  for (double& x : v) x *= 2.0 / s0;
  ASSERT_NEAR(sample_std(v), 2.0, 1e-14);
  const auto ci = std_ci_chisq(v, 0.95);
  const double hi_q = chisq_quantile_by_integration(0.975, 10);
  const double lo_q = chisq_quantile_by_integration(0.025, 10);
  EXPECT_NEAR(ci.lo, 2.0 * std::sqrt(10.0 / hi_q), 1e-6);
  EXPECT_NEAR(ci.hi, 2.0 * std::sqrt(10.0 / lo_q), 1e-6);
}

TEST(StdCi, CoverageSimulation) {
  int covered = 0;
  const int sims = 2000;
  for (int r = 0; r < sims; ++r) covered += std_ci_chisq(normals(128, 10000 + r), 0.95).contains(1.0);
  EXPECT_NEAR(covered / static_cast<double>(sims), 0.95, 0.02);
}

TEST(StdCi, ContainsSampleStdAndScalesLinearly) {
  std::uint64_t seed = 50;
  for (std::size_t n : {2, 3, 10, 200}) {
    for (double c : {0.1, 0.3, 0.3655, 0.5, 0.99}) {
      const auto v = normals(n, seed++);
      const auto ci = std_ci_chisq(v, c);
      const double s = sample_std(v);
      // s lies inside exactly when nu sits between the two chi-squared
      // quantiles; P(chi2_1 <= 1) = 0.6827 makes that automatic for
      // c >= 0.3654 and any nu.
      const double nu = static_cast<double>(n - 1);
      const bool inside = chisq_quantile(0.5 * (1 - c), nu) <= nu && nu <= chisq_quantile(0.5 * (1 + c), nu);
      EXPECT_EQ(ci.lo <= s && s <= ci.hi, inside) << n << " " << c;
      if (c >= 0.3655) EXPECT_TRUE(inside);
      std::vector<double> w;
      for (double x : v) w.push_back(4.5 * x);
      const auto cw = std_ci_chisq(w, c);
      EXPECT_NEAR(cw.lo, 4.5 * ci.lo, 1e-12 * cw.hi);
      EXPECT_NEAR(cw.hi, 4.5 * ci.hi, 1e-12 * cw.hi);
    }
  }
}

TEST(ChisqQuantile, AgreesWithIntegration) {
  for (double nu : {1.0, 2.0, 7.0, 127.0}) {
    for (double q : {0.005, 0.5, 0.975}) {
      EXPECT_NEAR(chisq_quantile(q, nu), chisq_quantile_by_integration(q, nu), 1e-8 * nu) << nu << " " << q;
    }
  }
}

TEST(Sidak, IndividualConfidence) {
  EXPECT_EQ(sidak_individual_confidence(0.95, 1), 0.95);
  EXPECT_NEAR(sidak_individual_confidence(0.95, 8), std::pow(0.95, 1.0 / 8), 1e-15);
  EXPECT_NEAR(sidak_individual_confidence(0.95, 8), 0.993607, 2e-6);
  for (std::size_t m : {2, 3, 8, 50}) {
    for (double c : {0.5, 0.8, 0.95, 0.999}) {
      EXPECT_NEAR(std::pow(sidak_individual_confidence(c, m), static_cast<double>(m)), c, 1e-12);
    }
  }
}

TEST(Sidak, SingleGroupUsesOverallConfidence) {
  GroupedScores g{{"a"}, {normals(20, 1)}};
  const auto rep = sidak_simultaneous_std_cis(g, 0.9);
  EXPECT_EQ(rep.individual_confidence, 0.9);
  const auto ci = std_ci_chisq(g.groups[0], 0.9);
  EXPECT_EQ(rep.intervals[0].interval.lo, ci.lo);
  EXPECT_EQ(rep.reference, std::vector<std::size_t>{0});
}

TEST(Sidak, ReferenceSubsetAndCommonValue) {
  GroupedScores g;
  for (int i = 0; i < 5; ++i) {
    g.labels.push_back("p" + std::to_string(i));
    g.groups.push_back(normals(64, 200 + i));
  }
  const auto rep = sidak_simultaneous_std_cis(g, 0.95);
  EXPECT_EQ(rep.reference, (std::vector<std::size_t>{2, 3, 4}));
  const double mean3 = (rep.intervals[2].std + rep.intervals[3].std + rep.intervals[4].std) / 3.0;
  EXPECT_DOUBLE_EQ(rep.common_value, mean3);
  const auto custom = sidak_simultaneous_std_cis(g, 0.95, std::vector<std::size_t>{0});
  EXPECT_DOUBLE_EQ(custom.common_value, rep.intervals[0].std);
  EXPECT_THROW(sidak_simultaneous_std_cis(g, 0.95, std::vector<std::size_t>{9}), DomainError);
  g.groups[1] = {1.0};
  EXPECT_THROW(sidak_simultaneous_std_cis(g, 0.95), DomainError);
}

TEST(Sidak, SimultaneousCoverageSimulation) {
  int all = 0;
  const int sims = 2000;
  for (int r = 0; r < sims; ++r) {
    GroupedScores g;
    for (int i = 0; i < 8; ++i) {
      g.labels.push_back(std::to_string(i));
      g.groups.push_back(normals(128, 1000000 + 8 * r + i));
    }
    const auto rep = sidak_simultaneous_std_cis(g, 0.95);
    all += std::all_of(rep.intervals.begin(), rep.intervals.end(),
                       [](const GroupInterval& gi) { return gi.interval.contains(1.0); });
  }
  EXPECT_NEAR(all / static_cast<double>(sims), 0.95, 0.02);
}
