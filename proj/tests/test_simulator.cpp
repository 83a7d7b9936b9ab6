#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hpsurf/errors.hpp"
#include "hpsurf/quadratic.hpp"
#include "hpsurf/simulator.hpp"

using namespace hpsurf;

namespace {

SyntheticSurface axis_surface(std::vector<double> eigenvalues, double noise = 0.0) {
  SyntheticSurface s;
  s.eigenvalues = std::move(eigenvalues);
  s.x_star.assign(s.eigenvalues.size(), 0.0);
  s.box = centered_box(s.x_star);
  s.rotation = identity_matrix(s.eigenvalues.size());
  s.noise_sigma = noise;
  return s;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

double sorted_at(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(std::ceil(p * v.size())) - 1];
}

}  // namespace

TEST(SurfaceMean, Examples) {
  const auto s = scenario("rank-deficient");
  EXPECT_EQ(surface_mean(s, s.x_star), s.y_star);

  auto one = axis_surface({2.0});
  EXPECT_DOUBLE_EQ(surface_mean(one, {1.0}), 1.0);
  EXPECT_THROW(surface_mean(one, {1.0, 2.0}), DomainError);

  // Null directions of a rotated surface.
  const auto r = scenario("rank-deficient", 0.0, 99);
  for (std::size_t null = 2; null < 6; ++null) {
    for (double t : {-3.0, 0.5, 12.0}) {
      std::vector<double> x(6);
      for (std::size_t i = 0; i < 6; ++i) x[i] = r.x_star[i] + t * r.rotation[i][null];
      EXPECT_NEAR(surface_mean(r, x), r.y_star, 1e-12);
    }
  }
}

TEST(SurfaceMean, NeverBelowOptimum) {
  for (const auto& name : scenario_names()) {
    for (std::uint64_t rot : {0, 5}) {
      auto s = scenario(name, 0.0, rot);
      s.y_star = -1.5;
      s.cubic = rot == 0 ? 0.0 : 0.3;
      const auto run = run_random_search(s, 2000, 3);
      for (double y : run.scores.scores) EXPECT_GE(y, s.y_star);
      // Evaluation outside the box is permitted.
      EXPECT_GE(surface_mean(s, std::vector<double>(s.dimension(), 7.0)), s.y_star);
    }
  }
}

TEST(RandomSearch, EmptyRunAndShapes) {
  const auto s = scenario("ill-conditioned");
  const auto empty = run_random_search(s, 0, 1);
  EXPECT_EQ(empty.size(), 0u);
  EXPECT_TRUE(empty.configurations.empty());
  const auto run = run_random_search(s, 17, 1);
  EXPECT_EQ(run.configurations.size(), 17u * 4u);
  EXPECT_EQ(run.dimension, 4u);
  for (std::size_t i = 0; i < run.configurations.size(); ++i) {
    EXPECT_GE(run.configurations[i], -1.0);
    EXPECT_LE(run.configurations[i], 1.0);
  }
}

TEST(RandomSearch, DeterministicPerIndex) {
  const auto s = scenario("rank-deficient", 0.05);
  const auto a = run_random_search(s, 500, 42);
  const auto b = run_random_search(s, 1000, 42);
  for (std::size_t i = 0; i < 500; ++i) EXPECT_EQ(a.scores.scores[i], b.scores.scores[i]);
  const auto c = run_random_search(s, 500, 43);
  EXPECT_NE(a.scores.scores, c.scores.scores);
}

TEST(RandomSearch, RunningMinimumApproachesOptimumFromAbove) {
  auto s = scenario("full-rank");
  s.y_star = 0.25;
  const auto run = run_random_search(s, 100000, 8);
  double best = std::numeric_limits<double>::infinity();
  double at_100 = 0.0;
  for (std::size_t i = 0; i < run.size(); ++i) {
    best = std::min(best, run.scores.scores[i]);
    EXPECT_GE(best, s.y_star);
    if (i == 99) at_100 = best;
  }
  EXPECT_LT(best - s.y_star, 1e-3);
  EXPECT_LT(best, at_100);
}

TEST(RandomSearch, LowQuantileMatchesQuadraticLimit) {
  // y = |x|^2 on [-1, 1]^2, so P(Y <= y) = (pi / 4) y near the optimum:
  // the limit is convex quadratic with alpha 0, gamma 2 and beta = 4 / pi.
  const auto run = run_random_search(scenario("full-rank"), 1000000, 11);
  const QuadraticDistribution limit(0.0, 4.0 / std::numbers::pi, 2.0, Variant::Convex);
  const double expected = limit.quantile(0.001);
  EXPECT_NEAR(sorted_at(run.scores.scores, 0.001), expected, 0.2 * expected);
}

TEST(LimitRatio, FullRankD2) {
  const auto run = run_random_search(scenario("full-rank"), 1000000, 21);
  const auto rows = limit_ratio_report(run, 0.0, 2, {0.01, 0.005, 0.001});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_GE(r.ratio, 0.9) << r.level;
    EXPECT_LE(r.ratio, 1.1) << r.level;
  }
}

TEST(LimitRatio, NullDirectionUsesEffectiveDimension) {
  const auto run = run_random_search(axis_surface({2.0, 2.0, 0.0}), 1000000, 22);
  const std::vector<double> levels{0.01, 0.005, 0.001};
  for (const auto& r : limit_ratio_report(run, 0.0, 2, levels)) {
    EXPECT_GE(r.ratio, 0.9) << r.level;
    EXPECT_LE(r.ratio, 1.1) << r.level;
  }
  const auto wrong = limit_ratio_report(run, 0.0, 3, levels);
  EXPECT_NEAR(wrong[0].ratio, 1.0, 1e-12);
  for (std::size_t i = 1; i < wrong.size(); ++i) {
    EXPECT_GT(wrong[i].ratio, wrong[i - 1].ratio);
    EXPECT_GT(std::abs(wrong[i].ratio - 1.0), 0.1);
  }
}

TEST(LimitRatio, SingleLevelIsExactlyOne) {
  const auto run = run_random_search(scenario("ill-conditioned"), 5000, 2);
  for (double p : {0.3, 0.01, 0.0002}) {
    const auto rows = limit_ratio_report(run, 0.0, 4, {p});
    EXPECT_EQ(rows[0].ratio, 1.0) << p;
  }
}

TEST(LimitRatio, Errors) {
  const auto noisy = run_random_search(scenario("full-rank", 0.1), 100, 2);
  EXPECT_THROW(limit_ratio_report(noisy, 0.0, 2, {0.01}), DomainError);
  const auto run = run_random_search(scenario("full-rank"), 100, 2);
  EXPECT_THROW(limit_ratio_report(run, 0.0, 2, {0.5}), DomainError);
  EXPECT_THROW(limit_ratio_report(run, 0.0, 2, {0.0}), DomainError);
  EXPECT_THROW(limit_ratio_report(run, 0.0, 0, {0.1}), DomainError);
  EXPECT_THROW(limit_ratio_report(run, 0.0, 2, {}), DomainError);
}

TEST(Rotation, HaarMatricesAreOrthonormal) {
  for (std::size_t d : {1, 2, 6, 20}) {
    const auto u = random_rotation(d, 1234 + d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += u[k][i] * u[k][j];
        EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-12);
      }
    }
  }
  EXPECT_EQ(random_rotation(4, 9), random_rotation(4, 9));
  EXPECT_NE(random_rotation(4, 9), random_rotation(4, 10));
}

TEST(Rotation, ScoreDistributionInvariantInsideInscribedBall) {
  // The sublevel sets {y <= 1} of these surfaces are balls inside the cube,
  // so the score distribution censored at 1 cannot depend on the rotation.
  const std::size_t n = 200000;
  const double critical = 1.628 * std::sqrt(2.0 / n);
  for (const auto& lambdas : {std::vector<double>{2.0, 2.0}, std::vector<double>{2.0, 2.0, 2.0}}) {
    auto a = axis_surface(lambdas);
    auto b = a;
    b.rotation = random_rotation(lambdas.size(), 77);
    auto ya = run_random_search(a, n, 1).scores.scores;
    auto yb = run_random_search(b, n, 2).scores.scores;
    for (double& y : ya) y = std::min(y, 1.0);
    for (double& y : yb) y = std::min(y, 1.0);
    EXPECT_LT(ks_two_sample(ya, yb), critical) << lambdas.size();
  }
}

namespace {

struct RecoveryCounts {
  int gamma = 0;
  int sigma = 0;
};

const RecoveryCounts& rank_deficient_recovery() {
  static const RecoveryCounts counts = [] {
    const double noise = 0.05;
    const auto s = scenario("rank-deficient", noise);
    RecoveryCounts c;
    for (int r = 0; r < 20; ++r) {
      const auto run = run_random_search(s, 1024, 100 + r);
      const double theta = sorted_at(run.scores.scores, 0.3);
      const auto fit = fit_noisy_quadratic(run.scores, theta);
      c.gamma += std::abs(fit.dist.gamma() - 2.0) <= 0.5;
      c.sigma += std::abs(fit.dist.sigma() / noise - 1.0) <= 0.3;
    }
    return c;
  }();
  return counts;
}

}  // namespace

TEST(Recovery, EffectiveDimensionOfRankDeficientSurface) {
  EXPECT_GE(rank_deficient_recovery().gamma, 16);
}

TEST(Recovery, NoiseScaleOfRankDeficientSurface) {
  EXPECT_GE(rank_deficient_recovery().sigma, 16);
}

TEST(Surface, ValidateRejectsBrokenInvariants) {
  auto s = axis_surface({1.0, 2.0});
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.effective_dimension(), 2u);
  auto bad = s;
  bad.x_star = {1.0, 0.0};
  EXPECT_THROW(bad.validate(), DomainError);
  bad = s;
  bad.eigenvalues = {-1.0, 1.0};
  EXPECT_THROW(bad.validate(), DomainError);
  bad = s;
  bad.rotation = {{1.0, 0.0}, {0.0, 1.0 + 1e-8}};
  EXPECT_THROW(bad.validate(), DomainError);
  bad = s;
  bad.noise_sigma = -0.1;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = s;
  bad.eigenvalues = {1.0};
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_THROW(scenario("unknown"), DomainError);
  EXPECT_EQ(scenario("rank-deficient").effective_dimension(), 2u);
}

TEST(SearchDistributionSampler, RangesAndDeterminism) {
  SearchDistribution d;
  d.name = "demo";
  d.params = {{"lr", LogUniformParam{1e-5, 1e-2}},
              {"dropout", UniformParam{0.0, 0.3}},
              {"epochs", DiscreteUniformParam{1, 4, {}}},
              {"batch", DiscreteUniformParam{0, 0, {16, 32, 64}}},
              {"steps", FloorProductParam{{"epochs", "dropout"}}}};
  d.validate();
  double log_sum = 0.0;
  const int n = 20000;
  std::vector<int> epoch_counts(5, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = d.sample(3, i);
    EXPECT_EQ(v, d.sample(3, i));
    EXPECT_GE(v[0], 1e-5);
    EXPECT_LE(v[0], 1e-2);
    EXPECT_GE(v[1], 0.0);
    EXPECT_LE(v[1], 0.3);
    ASSERT_GE(v[2], 1.0);
    ASSERT_LE(v[2], 4.0);
    EXPECT_EQ(v[2], std::floor(v[2]));
    ++epoch_counts[static_cast<int>(v[2])];
    EXPECT_TRUE(v[3] == 16 || v[3] == 32 || v[3] == 64);
    EXPECT_EQ(v[4], std::floor(v[2] * v[1]));
    log_sum += std::log(v[0]);
  }
  EXPECT_NEAR(log_sum / n, 0.5 * (std::log(1e-5) + std::log(1e-2)), 0.05);
  for (int e = 1; e <= 4; ++e) EXPECT_NEAR(epoch_counts[e] / static_cast<double>(n), 0.25, 0.02);

  auto bad = d;
  bad.params.push_back({"x", FloorProductParam{{"missing"}}});
  EXPECT_THROW(bad.validate(), DomainError);
  bad = d;
  bad.params.push_back({"lr", UniformParam{0.0, 1.0}});
  EXPECT_THROW(bad.validate(), DomainError);
  bad = d;
  bad.params[0].second = LogUniformParam{0.0, 1.0};
  EXPECT_THROW(bad.validate(), DomainError);
}
