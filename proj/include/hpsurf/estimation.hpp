#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpsurf/band.hpp"
#include "hpsurf/noisy_quadratic.hpp"
#include "hpsurf/search_theory.hpp"

namespace hpsurf {

struct ScoreSample {
  std::vector<double> scores;
  Direction direction = Direction::Minimize;

  std::size_t size() const { return scores.size(); }
  /// Throws DomainError on non-finite entries (and on emptiness if required).
  void validate(bool require_nonempty = true) const;
  /// Scores inside the asymptotic regime (<= threshold when minimizing,
  /// >= when maximizing).
  std::size_t count_in_regime(double threshold) const;
};

/// Right-continuous step function through the sample: sorted unique xs and
/// the fraction of scores <= each.
struct StepFunction {
  std::vector<double> xs;
  std::vector<double> values;
};

StepFunction ecdf(const ScoreSample& sample);

/// Half-width sqrt(ln(2 / (1 - confidence)) / (2 n)).
double dkw_epsilon(std::size_t n, double confidence);

/// Dvoretzky-Kiefer-Wolfowitz band around the eCDF, clamped to [0, 1].
CdfBand dkw_band(const ScoreSample& sample, double confidence);

/// Censored log maximum-spacing objective of `d` on the regime of the sample
/// (see the README for the exact form). Returns -inf when a spacing
/// vanishes. Throws NoUncensoredData when the regime is empty.
double msp_objective(const ScoreSample& sample, double threshold, const NoisyQuadraticDistribution& d,
                     const QuadratureSpec& q = {});

struct FitOptions {
  std::size_t starts = 16;
  std::uint64_t seed = 0;
  double gamma_max = 32.0;
  std::size_t min_uncensored = 8;
  /// Simplex budget per start (the polish restart gets the same budget).
  std::size_t max_evaluations = 1200;
  QuadratureSpec quadrature{};
};

struct FitResult {
  NoisyQuadraticDistribution dist{0.0, 1.0, 1.0, 0.0};
  double threshold = 0.0;
  std::size_t n = 0;
  std::size_t n_censored = 0;
  double objective = 0.0;
  bool converged = false;
  std::size_t starts_tried = 0;
  Direction direction = Direction::Minimize;
};

/// Multistart simplex maximization of msp_objective over
/// (alpha, beta, log sigma, gamma). Minimizing fits the convex variant,
/// maximizing the concave one.
FitResult fit_noisy_quadratic(const ScoreSample& sample, double threshold, const FitOptions& options = {});

struct ConsonanceGrids {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> sigma;
  std::vector<double> gamma;

  std::size_t total() const { return alpha.size() * beta.size() * sigma.size() * gamma.size(); }
  void validate() const;
};

struct GridCounts {
  std::size_t alpha = 128;
  std::size_t beta = 256;
  std::size_t sigma = 64;
  std::size_t gamma = 16;
};

/// Default extents: alpha over [min - range, min + range] and beta over
/// [threshold, max + range] when minimizing (mirrored when maximizing);
/// sigma log-spaced over [1e-6 range, range]; gamma = 0.5, 1.0, ... .
ConsonanceGrids default_consonance_grids(const ScoreSample& sample, double threshold, const GridCounts& counts = {});

struct GridTuple {
  std::size_t gamma;
  std::size_t sigma;
  std::size_t alpha;
  std::size_t beta;
  friend bool operator==(const GridTuple&, const GridTuple&) = default;
};

/// Accepted beta indices [beta_lo, beta_hi] for one (gamma, sigma, alpha).
struct RegionRow {
  std::size_t gamma;
  std::size_t sigma;
  std::size_t alpha;
  std::size_t beta_lo;
  std::size_t beta_hi;
};

struct ConsonanceRegion {
  ConsonanceGrids grids;
  std::vector<RegionRow> rows;
  double confidence = 0.0;
  Direction direction = Direction::Minimize;
  std::size_t cdf_evaluations = 0;

  bool empty() const { return rows.empty(); }
  std::size_t size() const;
  bool contains(const GridTuple& t) const;
  std::vector<GridTuple> tuples() const;
  NoisyQuadraticDistribution distribution(std::size_t gamma, std::size_t sigma, std::size_t alpha,
                                          std::size_t beta) const;
};

/// Regime evaluation points: sample values inside the regime plus the
/// threshold itself, ascending and unique.
std::vector<double> consonance_points(const ScoreSample& sample, double threshold);

/// Grid tuples whose model CDF lies inside [lower, upper] at every regime
/// evaluation point. Uses the monotonicity of the CDF in alpha and beta to
/// walk the accepted staircase instead of testing every tuple.
ConsonanceRegion consonance_region(const CdfBand& band, double threshold, const ScoreSample& sample,
                                   const ConsonanceGrids& grids, const QuadratureSpec& q = {});

/// Same result by testing every grid tuple; intended for small grids.
ConsonanceRegion consonance_region_exhaustive(const CdfBand& band, double threshold, const ScoreSample& sample,
                                              const ConsonanceGrids& grids, const QuadratureSpec& q = {});

/// Pointwise min/max of the model CDF over the region at each x (ascending).
/// The central curve is the best-fit CDF (clamped into the envelope) when
/// supplied, otherwise the envelope midpoint. Throws EmptyRegion.
CdfBand parametric_cdf_band(const ConsonanceRegion& region, const std::vector<double>& xs,
                            const std::optional<NoisyQuadraticDistribution>& best_fit = std::nullopt,
                            const QuadratureSpec& q = {});

/// Tuning-curve band over the region: at each k, the min and max over all
/// accepted tuples of the tuple's own tuning-curve value (equivalently the
/// inverse of the CDF envelopes). Throws EmptyRegion.
TuningCurve parametric_tuning_band(const ConsonanceRegion& region, const std::vector<double>& ks, double level = 0.5,
                                   const std::optional<NoisyQuadraticDistribution>& best_fit = std::nullopt,
                                   const QuadratureSpec& q = {});

struct ScanRow {
  double threshold = 0.0;
  bool skipped = false;
  std::string reason;
  std::size_t n_uncensored = 0;
  double regime_fraction = 0.0;
  std::optional<FitResult> fit;
  double max_deviation = 0.0;
  bool within_band = false;
};

struct ScanOptions {
  FitOptions fit{};
  double confidence = 0.8;
};

/// One row per candidate threshold; candidates with fewer than
/// fit.min_uncensored regime points (or failing fits) are skipped rows.
std::vector<ScanRow> threshold_scan(const ScoreSample& sample, const std::vector<double>& candidates,
                                    const ScanOptions& options = {});

}  // namespace hpsurf
