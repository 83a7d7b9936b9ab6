#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hpsurf/estimation.hpp"

namespace hpsurf {

using Matrix = std::vector<std::vector<double>>;

Matrix identity_matrix(std::size_t d);
/// Haar-distributed orthonormal matrix (Gram-Schmidt on Gaussian columns).
Matrix random_rotation(std::size_t d, std::uint64_t seed);

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Exact quadratic loss surface y* + 1/2 (x - x*)' U diag(lambda) U' (x - x*),
/// optionally plus cubic * sum over nonzero eigen-directions of |w_i|^3 with
/// w = U' (x - x*), and additive Normal(0, noise_sigma) evaluation noise.
struct SyntheticSurface {
  double y_star = 0.0;
  std::vector<double> x_star;
  std::vector<double> eigenvalues;
  Matrix rotation;
  Box box;
  double noise_sigma = 0.0;
  double cubic = 0.0;

  std::size_t dimension() const { return x_star.size(); }
  /// Number of nonzero eigenvalues.
  std::size_t effective_dimension() const;
  /// Throws DomainError when any invariant fails.
  void validate() const;
};

/// Centered hypercube [x* - half_width, x* + half_width]^d.
Box centered_box(const std::vector<double>& x_star, double half_width = 1.0);

double surface_mean(const SyntheticSurface& s, const std::vector<double>& x);

/// Named presets on the unit centered hypercube: "full-rank" (d = 2),
/// "rank-deficient" (d = 6, two nonzero eigenvalues), "ill-conditioned"
/// (d = 4). rotation_seed 0 keeps the eigenbasis axis-aligned; any other
/// value draws a random rotation.
SyntheticSurface scenario(std::string_view name, double noise_sigma = 0.0, std::uint64_t rotation_seed = 0);
std::vector<std::string> scenario_names();

struct SearchRun {
  std::size_t dimension = 0;
  /// Row-major n x dimension configurations.
  std::vector<double> configurations;
  ScoreSample scores;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;

  std::size_t size() const { return scores.size(); }
};

/// n uniform configurations in the box and their noisy scores; draw i
/// depends only on (seed, i).
SearchRun run_random_search(const SyntheticSurface& s, std::size_t n, std::uint64_t seed);

struct LimitRatioRow {
  double level;
  double y;
  double ecdf;
  double model;
  double ratio;
};

/// Ratio of the eCDF to the one-parameter limit omega (y - y*)^(d*/2) at
/// empirical quantiles, with omega calibrated at the largest level.
std::vector<LimitRatioRow> limit_ratio_report(const SearchRun& run, double y_star, std::size_t d_star,
                                              const std::vector<double>& levels);

// Search-distribution samplers for hyperparameter configuration files.

struct UniformParam {
  double low, high;
};
struct LogUniformParam {
  double low, high;
};
/// Integers in [low, high], or one of an explicit list of choices.
struct DiscreteUniformParam {
  std::int64_t low = 0, high = 0;
  std::vector<double> choices;
};
/// floor(product of previously defined parameters).
struct FloorProductParam {
  std::vector<std::string> of;
};

using ParamSpec = std::variant<UniformParam, LogUniformParam, DiscreteUniformParam, FloorProductParam>;

struct SearchDistribution {
  std::string name;
  std::vector<std::pair<std::string, ParamSpec>> params;

  /// Throws DomainError on bad bounds or unknown references.
  void validate() const;
  /// Configuration i of the stream defined by seed (one value per param).
  std::vector<double> sample(std::uint64_t seed, std::uint64_t index) const;
};

}  // namespace hpsurf
