#include "hpsurf/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "hpsurf/errors.hpp"
#include "hpsurf/rng.hpp"

namespace hpsurf {

Matrix identity_matrix(std::size_t d) {
  Matrix m(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

Matrix random_rotation(std::size_t d, std::uint64_t seed) {
  const CounterRng rng(seed, 0x726f74);
  // Columns stored as rows of `cols`, orthonormalized by modified Gram-Schmidt
  // with one reorthogonalization pass.
  Matrix cols(d, std::vector<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) cols[j][i] = rng.normal(j * d + i);
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += cols[j][i] * cols[k][i];
        for (std::size_t i = 0; i < d; ++i) cols[j][i] -= dot * cols[k][i];
      }
    }
    double norm = 0.0;
    for (double v : cols[j]) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : cols[j]) v /= norm;
  }
  Matrix u(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) u[i][j] = cols[j][i];
  }
  return u;
}

Box centered_box(const std::vector<double>& x_star, double half_width) {
  Box b;
  for (double x : x_star) {
    b.lo.push_back(x - half_width);
    b.hi.push_back(x + half_width);
  }
  return b;
}

std::size_t SyntheticSurface::effective_dimension() const {
  return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [](double l) { return l > 0.0; }));
}

void SyntheticSurface::validate() const {
  const std::size_t d = dimension();
  if (d == 0) throw DomainError("surface: dimension must be positive");
  if (eigenvalues.size() != d || rotation.size() != d || box.lo.size() != d || box.hi.size() != d) {
    throw DomainError("surface: dimension mismatch");
  }
  if (!std::isfinite(y_star) || !(noise_sigma >= 0.0) || !std::isfinite(noise_sigma) || !std::isfinite(cubic) ||
      cubic < 0.0) {
    throw DomainError("surface: y*, noise and cubic coefficient must be finite (noise, cubic >= 0)");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(eigenvalues[i] >= 0.0) || !std::isfinite(eigenvalues[i])) throw DomainError("surface: eigenvalues must be >= 0");
    if (!(box.lo[i] < x_star[i] && x_star[i] < box.hi[i])) throw DomainError("surface: x* must lie inside the box");
    if (rotation[i].size() != d) throw DomainError("surface: rotation must be square");
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += rotation[i][k] * rotation[j][k];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-10) throw DomainError("surface: rotation is not orthonormal");
    }
  }
}

namespace {

double mean_at(const SyntheticSurface& s, const double* x) {
  const std::size_t d = s.dimension();
  double quad = 0.0, cub = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (s.eigenvalues[j] == 0.0) continue;
    double w = 0.0;
    for (std::size_t i = 0; i < d; ++i) w += s.rotation[i][j] * (x[i] - s.x_star[i]);
    quad += s.eigenvalues[j] * w * w;
    cub += std::abs(w * w * w);
  }
  return s.y_star + 0.5 * quad + s.cubic * cub;
}

}  // namespace

double surface_mean(const SyntheticSurface& s, const std::vector<double>& x) {
  if (x.size() != s.dimension()) throw DomainError("surface_mean: dimension mismatch");
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("surface_mean: non-finite point");
  }
  return mean_at(s, x.data());
}

std::vector<std::string> scenario_names() { return {"full-rank", "rank-deficient", "ill-conditioned"}; }

SyntheticSurface scenario(std::string_view name, double noise_sigma, std::uint64_t rotation_seed) {
  SyntheticSurface s;
  s.noise_sigma = noise_sigma;
  if (name == "full-rank") {
    s.eigenvalues = {2.0, 2.0};
  } else if (name == "rank-deficient") {
    s.eigenvalues = {2.0, 2.0, 0.0, 0.0, 0.0, 0.0};
  } else if (name == "ill-conditioned") {
    s.eigenvalues = {10.0, 1.0, 0.1, 0.01};
  } else {
    throw DomainError("unknown scenario: " + std::string(name));
  }
  const std::size_t d = s.eigenvalues.size();
  s.x_star.assign(d, 0.0);
  s.box = centered_box(s.x_star);
  s.rotation = rotation_seed == 0 ? identity_matrix(d) : random_rotation(d, rotation_seed);
  s.validate();
  return s;
}

SearchRun run_random_search(const SyntheticSurface& s, std::size_t n, std::uint64_t seed) {
  s.validate();
  const std::size_t d = s.dimension();
  const CounterRng rng(seed);
  SearchRun run;
  run.dimension = d;
  run.seed = seed;
  run.noise_sigma = s.noise_sigma;
  run.configurations.resize(n * d);
  run.scores.scores.resize(n);
  run.scores.direction = Direction::Minimize;
  for (std::size_t i = 0; i < n; ++i) {
    double* x = run.configurations.data() + i * d;
    // Lane j carries coordinate j; noise uses the lane past the last one.
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = s.box.lo[j] + (s.box.hi[j] - s.box.lo[j]) * rng.uniform(i, static_cast<std::uint32_t>(j));
    }
    double y = mean_at(s, x);
    if (s.noise_sigma > 0.0) y += s.noise_sigma * rng.normal(i, static_cast<std::uint32_t>(d));
    run.scores.scores[i] = y;
  }
  return run;
}

std::vector<LimitRatioRow> limit_ratio_report(const SearchRun& run, double y_star, std::size_t d_star,
                                              const std::vector<double>& levels) {
  if (run.noise_sigma != 0.0) throw DomainError("limit_ratio_report: requires a noiseless run");
  if (run.size() == 0) throw DomainError("limit_ratio_report: empty run");
  if (d_star == 0) throw DomainError("limit_ratio_report: d* must be positive");
  if (levels.empty()) throw DomainError("limit_ratio_report: no levels");
  for (double p : levels) {
    if (!(p > 0.0 && p < 0.5)) throw DomainError("limit_ratio_report: levels must lie in (0, 0.5)");
  }
  std::vector<double> sorted = run.scores.scores;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  const double exponent = 0.5 * static_cast<double>(d_star);
  auto at_level = [&](double p) {
    const auto idx = static_cast<std::size_t>(std::max(std::ceil(p * n), 1.0)) - 1;
    const double y = sorted[idx];
    const auto count = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), y) - sorted.begin());
    return std::pair{y, count / n};
  };
  const double p_cal = *std::max_element(levels.begin(), levels.end());
  const auto [y_cal, f_cal] = at_level(p_cal);
  if (!(y_cal > y_star)) throw DomainError("limit_ratio_report: calibration quantile not above y*");
  const double omega = f_cal / std::pow(y_cal - y_star, exponent);
  std::vector<LimitRatioRow> rows;
  for (double p : levels) {
    const auto [y, f] = at_level(p);
    const double model = y > y_star ? omega * std::pow(y - y_star, exponent) : 0.0;
    rows.push_back({p, y, f, model, model > 0.0 ? f / model : std::numeric_limits<double>::infinity()});
  }
  return rows;
}

void SearchDistribution::validate() const {
  std::vector<std::string> seen;
  for (const auto& [name, spec] : params) {
    if (name.empty()) throw DomainError("search distribution: unnamed parameter");
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) throw DomainError("duplicate parameter: " + name);
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, UniformParam>) {
            if (!(p.low < p.high)) throw DomainError(name + ": uniform requires low < high");
          } else if constexpr (std::is_same_v<T, LogUniformParam>) {
            if (!(p.low > 0.0 && p.low < p.high)) throw DomainError(name + ": log-uniform requires 0 < low < high");
          } else if constexpr (std::is_same_v<T, DiscreteUniformParam>) {
            if (p.choices.empty() && p.low > p.high) throw DomainError(name + ": discrete-uniform requires low <= high");
          } else {
            if (p.of.empty()) throw DomainError(name + ": floor-product needs operands");
            for (const auto& ref : p.of) {
              if (std::find(seen.begin(), seen.end(), ref) == seen.end()) {
                throw DomainError(name + ": unknown or later parameter " + ref);
              }
            }
          }
        },
        spec);
    seen.push_back(name);
  }
}

std::vector<double> SearchDistribution::sample(std::uint64_t seed, std::uint64_t index) const {
  const CounterRng rng(seed, 0x736470);
  std::vector<double> out;
  out.reserve(params.size());
  for (std::size_t j = 0; j < params.size(); ++j) {
    const auto lane = static_cast<std::uint32_t>(j);
    out.push_back(std::visit(
        [&](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, UniformParam>) {
            return p.low + (p.high - p.low) * rng.uniform(index, lane);
          } else if constexpr (std::is_same_v<T, LogUniformParam>) {
            return std::exp(std::log(p.low) + (std::log(p.high) - std::log(p.low)) * rng.uniform(index, lane));
          } else if constexpr (std::is_same_v<T, DiscreteUniformParam>) {
            if (!p.choices.empty()) return p.choices[rng.below(p.choices.size(), index, lane)];
            const auto width = static_cast<std::uint64_t>(p.high - p.low) + 1;
            return static_cast<double>(p.low + static_cast<std::int64_t>(rng.below(width, index, lane)));
          } else {
            double prod = 1.0;
            for (const auto& ref : p.of) {
              const auto it = std::find_if(params.begin(), params.end(), [&](const auto& e) { return e.first == ref; });
              prod *= out[static_cast<std::size_t>(it - params.begin())];
            }
            return std::floor(prod);
          }
        },
        params[j].second));
  }
  return out;
}

}  // namespace hpsurf
