#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "hpsurf/errors.hpp"
#include "hpsurf/estimation.hpp"

namespace hpsurf {
namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  std::vector<double> v = linspace(std::log(a), std::log(b), n);
  for (double& x : v) x = std::exp(x);
  if (n > 1) {
    v.front() = a;
    v.back() = b;
  }
  return v;
}

// Band limits at the regime evaluation points.
struct Constraint {
  double x;
  double lower;
  double upper;
};

std::vector<Constraint> constraints_for(const CdfBand& band, const std::vector<double>& points) {
  std::vector<Constraint> out;
  out.reserve(points.size());
  for (double x : points) out.push_back({x, band.lower_at(x), band.upper_at(x)});
  return out;
}

// Checks one side of the band for a tuple, testing the most recently
// failing point first.
class TupleChecker {
 public:
  TupleChecker(const std::vector<Constraint>& cons, Direction dir, const QuadratureSpec& q)
      : cons_(cons), dir_(dir), q_(q) {}

  // All model CDF values >= lower (fails when the CDF is too small).
  bool meets_lower(const NoisyQuadraticDistribution& d) { return check(d, true, last_lower_); }
  // All model CDF values <= upper.
  bool meets_upper(const NoisyQuadraticDistribution& d) { return check(d, false, last_upper_); }

  std::size_t evaluations() const { return evaluations_; }

 private:
  bool point_ok(const NoisyQuadraticDistribution& d, std::size_t j, bool lower_side) {
    ++evaluations_;
    const Constraint& c = cons_[j];
    if (dir_ == Direction::Minimize) {
      const double F = d.cdf(c.x, q_);
      return lower_side ? F >= c.lower : F <= c.upper;
    }
    // Survival is the accurate tail when maximizing.
    const double S = d.sf(c.x, q_);
    return lower_side ? S <= 1.0 - c.lower : S >= 1.0 - c.upper;
  }

  bool check(const NoisyQuadraticDistribution& d, bool lower_side, std::size_t& last) {
    if (!point_ok(d, last, lower_side)) return false;
    for (std::size_t j = 0; j < cons_.size(); ++j) {
      if (j == last) continue;
      if (!point_ok(d, j, lower_side)) {
        last = j;
        return false;
      }
    }
    return true;
  }

  const std::vector<Constraint>& cons_;
  Direction dir_;
  const QuadratureSpec& q_;
  std::size_t last_lower_ = 0;
  std::size_t last_upper_ = 0;
  std::size_t evaluations_ = 0;
};

Variant variant_for(Direction dir) { return dir == Direction::Minimize ? Variant::Convex : Variant::Concave; }

// First beta index with beta > alpha.
std::size_t first_valid_beta(const std::vector<double>& beta, double alpha) {
  return static_cast<std::size_t>(std::upper_bound(beta.begin(), beta.end(), alpha) - beta.begin());
}

void check_inputs(const CdfBand& band, const ConsonanceGrids& grids, const ScoreSample& sample) {
  grids.validate();
  band.validate();
  if (band.empty()) throw DomainError("consonance region: empty band");
  sample.validate();
}

struct Corner {
  const RegionRow* row;
  std::size_t beta;
};

// Pareto-minimal (alpha, beta_lo) corners and Pareto-maximal (alpha, beta_hi)
// corners of each (gamma, sigma) slice. Model CDFs decrease and quantiles
// increase in both alpha and beta, so envelopes are attained there.
void extract_corners(const ConsonanceRegion& region, std::vector<Corner>& minimal, std::vector<Corner>& maximal) {
  const auto& rows = region.rows;
  std::size_t start = 0;
  while (start < rows.size()) {
    std::size_t end = start;
    while (end < rows.size() && rows[end].gamma == rows[start].gamma && rows[end].sigma == rows[start].sigma) ++end;
    std::size_t best_lo = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = start; i < end; ++i) {
      if (rows[i].beta_lo < best_lo) {
        best_lo = rows[i].beta_lo;
        minimal.push_back({&rows[i], rows[i].beta_lo});
      }
    }
    std::size_t best_hi = 0;
    bool any = false;
    for (std::size_t i = end; i-- > start;) {
      if (!any || rows[i].beta_hi > best_hi) {
        best_hi = rows[i].beta_hi;
        any = true;
        maximal.push_back({&rows[i], rows[i].beta_hi});
      }
    }
    start = end;
  }
}

NoisyQuadraticDistribution corner_dist(const ConsonanceRegion& region, const Corner& c) {
  return region.distribution(c.row->gamma, c.row->sigma, c.row->alpha, c.beta);
}

}  // namespace

void ConsonanceGrids::validate() const {
  if (alpha.empty() || beta.empty() || sigma.empty() || gamma.empty()) throw DomainError("consonance grid is empty");
  auto ascending = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) return false;
    }
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!ascending(alpha) || !ascending(beta) || !ascending(sigma) || !ascending(gamma)) {
    throw DomainError("consonance grids must be finite and strictly increasing");
  }
  if (!(sigma.front() > 0.0) || !(gamma.front() > 0.0)) throw DomainError("consonance grids: sigma, gamma > 0");
}

ConsonanceGrids default_consonance_grids(const ScoreSample& sample, double threshold, const GridCounts& counts) {
  sample.validate();
  if (counts.alpha < 1 || counts.beta < 1 || counts.sigma < 1 || counts.gamma < 1) {
    throw DomainError("grid counts must be positive");
  }
  const auto [lo_it, hi_it] = std::minmax_element(sample.scores.begin(), sample.scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  double range = hi - lo;
  if (!(range > 0.0)) range = std::max(std::abs(lo), 1.0);
  ConsonanceGrids g;
  if (sample.direction == Direction::Minimize) {
    g.alpha = linspace(lo - range, lo + range, counts.alpha);
    g.beta = linspace(threshold, hi + range, counts.beta);
  } else {
    g.alpha = linspace(lo - range, threshold, counts.alpha);
    g.beta = linspace(hi - range, hi + range, counts.beta);
  }
  g.sigma = logspace(1e-6 * range, range, counts.sigma);
  g.gamma.resize(counts.gamma);
  for (std::size_t i = 0; i < counts.gamma; ++i) g.gamma[i] = 0.5 * static_cast<double>(i + 1);
  return g;
}

std::size_t ConsonanceRegion::size() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.beta_hi - r.beta_lo + 1;
  return total;
}

bool ConsonanceRegion::contains(const GridTuple& t) const {
  for (const auto& r : rows) {
    if (r.gamma == t.gamma && r.sigma == t.sigma && r.alpha == t.alpha) return t.beta >= r.beta_lo && t.beta <= r.beta_hi;
  }
  return false;
}

std::vector<GridTuple> ConsonanceRegion::tuples() const {
  std::vector<GridTuple> out;
  for (const auto& r : rows) {
    for (std::size_t b = r.beta_lo; b <= r.beta_hi; ++b) out.push_back({r.gamma, r.sigma, r.alpha, b});
  }
  return out;
}

NoisyQuadraticDistribution ConsonanceRegion::distribution(std::size_t gamma, std::size_t sigma, std::size_t alpha,
                                                          std::size_t beta) const {
  return {grids.alpha.at(alpha), grids.beta.at(beta), grids.gamma.at(gamma), grids.sigma.at(sigma),
          variant_for(direction)};
}

std::vector<double> consonance_points(const ScoreSample& sample, double threshold) {
  std::vector<double> pts;
  for (double s : sample.scores) {
    if (sample.direction == Direction::Minimize ? s <= threshold : s >= threshold) pts.push_back(s);
  }
  pts.push_back(threshold);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

ConsonanceRegion consonance_region(const CdfBand& band, double threshold, const ScoreSample& sample,
                                   const ConsonanceGrids& grids, const QuadratureSpec& q) {
  check_inputs(band, grids, sample);
  const auto cons = constraints_for(band, consonance_points(sample, threshold));
  const Direction dir = sample.direction;
  const Variant variant = variant_for(dir);
  ConsonanceRegion region;
  region.grids = grids;
  region.confidence = band.confidence;
  region.direction = dir;
  const std::size_t na = grids.alpha.size();
  const std::size_t nb = grids.beta.size();
  std::vector<std::size_t> b_min(na);
  for (std::size_t i = 0; i < na; ++i) b_min[i] = first_valid_beta(grids.beta, grids.alpha[i]);

  TupleChecker checker(cons, dir, q);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> hi(na), lo(na);
  for (std::size_t ig = 0; ig < grids.gamma.size(); ++ig) {
    for (std::size_t is = 0; is < grids.sigma.size(); ++is) {
      auto dist = [&](std::size_t ia, std::size_t ib) {
        return NoisyQuadraticDistribution(grids.alpha[ia], grids.beta[ib], grids.gamma[ig], grids.sigma[is], variant);
      };
      // Largest beta meeting the lower envelope: nonincreasing in alpha.
      std::size_t h = nb - 1;
      bool exhausted = false;
      for (std::size_t ia = 0; ia < na; ++ia) {
        hi[ia] = kNone;
        if (exhausted || b_min[ia] >= nb) {
          exhausted = true;
          continue;
        }
        while (true) {
          if (h < b_min[ia]) break;
          if (checker.meets_lower(dist(ia, h))) break;
          if (h == 0) {
            h = kNone;
            break;
          }
          --h;
        }
        if (h == kNone || h < b_min[ia]) {
          exhausted = true;
          h = 0;
          continue;
        }
        hi[ia] = h;
      }
      // Smallest beta meeting the upper envelope: nonincreasing in alpha,
      // so walk alpha downward. A failure at some alpha also fails at every
      // smaller alpha, so `l` only rises.
      std::size_t l = 0;
      exhausted = false;
      for (std::size_t k = na; k-- > 0;) {
        lo[k] = kNone;
        if (exhausted || hi[k] == kNone) continue;
        std::size_t b = std::max(l, b_min[k]);
        while (b < nb && !checker.meets_upper(dist(k, b))) l = ++b;
        if (b >= nb) {
          exhausted = true;
          continue;
        }
        lo[k] = b;
      }
      for (std::size_t ia = 0; ia < na; ++ia) {
        if (hi[ia] == kNone || lo[ia] == kNone || lo[ia] > hi[ia]) continue;
        region.rows.push_back({ig, is, ia, lo[ia], hi[ia]});
      }
    }
  }
  region.cdf_evaluations = checker.evaluations();
  return region;
}

ConsonanceRegion consonance_region_exhaustive(const CdfBand& band, double threshold, const ScoreSample& sample,
                                              const ConsonanceGrids& grids, const QuadratureSpec& q) {
  check_inputs(band, grids, sample);
  const auto cons = constraints_for(band, consonance_points(sample, threshold));
  const Direction dir = sample.direction;
  ConsonanceRegion region;
  region.grids = grids;
  region.confidence = band.confidence;
  region.direction = dir;
  std::size_t evals = 0;
  for (std::size_t ig = 0; ig < grids.gamma.size(); ++ig) {
    for (std::size_t is = 0; is < grids.sigma.size(); ++is) {
      for (std::size_t ia = 0; ia < grids.alpha.size(); ++ia) {
        std::size_t run_start = 0;
        bool in_run = false;
        for (std::size_t ib = 0; ib <= grids.beta.size(); ++ib) {
          bool ok = false;
          if (ib < grids.beta.size() && grids.beta[ib] > grids.alpha[ia]) {
            const NoisyQuadraticDistribution d(grids.alpha[ia], grids.beta[ib], grids.gamma[ig], grids.sigma[is],
                                               variant_for(dir));
            ok = true;
            for (const auto& c : cons) {
              ++evals;
              const double F = d.cdf(c.x, q);
              if (F < c.lower || F > c.upper) {
                ok = false;
                break;
              }
            }
          }
          if (ok && !in_run) {
            run_start = ib;
            in_run = true;
          } else if (!ok && in_run) {
            region.rows.push_back({ig, is, ia, run_start, ib - 1});
            in_run = false;
          }
        }
      }
    }
  }
  region.cdf_evaluations = evals;
  return region;
}

CdfBand parametric_cdf_band(const ConsonanceRegion& region, const std::vector<double>& xs,
                            const std::optional<NoisyQuadraticDistribution>& best_fit, const QuadratureSpec& q) {
  if (region.empty()) throw EmptyRegion();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw DomainError("parametric band: xs must be strictly increasing");
  }
  std::vector<Corner> minimal, maximal;
  extract_corners(region, minimal, maximal);
  CdfBand band;
  band.xs = xs;
  band.confidence = region.confidence;
  band.method = "consonance";
  double prev_lo = 0.0, prev_hi = 0.0, prev_mid = 0.0;
  for (double x : xs) {
    double upper = 0.0;
    for (const auto& c : minimal) upper = std::max(upper, corner_dist(region, c).cdf(x, q));
    double lower = 1.0;
    for (const auto& c : maximal) lower = std::min(lower, corner_dist(region, c).cdf(x, q));
    // Guard monotonicity against rounding in the quadrature.
    lower = std::max(lower, prev_lo);
    upper = std::max(std::max(upper, prev_hi), lower);
    double mid = best_fit ? best_fit->cdf(x, q) : 0.5 * (lower + upper);
    mid = std::clamp(std::max(mid, prev_mid), lower, upper);
    band.lower.push_back(lower);
    band.upper.push_back(upper);
    band.ecdf.push_back(mid);
    prev_lo = lower;
    prev_hi = upper;
    prev_mid = mid;
  }
  return band;
}

namespace {

// q(c; gamma, s): the c-quantile of the standardized convex noisy quadratic
// (alpha = 0, beta = 1, noise s), tabulated against log s for fixed gamma
// and levels, and interpolated by cubic Hermite splines.
class StandardQuantileTable {
 public:
  static constexpr double kLogMin = -16.5;  // s ~ 7e-8
  static constexpr double kLogMax = 7.0;    // s ~ 1.1e3
  static constexpr double kStep = 0.125;

  StandardQuantileTable(double gamma, const std::vector<double>& levels, const QuadratureSpec& q)
      : gamma_(gamma), levels_(levels) {
    const auto count = static_cast<std::size_t>(std::lround((kLogMax - kLogMin) / kStep)) + 1;
    values_.assign(levels.size(), std::vector<double>(count));
    for (std::size_t j = 0; j < count; ++j) {
      const double s = std::exp(kLogMin + kStep * static_cast<double>(j));
      const NoisyQuadraticDistribution d(0.0, 1.0, gamma, s);
      for (std::size_t k = 0; k < levels.size(); ++k) values_[k][j] = d.quantile(levels[k], q);
    }
  }

  bool covers(double s) const {
    const double l = std::log(s);
    return l >= kLogMin && l <= kLogMax;
  }

  // Interpolated value and an error estimate (cubic minus linear).
  std::pair<double, double> lookup(std::size_t level, double s) const {
    const auto& v = values_[level];
    const double u = (std::log(s) - kLogMin) / kStep;
    const std::size_t n = v.size();
    std::size_t j = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(n - 2)));
    const double t = u - static_cast<double>(j);
    auto slope = [&](std::size_t i) {
      if (i == 0) return v[1] - v[0];
      if (i == n - 1) return v[n - 1] - v[n - 2];
      return 0.5 * (v[i + 1] - v[i - 1]);
    };
    const double p0 = v[j], p1 = v[j + 1], m0 = slope(j), m1 = slope(j + 1);
    const double t2 = t * t, t3 = t2 * t;
    const double cubic = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
    const double linear = p0 + t * (p1 - p0);
    return {cubic, std::abs(cubic - linear)};
  }

 private:
  double gamma_;
  std::vector<double> levels_;
  std::vector<std::vector<double>> values_;
};

const StandardQuantileTable& quantile_table(double gamma, const std::vector<double>& levels, const QuadratureSpec& q) {
  static std::mutex mutex;
  static std::map<std::pair<double, std::vector<double>>, StandardQuantileTable> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(gamma, levels);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, StandardQuantileTable(gamma, levels, q)).first;
  return it->second;
}

}  // namespace

TuningCurve parametric_tuning_band(const ConsonanceRegion& region, const std::vector<double>& ks, double level,
                                   const std::optional<NoisyQuadraticDistribution>& best_fit,
                                   const QuadratureSpec& q) {
  if (region.empty()) throw EmptyRegion();
  const Direction dir = region.direction;
  const bool minimize = dir == Direction::Minimize;
  // Levels expressed for the convex base: the concave quantile at u is
  // alpha + beta - (convex quantile at 1 - u).
  std::vector<double> base_levels;
  for (double k : ks) {
    if (minimize) {
      base_levels.push_back(best_of_k_level(level, k, dir));
    } else {
      base_levels.push_back(-std::expm1(std::log(level) / k));
    }
  }
  std::vector<Corner> minimal, maximal;
  extract_corners(region, minimal, maximal);

  auto exact = [&](const Corner& c, std::size_t k) {
    const auto d = corner_dist(region, c);
    return d.quantile(minimize ? base_levels[k] : best_of_k_level(level, ks[k], dir), q);
  };
  // Tuning value of a corner via the table: alpha + w q (minimize) or
  // beta - w q (maximize), both increasing in alpha and beta.
  struct Approx {
    double value;
    double error;
  };
  auto approx = [&](const Corner& c, std::size_t k) -> std::optional<Approx> {
    const double a = region.grids.alpha[c.row->alpha];
    const double b = region.grids.beta[c.beta];
    const double w = b - a;
    const double s = region.grids.sigma[c.row->sigma] / w;
    const auto& table = quantile_table(region.grids.gamma[c.row->gamma], base_levels, q);
    if (!table.covers(s)) return std::nullopt;
    const auto [v, e] = table.lookup(k, s);
    return Approx{minimize ? a + w * v : b - w * v, w * e};
  };

  // Extreme over corners: screen with the table, then evaluate exactly every
  // corner that could beat the screened extreme given the error estimates.
  auto extreme = [&](const std::vector<Corner>& corners, std::size_t k, bool want_min) {
    std::vector<std::pair<double, std::size_t>> screened;
    double best_exact = want_min ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    double max_err = 0.0;
    for (std::size_t i = 0; i < corners.size(); ++i) {
      const auto a = approx(corners[i], k);
      if (!a) {
        const double v = exact(corners[i], k);
        best_exact = want_min ? std::min(best_exact, v) : std::max(best_exact, v);
        continue;
      }
      screened.push_back({want_min ? a->value : -a->value, i});
      max_err = std::max(max_err, a->error);
    }
    std::sort(screened.begin(), screened.end());
    if (!screened.empty()) {
      const double cutoff = screened.front().first + 4.0 * max_err + 1e-12 * std::abs(screened.front().first);
      for (const auto& [key, i] : screened) {
        if (key > cutoff) break;
        const double v = exact(corners[i], k);
        best_exact = want_min ? std::min(best_exact, v) : std::max(best_exact, v);
      }
    }
    return best_exact;
  };

  TuningCurve curve;
  curve.ks = ks;
  curve.confidence = region.confidence;
  for (std::size_t k = 0; k < ks.size(); ++k) {
    const double lo = extreme(minimal, k, true);
    const double hi = std::max(extreme(maximal, k, false), lo);
    double value = best_fit ? tuning_curve_point([&](double p) { return best_fit->quantile(p, q); }, ks[k], level, dir)
                            : 0.5 * (lo + hi);
    value = std::clamp(value, lo, hi);
    curve.values.push_back(value);
    curve.lower.emplace_back(lo);
    curve.upper.emplace_back(hi);
  }
  // Enforce direction-appropriate monotonicity of the point curve only if
  // clamping broke it; the envelopes are monotone by construction.
  curve.validate();
  return curve;
}

}  // namespace hpsurf
