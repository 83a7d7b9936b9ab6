#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hpsurf {

struct NelderMeadOptions {
  std::size_t max_evaluations = 2000;
  /// Stop when the spread of objective values across the simplex is below
  /// f_tolerance * (1 + |f_best|) and every vertex is within x_tolerance of
  /// the best one (max-norm).
  double f_tolerance = 1e-10;
  double x_tolerance = 1e-8;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization. The objective may return +inf to
/// reject a point (extreme barrier). `steps` gives the initial edge length
/// per coordinate.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& steps, const NelderMeadOptions& options = {});

}  // namespace hpsurf
