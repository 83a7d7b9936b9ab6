#pragma once

#include <vector>

namespace hpsurf::quad {

/// Nodes and weights of an interpolatory Gaussian rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule on [-1, 1] for the weight (1 + x)^b, b > -1
/// (b = 0 gives Gauss-Legendre). Newton iteration on the Jacobi polynomial,
/// falling back to Golub-Welsch when the iteration misbehaves.
GaussRule gauss_jacobi(int n, double b);
/// Same rule, always by Golub-Welsch (eigenvalues of the Jacobi matrix).
GaussRule gauss_jacobi_eigen(int n, double b);

/// Gauss-Hermite rule for the standard normal density as weight
/// (probabilists' convention: sum of weights is 1).
GaussRule gauss_hermite_normal(int n);

/// Shared immutable Gauss-Legendre rule of size n.
const GaussRule& legendre(int n);
/// Shared immutable normal-weight Gauss-Hermite rule of size n.
const GaussRule& hermite(int n);
/// Gauss-Jacobi (1 + x)^b rule from a small per-thread cache, since callers
/// typically reuse one exponent for many evaluations.
const GaussRule& jacobi_cached(int n, double b);

}  // namespace hpsurf::quad
