#include "hpsurf/gauss_rules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>


#include "hpsurf/errors.hpp"

namespace hpsurf::quad {
namespace {

// Eigenvalues of the symmetric tridiagonal matrix (diag d, off-diagonal e
// coupling k and k+1), ascending.
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& d, const std::vector<double>& e) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(d.data(), n);
  Eigen::VectorXd sub = n > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(e.data(), n - 1)) : Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericFailure("tridiagonal eigenvalue iteration did not converge");
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(out.begin(), out.end());
  return out;
}

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix. Weights come
// from the orthonormal three-term recurrence, w_i = mu0 / sum_k q_k(x_i)^2.
GaussRule golub_welsch(const std::vector<double>& diag, const std::vector<double>& off, double mu0) {
  const std::size_t n = diag.size();
  GaussRule rule;
  rule.nodes = tridiagonal_eigenvalues(diag, off);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rule.nodes[i];
    double q_prev = 0.0;
    double q = 1.0;
    double norm = 1.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double b_prev = k > 0 ? off[k - 1] : 0.0;
      const double q_next = ((x - diag[k]) * q - b_prev * q_prev) / off[k];
      q_prev = q;
      q = q_next;
      norm += q * q;
    }
    rule.weights[i] = mu0 / norm;
  }
  return rule;
}

// Newton iteration on P_n^(0,b) from asymptotic initial guesses, with the
// three-term recurrence precomputed. Returns false when the result fails
// basic sanity checks so the caller can fall back to Golub-Welsch.
bool jacobi_newton(int n, double b, GaussRule& rule) {
  const double alf = 0.0;
  const double ab = alf + b;
  std::vector<double> c0(n + 1), c1(n + 1), c2(n + 1);
  for (int j = 1; j <= n; ++j) {
    const double t = 2.0 * j + ab;
    const double a = 2.0 * j * (j + ab) * (t - 2.0);
    c0[j] = (t - 1.0) * (alf * alf - b * b) / a;
    c1[j] = (t - 1.0) * t * (t - 2.0) / a;
    c2[j] = 2.0 * (j - 1 + alf) * (j - 1 + b) * t / a;
  }
  // Roots in descending order, x[0] closest to +1.
  std::vector<double> x(n), w(n);
  const double nn = n;
  const double log_scale = std::lgamma(alf + nn) + std::lgamma(b + nn) - std::lgamma(nn + 1.0) -
                           std::lgamma(nn + ab + 1.0) + ab * std::log(2.0);
  for (int i = 0; i < n; ++i) {
    double z;
    if (i == 0) {
      const double an = alf / nn;
      const double bn = b / nn;
      const double r1 = (1.0 + alf) * (2.78 / (4.0 + nn * nn) + 0.768 * an / nn);
      const double r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
      z = 1.0 - r1 / r2;
    } else if (i == 1) {
      const double r1 = (4.1 + alf) / ((1.0 + alf) * (1.0 + 0.06 * alf));
      const double r2 = 1.0 + 0.06 * (nn - 8.0) * (1.0 + 0.12 * alf) / nn;
      const double r3 = 1.0 + 0.012 * b * (1.0 + 0.25 * std::abs(alf)) / nn;
      z = x[0] - (1.0 - x[0]) * r1 * r2 * r3;
    } else if (i == 2) {
      const double r1 = (1.67 + 0.28 * alf) / (1.0 + 0.37 * alf);
      const double r2 = 1.0 + 0.22 * (nn - 8.0) / nn;
      const double r3 = 1.0 + 8.0 * b / ((6.28 + b) * nn * nn);
      z = x[1] - (x[0] - x[1]) * r1 * r2 * r3;
    } else if (i == n - 2) {
      const double r1 = (1.0 + 0.235 * b) / (0.766 + 0.119 * b);
      const double r2 = 1.0 / (1.0 + 0.639 * (nn - 4.0) / (1.0 + 0.71 * (nn - 4.0)));
      const double r3 = 1.0 / (1.0 + 20.0 * alf / ((7.5 + alf) * nn * nn));
      z = x[i - 1] + (x[i - 1] - x[i - 2]) * r1 * r2 * r3;
    } else if (i == n - 1) {
      const double r1 = (1.0 + 0.37 * b) / (1.67 + 0.28 * b);
      const double r2 = 1.0 / (1.0 + 0.22 * (nn - 8.0) / nn);
      const double r3 = 1.0 / (1.0 + 8.0 * alf / ((6.28 + alf) * nn * nn));
      z = x[i - 1] + (x[i - 1] - x[i - 2]) * r1 * r2 * r3;
    } else {
      z = 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3];
    }
    double p1 = 0.0;
    double p2 = 0.0;
    double pp = 0.0;
    bool done = false;
    for (int it = 0; it < 20 && !done; ++it) {
      p1 = 1.0 + 0.5 * (ab + 2.0) * (z - 1.0);
      p2 = 1.0;
      for (int j = 2; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = (c0[j] + c1[j] * z) * p2 - c2[j] * p3;
      }
      if (n == 1) {
        p2 = 1.0;
      }
      const double t = 2.0 * nn + ab;
      pp = (nn * (alf - b - t * z) * p1 + 2.0 * (nn + alf) * (nn + b) * p2) / (t * (1.0 - z * z));
      const double z_old = z;
      z = z_old - p1 / pp;
      done = std::abs(z - z_old) <= 1e-15 * std::max(1.0, std::abs(z));
    }
    if (!done || !(z > -1.0 && z < 1.0)) return false;
    x[i] = z;
    const double t = 2.0 * nn + ab;
    w[i] = std::exp(log_scale) * t / (pp * p2);
  }
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i];
    if (!(rule.weights[i] > 0.0)) return false;
    if (i > 0 && !(rule.nodes[i] > rule.nodes[i - 1])) return false;
    total += rule.weights[i];
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  return std::abs(total - mu0) <= 1e-12 * mu0;
}

}  // namespace

GaussRule gauss_jacobi_eigen(int n, double b) {
  // Recurrence for weight (1 - x)^a (1 + x)^b with a = 0.
  const double a = 0.0;
  std::vector<double> diag(n);
  std::vector<double> off(n > 1 ? n - 1 : 0);
  const double ab = a + b;
  diag[0] = (b - a) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag[k] = (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double beta;
    if (k == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off[k - 1] = std::sqrt(beta);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(ab + 2.0));
  return golub_welsch(diag, off, mu0);
}

GaussRule gauss_jacobi(int n, double b) {
  if (n < 1) throw DomainError("Gauss rule needs at least one node");
  if (!(b > -1.0)) throw DomainError("Gauss-Jacobi exponent must exceed -1");
  GaussRule rule;
  if (n >= 4 && jacobi_newton(n, b, rule)) return rule;
  return gauss_jacobi_eigen(n, b);
}

GaussRule gauss_hermite_normal(int n) {
  if (n < 1) throw DomainError("Gauss rule needs at least one node");
  std::vector<double> diag(n, 0.0);
  std::vector<double> off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
  return golub_welsch(diag, off, 1.0);
}

const GaussRule& legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> rules;
  std::lock_guard lock(mutex);
  auto it = rules.find(n);
  if (it == rules.end()) it = rules.emplace(n, gauss_jacobi(n, 0.0)).first;
  return it->second;
}

const GaussRule& hermite(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> rules;
  std::lock_guard lock(mutex);
  auto it = rules.find(n);
  if (it == rules.end()) it = rules.emplace(n, gauss_hermite_normal(n)).first;
  return it->second;
}

const GaussRule& jacobi_cached(int n, double b) {
  struct Entry {
    int n = 0;
    double b = 0.0;
    GaussRule rule;
  };
  constexpr std::size_t kSlots = 8;
  thread_local std::array<Entry, kSlots> cache;
  thread_local std::size_t next = 0;
  for (const auto& e : cache) {
    if (e.n == n && e.b == b) return e.rule;
  }
  Entry& slot = cache[next];
  next = (next + 1) % kSlots;
  slot.rule = gauss_jacobi(n, b);
  slot.n = n;
  slot.b = b;
  return slot.rule;
}

}  // namespace hpsurf::quad
