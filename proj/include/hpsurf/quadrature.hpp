#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace hpsurf::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = true;
};

struct Tolerance {
  double relative = 1e-10;
  double absolute = 1e-300;
  int max_subdivisions = 200;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
// (nonnegative abscissae; the Gauss nodes are the even-indexed ones).
inline constexpr std::array<double, 8> kKronrodX = {
    0.000000000000000000000000000000000e+00, 2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01, 5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01, 8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01, 9.914553711208126392068546975263285e-01,
};
inline constexpr std::array<double, 8> kKronrodW = {
    2.094821410847278280129991748917143e-01, 2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01, 1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01, 1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02, 2.293532201052922496373200805896959e-02,
};
inline constexpr std::array<double, 4> kGaussW = {
    4.179591836734693877551020408163265e-01,
    3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01,
    1.294849661688696932706114326790820e-01,
};

struct Segment {
  double a, b, value, error;
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodW[0];
  double gauss = fc * kGaussW[0];
  double abs_sum = std::abs(fc) * kKronrodW[0];
  std::array<double, 15> vals{};
  vals[0] = fc;
  for (std::size_t i = 1; i < kKronrodX.size(); ++i) {
    const double dx = half * kKronrodX[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    vals[2 * i - 1] = f1;
    vals[2 * i] = f2;
    kronrod += kKronrodW[i] * (f1 + f2);
    abs_sum += kKronrodW[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 0) gauss += kGaussW[i / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodW[0] * std::abs(fc - mean);
  for (std::size_t i = 1; i < kKronrodX.size(); ++i) {
    asc += kKronrodW[i] * (std::abs(vals[2 * i - 1] - mean) + std::abs(vals[2 * i] - mean));
  }
  const double h = std::abs(half);
  const double value = kronrod * half;
  asc *= h;
  abs_sum *= h;
  double err = std::abs((kronrod - gauss) * half);
  // QUADPACK error scaling.
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration over consecutive
/// breakpoints. Bisects the panel with the largest error estimate until
/// the total error is within tolerance or the subdivision budget is spent.
template <class F>
Result integrate(F&& f, std::span<const double> breakpoints, const Tolerance& tol = {}) {
  Result out;
  if (breakpoints.size() < 2) return out;
  std::vector<detail::Segment> heap;
  heap.reserve(16);
  auto by_error = [](const detail::Segment& x, const detail::Segment& y) { return x.error < y.error; };
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    heap.push_back(detail::gk15(f, breakpoints[i], breakpoints[i + 1]));
    out.evaluations += 15;
  }
  std::make_heap(heap.begin(), heap.end(), by_error);
  while (true) {
    double value = 0.0;
    double error = 0.0;
    for (const auto& s : heap) {
      value += s.value;
      error += s.error;
    }
    out.value = value;
    out.error = error;
    if (heap.empty() || error <= std::max(tol.absolute, tol.relative * std::abs(value))) break;
    if (out.subdivisions >= tol.max_subdivisions) {
      out.converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Panel cannot be split further in floating point.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      out.converged = false;
      out.value = value;
      out.error = error;
      break;
    }
    heap.push_back(detail::gk15(f, worst.a, mid));
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(detail::gk15(f, mid, worst.b));
    std::push_heap(heap.begin(), heap.end(), by_error);
    out.evaluations += 30;
    ++out.subdivisions;
  }
  return out;
}

template <class F>
Result integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
  const std::array<double, 2> bp{a, b};
  return integrate(f, std::span<const double>(bp), tol);
}

}  // namespace hpsurf::quad
