#pragma once

#include <cmath>
#include <numbers>

namespace hpsurf::normal {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;

inline double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

/// Standard normal CDF, accurate in the left tail.
inline double cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

/// Upper tail 1 - cdf(z), accurate for large z.
inline double sf(double z) { return 0.5 * std::erfc(z * std::numbers::sqrt2 / 2.0); }

/// Inverse standard normal CDF; p in (0, 1).
double quantile(double p);

}  // namespace hpsurf::normal
