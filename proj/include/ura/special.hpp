#pragma once

#include <cmath>

// Small closed-form helpers shared across modules.

namespace ura {

inline constexpr double kLog2E = 1.4426950408889634074;  // log2(e)
inline constexpr double kLn2 = 0.69314718055994530942;   // ln(2)

// Standard normal CDF Phi(x).
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// Standard normal tail Q(x) = 1 - Phi(x), accurate for large x.
inline double q_func(double x) {
  return 0.5 * std::erfc(x * 0.70710678118654752440);
}

// Standard normal density.
inline double normal_pdf(double x) {
  return 0.39894228040143267794 * std::exp(-0.5 * x * x);
}

// Binary entropy in bits; defined as 0 at p = 0 and p = 1.
inline double binary_entropy_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

// log(a + b) given la = log a, lb = log b, without overflow.
inline double log_add(double la, double lb) {
  if (la < lb) {
    const double t = la;
    la = lb;
    lb = t;
  }
  return la + std::log1p(std::exp(lb - la));
}

}  // namespace ura
