#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace parity {

// base^n for integer n >= 0. Uses plain repeated multiplication for small n
// (exact association, no log/exp noise) and exp(n log base) for large n,
// where base must then be positive.
inline double pow_n(double base, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("pow_n: negative exponent");
  if (n <= 1000) {
    double r = 1.0;
    double b = base;
    std::int64_t k = n;
    while (k > 0) {  // square-and-multiply keeps the loop short
      if (k & 1) r *= b;
      b *= b;
      k >>= 1;
    }
    return r;
  }
  if (base == 0.0) return 0.0;
  if (base < 0.0) {
    const double mag = std::exp(static_cast<double>(n) * std::log(-base));
    return (n & 1) ? -mag : mag;
  }
  return std::exp(static_cast<double>(n) * std::log(base));
}

// log(base^n) = n log base for base > 0; handy when base^n would overflow.
inline double log_pow_n(double base, std::int64_t n) {
  if (base <= 0.0) throw std::invalid_argument("log_pow_n: base must be > 0");
  return static_cast<double>(n) * std::log(base);
}

}  // namespace parity
