#pragma once

// Phase reduction modulo 1.
//
// Long time horizons put t*Q(k) far outside the range where a plain double
// product keeps any fractional digits. All phases are therefore reduced with
// an error-free product (fma) before the fractional part is taken, which keeps
// the absolute phase error at a few ulps of 1 regardless of the magnitude of
// the product.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace irtorus {

/// Wraps a value that is known to lie within a few units of [0, 1) back into [0, 1).
inline double wrap_unit(double r) {
  r -= std::floor(r);
  return r >= 1.0 ? 0.0 : r;
}

/// frac(x * m) for an integer m with |m| < 2^53.
inline double frac_mul(double x, std::int64_t m) {
  const double md = static_cast<double>(m);
  const double hi = x * md;
  const double lo = std::fma(x, md, -hi);
  return wrap_unit((hi - std::floor(hi)) + lo);
}

/// frac(x * m / s) for integers m, s with s > 0. Used for time grids t_j = j/s,
/// where the rational time is exact and only x carries rounding.
inline double frac_ratio(double x, std::int64_t m, std::int64_t s) {
  const double md = static_cast<double>(m);
  const double sd = static_cast<double>(s);
  const double hi = x * md;
  const double lo = std::fma(x, md, -hi);
  double r = std::fmod(hi, sd);  // exact
  r = (r + lo) / sd;
  return wrap_unit(r);
}

/// frac(t * beta * m) for real t, beta and integer m.
inline double frac_triple(double t, double beta, std::int64_t m) {
  const double hi = t * beta;
  const double lo = std::fma(t, beta, -hi);
  const double lo_part = lo * static_cast<double>(m);
  return wrap_unit(frac_mul(hi, m) + (lo_part - std::floor(lo_part)));
}

/// Nearest-integer distance ||x|| computed from an already reduced phase.
inline double phase_distance(double frac) { return frac > 0.5 ? 1.0 - frac : frac; }

/// exp(2 pi i f) for a reduced phase f.
inline std::complex<double> unit_phase(double f) {
  const double a = 2.0 * std::numbers::pi * f;
  return {std::cos(a), std::sin(a)};
}

}  // namespace irtorus
