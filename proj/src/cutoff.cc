#include "irtorus/cutoff.h"

#include <array>
#include <cmath>
#include <stdexcept>

namespace irtorus {

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double chi(double z) {
  const double a = std::abs(z);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return 1.0 - smoothstep(a - 1.0);
}

ChiTable::ChiTable(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("ChiTable: N must be >= 1");
  values_.resize(2 * kmax() + 1);
  for (int k = -kmax(); k <= kmax(); ++k) {
    values_[k + kmax()] = chi(static_cast<double>(k) / n);
  }
  // Symmetric accumulation from the outside in.
  double s = values_[kmax()];
  for (int k = kmax(); k >= 1; --k) s += 2.0 * values_[k + kmax()];
  sum_ = s;
}

double ChiTable::operator()(int k) const {
  if (k < -kmax() || k > kmax()) return 0.0;
  return values_[k + kmax()];
}

namespace {

double bump(double x) {
  const double a = std::abs(x);
  if (a >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

// Autocorrelation of the bump on [0, 2]. The integrand vanishes to all orders
// at both ends of the overlap, so the trapezoid rule converges spectrally.
double autocorrelation(double z) {
  z = std::abs(z);
  if (z >= 2.0) return 0.0;
  const double lo = z - 1.0;
  const double hi = 1.0;
  constexpr int kPanels = 2048;
  const double h = (hi - lo) / kPanels;
  double s = 0.0;
  for (int i = 1; i < kPanels; ++i) {
    const double x = lo + i * h;
    s += bump(x) * bump(z - x);
  }
  return s * h;
}

struct PhiTable {
  static constexpr int kPoints = 4097;  // on [0, 2]
  std::array<double, kPoints> values{};
  double step = 2.0 / (kPoints - 1);

  PhiTable() {
    const double at_one = autocorrelation(1.0);
    for (int i = 0; i < kPoints; ++i) {
      values[i] = 2.0 * autocorrelation(i * step) / at_one;
    }
    values[kPoints - 1] = 0.0;
  }

  double operator()(double z) const {
    z = std::abs(z);
    if (z >= 2.0) return 0.0;
    const double x = z / step;
    int i0 = static_cast<int>(std::floor(x)) - 2;
    // Six-point Lagrange, reflecting through z = 0 (the window is even).
    double out = 0.0;
    for (int j = 0; j < 6; ++j) {
      double w = 1.0;
      for (int m = 0; m < 6; ++m) {
        if (m != j) w *= (x - (i0 + m)) / static_cast<double>(j - m);
      }
      int idx = std::abs(i0 + j);
      const double v = idx >= kPoints ? 0.0 : values[idx];
      out += w * v;
    }
    return out;
  }
};

}  // namespace

double phi_window(double z) {
  static const PhiTable table;
  return table(z);
}

}  // namespace irtorus
