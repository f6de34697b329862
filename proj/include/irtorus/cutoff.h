#pragma once

#include <span>
#include <vector>

namespace irtorus {

/// C-infinity step rising from 0 at x <= 0 to 1 at x >= 1, built from exp(-1/x).
double smoothstep(double x);

/// Frequency cutoff: smooth, even, nonnegative, equal to 1 on [-1, 1] and
/// vanishing outside (-2, 2).
double chi(double z);

/// Integral of chi over the real line (exactly 3 by the symmetry of smoothstep).
inline constexpr double kChiIntegral = 3.0;

/// chi(k/N) tabulated for the integer frequencies it does not annihilate,
/// |k| <= 2N - 1.
class ChiTable {
 public:
  explicit ChiTable(int n);

  int n() const { return n_; }
  int kmax() const { return 2 * n_ - 1; }
  double operator()(int k) const;
  /// Values for k = -kmax .. kmax.
  std::span<const double> values() const { return values_; }
  /// sum_k chi(k/N); this is K_N(0, 0) in one dimension.
  double sum() const { return sum_; }

 private:
  int n_;
  std::vector<double> values_;
  double sum_ = 0.0;
};

/// Time window used by the kernel decomposition: real, even, supported in
/// [-2, 2], greater than 1 on [-1, 1], with nonnegative Fourier transform.
/// Built as a rescaled autocorrelation b*b of the bump b(x) = exp(-1/(1-x^2)).
double phi_window(double z);

}  // namespace irtorus
