#pragma once

// Quadratic Weyl sums S(y, t) = sum_k chi(k/N) e(yk + k^2 t), the truncated
// fundamental solution K_N(t, x) = sum_k prod_i chi(k_i/N) e(x.k - t Q(k)),
// bound-ratio scans, the major/minor arc weights and the time decomposition
// phi(t/T) K_N = J1 + J2 + J3. Here e(s) = exp(2 pi i s).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "irtorus/cutoff.h"
#include "irtorus/torus.h"

namespace irtorus {

struct WeylSumQuery {
  double y = 0.0;
  double t = 0.0;
  int n = 1;
};

/// Direct O(N) summation over |k| <= 2N - 1.
Complex weyl_sum(const WeylSumQuery& q);
Complex weyl_sum(double y, double t, int n);

/// S(y, beta * t) with the phase beta t k^2 reduced without forming beta * t.
Complex weyl_sum_scaled(double y, double beta, double t, int n);

struct SupPoint {
  double value = 0.0;
  double y = 0.0;
};

/// sup_y |S(y, beta t)|: maximum over an FFT grid oversampled 8x relative to
/// the frequency span, refined by golden-section search around the best
/// grid points.
SupPoint weyl_sup(double beta, double t, int n);

/// K_N(t, x) evaluated as prod_i S(x_i, -beta_i t).
Complex kernel_value(const TorusParams& params, double t, std::span<const double> x, int n);

/// K_N(t, x) by direct summation over the d-dimensional frequency box.
Complex kernel_value_direct(const TorusParams& params, double t, std::span<const double> x, int n);

/// sup_x |K_N(t, x)| = prod_i sup_y |S(y, -beta_i t)|.
double kernel_sup(const TorusParams& params, double t, int n);

/// g(s) = sup_y |S(y, s)| tabulated on s = j / L, j = 0..L-1 (grid maxima
/// only, oversampling 8). S(., s + 1) = S(., s) and g(1 - s) = g(s).
class WeylSupTable {
 public:
  WeylSupTable(int n, std::int64_t samples);
  int n() const { return n_; }
  std::int64_t samples() const { return static_cast<std::int64_t>(values_.size()); }
  /// g at a reduced phase, linear interpolation between table points.
  double at_phase(double s) const;
  /// sup_x |K_N(t, x)| for integer time index j on the grid t = j / L.
  double kernel_sup_at(const TorusParams& params, std::int64_t j) const;

 private:
  int n_;
  std::vector<double> values_;
};

enum class RatioMode { kDispersive, kWeyl, kKernelSup };
std::string to_string(RatioMode mode);

struct RatioRow {
  RatioMode mode = RatioMode::kDispersive;
  int n = 0;
  double t = 0.0;
  double y = 0.0;  // y for the one-dimensional modes; first x coordinate for kernel_sup
  double value = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct RatioScan {
  std::vector<RatioRow> rows;
  double max_ratio = 0.0;
  std::size_t argmax = 0;
};

/// Measured value divided by the bound expression of each mode:
///   dispersive  |S(y,t)| / min(N, t^{-1/2}),           t in (0, 1/N]
///   weyl        |S(y,t)| / (N / (sqrt(q) (1 + N |t - a/q|^{1/2}))), (a, q) from dirichlet_approx(t, N)
///   kernel_sup  sup_x |K_N(t,x)| / (N^{(d+1)/2} t^{1/4})
/// An empty y grid takes the supremum over y (over x for kernel_sup).
RatioScan bound_ratio_scan(const TorusParams& params, int n, RatioMode mode,
                           std::span<const double> t_grid, std::span<const double> y_grid);

/// Dyadic major arcs.
class ArcSystem {
 public:
  /// Levels Q = 1, 2, 4, ... with Q < c0 N. Throws if two arcs of the system
  /// could overlap (c0 too large for the chi support).
  ArcSystem(int n, double c0 = 0.01);

  int n() const { return n_; }
  double c0() const { return c0_; }
  std::span<const int> levels() const { return levels_; }

  /// Lambda_Q(t) = sum_{Q <= q < 2Q} sum_{a >= 1, (a,q) = 1} chi(N Q (t - a/q)).
  double lambda(int level_q, double t) const;
  /// rho(t) = 1 - sum_Q Lambda_Q(t).
  double rho(double t) const;

  /// sum over increasing axis tuples j_1 < ... < j_k of
  /// prod_{i not in J} rho(beta_i t) prod_m Lambda_{Q_m}(beta_{j_m} t).
  double arc_weight(const TorusParams& params, std::span<const int> qs, double t) const;

 private:
  int n_;
  double c0_;
  std::vector<int> levels_;
};

/// (1/T) int_0^T Lambda_{Q_1}(t) Lambda_{Q_2}(beta_2 t) ... Lambda_{Q_k}(beta_k t) dt
/// by the trapezoid rule with step <= 1/(4 N Q_max).
double arc_density(const ArcSystem& arcs, const TorusParams& params, std::span<const int> qs,
                   double horizon);

struct ArcPieceBound {
  std::vector<int> qs;
  double sup = 0.0;          // sup |J3^{Q}|
  double sup_bound = 0.0;    // N^{(k+d)/2} / sqrt(Q_1 ... Q_k)
  double fourier_sup = 0.0;  // sup |F[J3^{Q}]| on the sigma grid
  double fourier_bound = 0.0;  // T Q_1 ... Q_k / N^k
};

struct KernelMeasurements {
  double fourier_j1_sup = 0.0;  // vs A
  double j2_sup = 0.0;          // vs A^{-d/2}
  double j3_sup = 0.0;          // vs T^{1/4} N^{(d+1)/2}
  std::vector<ArcPieceBound> arcs;
  double sigma_step_j1 = 0.0;
  double sigma_step_j3 = 0.0;
  std::int64_t time_samples = 0;
};

struct KernelOptions {
  /// Time samples per unit time for the J3 sup (0: 16 (2N)^2 max beta).
  std::int64_t samples_per_unit = 0;
  /// Number of sigma grid points on each side of 0.
  int sigma_points = 16;
  /// Largest arc order k measured (0: none).
  int max_arc_order = 0;
  double c0 = 0.01;
};

/// phi(t/T) K_N(t, x) = J1 + J2 + J3 with
///   J1 = phi(t/T) chi(t/A) K_N,
///   J2 = phi(t/T) chi(N t) (1 - chi(t/A)) K_N,
///   J3 = phi(t/T) (1 - chi(N t)) K_N.
/// The pieces add up to phi(t/T) K_N only when chi(t/A) chi(N t) = chi(t/A),
/// i.e. 2A <= 1/N, so A is restricted to (0, 1/(2N)].
class KernelPieces {
 public:
  KernelPieces(TorusParams params, int n, double horizon, double a);

  const TorusParams& params() const { return params_; }
  int n() const { return n_; }
  double horizon() const { return horizon_; }
  double a() const { return a_; }

  /// Time weights multiplying K_N in each piece.
  double w1(double t) const;
  double w2(double t) const;
  double w3(double t) const;

  Complex j1(double t, std::span<const double> x) const;
  Complex j2(double t, std::span<const double> x) const;
  Complex j3(double t, std::span<const double> x) const;
  /// J3^{Q_1..Q_k}(t, x) = J3(t, x) * arc_weight(t).
  Complex j3_arc(const ArcSystem& arcs, std::span<const int> qs, double t,
                 std::span<const double> x) const;

  KernelMeasurements measure(const KernelOptions& options = {}) const;

 private:
  TorusParams params_;
  int n_;
  double horizon_;
  double a_;
};

}  // namespace irtorus
