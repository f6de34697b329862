#pragma once

// Space-time Lebesgue norms of e^{it Delta_beta} f on [0, T] x T^d.
//
// Spatial integrals use a uniform grid with at least p*(2N)+1 points per
// dimension; for even p the integrand |u|^p is a trigonometric polynomial of
// degree p*(2N) in each variable and the grid mean is exact. Time integrals
// use the trapezoid rule on t_j = j/S with S >= max(beta)(2N)^2/c samples per
// unit time, and report the difference against the step-2/S estimate built
// from the even samples.

#include <cstdint>
#include <span>
#include <vector>

#include "irtorus/phase.h"
#include "irtorus/torus.h"

namespace irtorus {

struct QuadratureSpec {
  /// c in dt <= c / (max beta * (2N)^2).
  double time_step_constant = 0.125;
  /// Spatial points per dimension; 0 selects the smallest admissible FFT size.
  int spatial_points = 0;
};

struct NormResult {
  double norm = 0.0;            // (int int |u|^p)^(1/p)
  double power_integral = 0.0;  // int int |u|^p
  double time_step = 0.0;
  std::int64_t time_steps = 0;
  int spatial_points = 0;
  /// |I(dt) - I(2 dt)| / I(dt) for the time trapezoid.
  double richardson_delta = 0.0;
  /// True when the spatial quadrature is exact (even integer p).
  bool spatial_exact = true;
  /// Relative change under one spatial refinement (non-even p only).
  double grid_delta = 0.0;
};

/// Samples per unit time for a frequency bound 2N: the smallest even integer
/// S with 1/S <= c / (max_beta (2N)^2).
std::int64_t samples_per_unit_time(double max_beta, int n, double c);

/// Minimal exact spatial grid for even p: p * (2N) + 1 points.
int exact_spatial_points(int n, double p);

/// True if p is an even positive integer.
bool is_even_integer(double p);

/// Direct evaluation: for each time sample the field is synthesized on the
/// full d-dimensional grid.
NormResult lp_spacetime_norm(const SpectralField& field, const TorusParams& params, double p,
                             double horizon, const QuadratureSpec& quad = {});

/// The 1-periodic function F(t) = ||e^{it(2pi)^{-1} d_x^2} h||_{L^p(T)}^p of a
/// one-dimensional profile h (k = -2N..2N), for even p.
///
/// F is a trigonometric polynomial in t of degree at most (p/2) K^2 with K the
/// largest frequency of h, so sampling it at L > p K^2 points determines its
/// Fourier coefficients exactly. Values at arbitrary times come from an
/// oversampled band-limited table and local Lagrange interpolation.
class PeriodicProfile {
 public:
  PeriodicProfile(std::span<const Complex> h, int n, int p);

  int p() const { return p_; }
  int n() const { return n_; }
  /// F on the uniform grid l/L, l = 0..L-1.
  std::span<const double> samples() const { return samples_; }
  /// a_k for k = -bandwidth..bandwidth.
  std::span<const Complex> fourier() const { return fourier_; }
  int bandwidth() const { return bandwidth_; }
  Complex coefficient(int k) const;
  /// a_0, the mean of F over one period.
  double a0() const { return a0_; }
  /// F(s) for a reduced phase s in [0, 1).
  double at_phase(double s) const;
  /// F(beta * j / S).
  double at_ratio(double beta, std::int64_t j, std::int64_t samples_per_unit) const {
    return at_phase(frac_ratio(beta, j, samples_per_unit));
  }
  std::size_t table_size() const { return fine_.size(); }
  /// Spatial grid used to tabulate F.
  int spatial_points() const { return spatial_points_; }

 private:
  int n_;
  int p_;
  int bandwidth_;
  int spatial_points_ = 0;
  std::vector<double> samples_;
  std::vector<Complex> fourier_;
  std::vector<double> fine_;
  double a0_ = 0.0;
};

/// Fast path for tensor data f = h (x) ... (x) h and integer horizons:
/// int_0^T prod_i F(beta_i t) dt on the same time grid as lp_spacetime_norm.
NormResult tensor_norm_fast(std::span<const Complex> h, int n, const TorusParams& params, int p,
                            std::int64_t horizon, const QuadratureSpec& quad = {});

/// Same as tensor_norm_fast on a SpectralField; throws if the field is not a
/// tensor power.
NormResult tensor_norm_fast(const SpectralField& field, const TorusParams& params, int p,
                            std::int64_t horizon, const QuadratureSpec& quad = {});

/// Power integrals int_0^T prod_i F(beta_i t) dt for several increasing integer
/// horizons in one pass. Returns one NormResult per horizon.
std::vector<NormResult> tensor_power_integrals(const PeriodicProfile& profile,
                                               const TorusParams& params,
                                               std::span<const std::int64_t> horizons,
                                               const QuadratureSpec& quad = {});

/// max_t |G(t) - a0^{d-1}| / a0^{d-1} with
/// G(t) = (1/T) sum_{n<T} prod_{i>=2} F(beta_i (t + n)), t on a uniform grid of [0, 1).
double g_deviation(const PeriodicProfile& profile, const TorusParams& params,
                   std::int64_t horizon, int t_samples);

}  // namespace irtorus
