#pragma once

// Exponent predictors, Strichartz-constant scans, the refocusing optimality
// experiment, level-set census and profile coefficient checks.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irtorus/diophantine.h"
#include "irtorus/norms.h"
#include "irtorus/torus.h"

namespace irtorus {

/// Exact rational with 64-bit numerator and positive denominator, always in
/// lowest terms. Arithmetic throws std::overflow_error instead of wrapping.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);  // NOLINT(google-explicit-constructor)
  /// The exact binary value of a finite double (denominator at most 2^62).
  static Rational from_double(double x);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational abs(const Rational& r);
Rational max(const Rational& a, const Rational& b);

enum class ThetaKind { kConjectured, kProved, kTheta1, kTheta2 };
std::string to_string(ThetaKind kind);

struct ExponentTable {
  int d = 0;
  Rational p;
  Rational p_star;        // 2(d+2)/d
  Rational theta_conj;
  Rational theta_proved;  // 0 below p*, max(theta1, theta2) on [p*, 6), 2d-2 from 6 on
  Rational theta1;        // 2(d-1)(p-p*)/(p+8-p*), 0 below p*
  Rational theta2;        // d(d-2)/(4(d-1)) (p-p*), 0 below p*
};

/// Requires d >= 2 and p >= 1.
ExponentTable theta_exponents(int d, const Rational& p);
ExponentTable theta_exponents(int d, double p);
Rational theta_value(ThetaKind kind, int d, const Rational& p);

struct Breakpoint {
  Rational p;
  Rational left;   // limit of the piece ending at p
  Rational right;  // value of the piece starting at p
  Rational jump;   // |left - right|
};

/// Breakpoints of the piecewise definition of each exponent: p* everywhere,
/// 2d/(d-2) for the proved exponent when d >= 4, and 6 for the conjectured
/// and proved exponents.
std::vector<Breakpoint> theta_breakpoints(ThetaKind kind, int d);

// ---------------------------------------------------------------------------

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the residuals
  int points = 0;
};

/// Least squares y = slope x + intercept. Needs at least two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);
/// fit_line on natural logarithms of positive data.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

enum class ProfileKind { kPeaked, kPlaneWave };
std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

/// One-dimensional L^2-normalized factor of the tensor profile.
std::vector<Complex> profile_line(ProfileKind kind, int n);

/// T = c N^alpha.
struct TLaw {
  double c = 1.0;
  double alpha = 0.0;
};

struct ScanConfig {
  std::vector<double> beta;
  double p = 4.0;
  ProfileKind profile = ProfileKind::kPeaked;
  std::vector<int> ns;
  /// Explicit horizons, shared by every N (ignored with a T-law).
  std::vector<double> ts;
  std::optional<TLaw> t_law;
  /// With a T-law, the horizons of each N are c N^alpha m for every m here.
  std::vector<double> t_multipliers{1.0};
  QuadratureSpec quad;
};

struct ScanCell {
  int n = 0;
  int column = 0;  // index into the horizon list of this N
  double t = 0.0;
  double c = 0.0;  // norm / ||f||_2
  double norm = 0.0;
  double l2 = 0.0;
  double richardson_delta = 0.0;
  std::int64_t time_steps = 0;
  bool fast_path = false;
};

struct ScanResult {
  std::vector<ScanCell> cells;  // N-major, then column
  std::vector<LinearFit> t_fits;  // log C vs log T for each N (when >= 2 horizons)
  std::vector<LinearFit> n_fits;  // log C vs log N for each column (when >= 2 N)
  int columns = 0;
};

/// Tensor profiles with even integer p and integer horizons go through the
/// periodic-profile fast path; everything else uses direct quadrature.
ScanResult strichartz_scan(const ScanConfig& config);

struct OptimalityResult {
  ScanResult scan;  // columns: T0 * {1, 1.5, 2, 3, 4}, T0 = round(N^{2d-2+eta})
  double eta = 0.0;
  int p = 0;
  int d = 0;
  double predicted = 0.0;          // d/2 - 3d/p
  double square_predicted = 0.0;   // d/2 - (d+2)/p
  LinearFit n_fit;                 // log(C(T0)/T0^{1/p}) vs log N
  std::vector<std::int64_t> t0;
  std::vector<LinearFit> t_fits;   // log C vs log T over [T0, 4 T0]
  double max_t_slope_error = 0.0;  // max |slope - 1/p|
  std::vector<double> a0;
  std::vector<double> g_deviation; // max_t |G(t) - a0^{d-1}| / a0^{d-1} at T0
};

OptimalityResult optimality_experiment(std::span<const double> beta, int p, double eta,
                                       std::span<const int> ns, const QuadratureSpec& quad = {},
                                       int g_samples = 256);

struct LevelSetOptions {
  /// Time step constant for the census grid.
  double time_step_constant = 1.0;
  /// Spatial points per dimension; 0 selects the smallest FFT size >= 4N+1.
  int spatial_points = 0;
};

struct LevelSetRecord {
  int n = 0;
  double horizon = 0.0;
  double p = 0.0;
  std::vector<double> lambdas;
  std::vector<double> measures;  // |E_lambda| = |{(t,x) : |u| > lambda}|
  double total_measure = 0.0;
  double power_integral = 0.0;   // sum of w |u|^p on the grid
  double layer_cake = 0.0;       // p int lambda^{p-1} |E_lambda| d lambda (trapezoid in lambda)
  double layer_cake_error = 0.0; // relative
  double max_modulus = 0.0;
  double split = 0.0;            // T^{1/8} N^{(d+1)/4}
  double exponent = 0.0;         // 2(d+2)/d
  /// |E| lambda^{exponent} above the split, |E| lambda^{exponent} / T below.
  std::vector<double> normalized;
  double high_max = 0.0;
  double low_max = 0.0;
  std::int64_t time_samples = 0;
  int spatial_points = 0;
};

/// Uniform levels top/count, 2 top/count, ..., top.
std::vector<double> uniform_levels(double top, int count);

/// Census of the superlevel sets of |e^{it Delta_beta} f| on [0, T] x T^d.
/// An empty lambda grid selects 1024 uniform levels up to sum |a_k|.
LevelSetRecord level_set_census(const SpectralField& field, const TorusParams& params, double p,
                                double horizon, std::span<const double> lambdas = {},
                                const LevelSetOptions& options = {});

struct ProfileCheck {
  int p = 0;
  std::vector<int> ns;
  std::vector<double> a0;
  LinearFit a0_fit;
  double predicted_slope = 0.0;  // p/2 - 3
  /// decay[n-1][i] = max_{1 <= |k| <= N^3} |a_k| |k|^n / (a0 N^{2n}) for ns[i].
  std::array<std::vector<double>, 3> decay;
};

/// a_0 and Fourier decay of F(t) = ||e^{it(2pi)^{-1} d_x^2} h||_p^p for the
/// normalized peaked line h at each N.
ProfileCheck profile_coefficient_checks(int p, std::span<const int> ns);

struct RepeakResult {
  RefocusResult refocus;
  double sup_initial = 0.0;
  double sup_refocused = 0.0;
  double ratio = 0.0;
  int grid_points = 0;
};

/// refocus_time followed by sup_x |u(q, x)| / sup_x |psi(x)| for the peaked
/// profile, both on a uniform grid with `grid_points` per dimension
/// (0: smallest FFT size >= 8N).
RepeakResult refocus_experiment(const TorusParams& params, int n, double eta, double eps,
                                int grid_points = 0);

}  // namespace irtorus
