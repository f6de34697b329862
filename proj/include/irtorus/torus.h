#pragma once

// Rectangular tori in the rescaled picture: the torus [0,1]^d with the
// diagonal quadratic form Q(k) = sum_i beta_i k_i^2, and the exact spectral
// propagator a_k -> a_k exp(-2 pi i t Q(k)).

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace irtorus {

using Complex = std::complex<double>;

class TorusParams {
 public:
  /// beta_i in [1, 2], d in [2, 4], beta_1 = 1. `allow_override` lifts the
  /// beta_1 = 1 convention and admits d = 1 (used for one-dimensional profiles).
  explicit TorusParams(std::vector<double> beta, bool allow_override = false);

  /// The square torus, beta = (1, ..., 1).
  static TorusParams square(int d);

  int d() const { return static_cast<int>(beta_.size()); }
  std::span<const double> beta() const { return beta_; }
  double beta(int i) const { return beta_[static_cast<std::size_t>(i)]; }
  double max_beta() const;
  /// True when every beta_i is an integer (the flow is then 1-periodic).
  bool integral() const;

 private:
  std::vector<double> beta_;
};

/// Q_beta(k) = sum_i beta_i k_i^2.
double quadratic_form(const TorusParams& params, std::span<const int> k);

/// Finitely supported Fourier data on the box |k_i| <= 2N, stored densely in
/// row-major order (first coordinate slowest). Immutable.
class SpectralField {
 public:
  /// The zero field.
  SpectralField(int d, int n);
  /// Dense coefficients, side 4N+1 per dimension.
  SpectralField(int d, int n, std::vector<Complex> coeffs);

  /// Builds a field from (frequency, amplitude) pairs; frequencies outside the
  /// box are rejected.
  static SpectralField from_entries(int d, int n,
                                    std::span<const std::pair<std::vector<int>, Complex>> entries);

  int d() const { return d_; }
  int n() const { return n_; }
  int bound() const { return 2 * n_; }
  int side() const { return 4 * n_ + 1; }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex at(std::span<const int> k) const;
  std::vector<int> frequency(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> k) const;

  /// (sum |a_k|^2)^(1/2), compensated.
  double l2_norm() const;
  /// Largest |k_i| over nonzero coefficients (0 for the zero field).
  int max_frequency() const;

  SpectralField scaled(Complex c) const;

 private:
  int d_;
  int n_;
  std::vector<Complex> coeffs_;
};

struct ProfileSpec {
  enum class Kind { kPlaneWave, kPeakedPsi, kCustom };

  Kind kind = Kind::kPeakedPsi;
  std::vector<int> mode;  // plane wave frequency
  std::vector<std::pair<std::vector<int>, Complex>> table;  // custom coefficients
  bool normalize = false;

  static ProfileSpec plane_wave(std::vector<int> n, bool normalize = false);
  static ProfileSpec peaked_psi(bool normalize = false);
  static ProfileSpec custom(std::vector<std::pair<std::vector<int>, Complex>> table,
                            bool normalize = false);
};

/// plane_wave(n): a single unit coefficient; peaked_psi: a_k = prod_i chi(k_i/N);
/// custom: the given table. Divides by the L2 norm when requested.
SpectralField make_profile(const ProfileSpec& spec, int n, int d);

/// One-dimensional peaked profile h_k = chi(k/N), k = -2N..2N.
std::vector<Complex> peaked_line(int n, bool normalize);

/// h (x) h (x) ... (x) h, d factors, with h given on k = -2N..2N.
SpectralField tensor_power(std::span<const Complex> h, int n, int d);

/// If the field equals h (x) ... (x) h for a single one-dimensional table h,
/// returns h (normalized so that its largest entry is real positive and the
/// tensor power reproduces the field up to `rel_tol`).
std::optional<std::vector<Complex>> tensor_factor(const SpectralField& field,
                                                  double rel_tol = 1e-13);

/// Multiplies each a_k by exp(-2 pi i t Q(k)); phases are reduced mod 1
/// before exponentiation.
SpectralField propagate(const SpectralField& field, const TorusParams& params, double t);

/// Physical-space values of the field on the uniform grid with `points`
/// samples per dimension (row-major), i.e. sum_k a_k exp(2 pi i k.x).
std::vector<Complex> synthesize(const SpectralField& field, int points);

}  // namespace irtorus
