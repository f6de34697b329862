#pragma once

// Exact lattice counts behind the sextuple estimate: Lambda_A sextuple sets,
// Sigma_X fibers, the X-count, Eisenstein triple counts and the badness sum
// with its dyadic E_ij census.
//
// Frequencies range over the box max_i |k_i| <= N.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "irtorus/torus.h"

namespace irtorus {

/// Triples (a, b, c) with a + b + c = M and a^2 + b^2 + c^2 = S.
struct EisensteinQuery {
  std::int64_t m = 0;
  std::int64_t s = 0;
};

/// Number of triples with max(|a|, |b|, |c|) <= range. Solutions come from
/// factoring (9S - 3M^2)/2 = x^2 + xy + y^2 in Z[omega].
std::int64_t eisenstein_triple_count(const EisensteinQuery& q, std::int64_t range);

/// max over (M, S) of the triple count with entries in [-range, range].
std::int64_t eisenstein_fiber_max(std::int64_t range);

enum class CountKind { kLambdaA, kSigmaX, kXCount, kEij };
std::string to_string(CountKind kind);

struct CountRecord {
  CountKind kind = CountKind::kLambdaA;
  int d = 0;
  int n = 0;              // N (lambda_A, sigma_X)
  double a = 0.0;         // A (lambda_A, x_count)
  std::int64_t k = 0;     // K (x_count, eij)
  std::vector<std::int64_t> x;  // X (sigma_X)
  std::vector<int> i;     // dyadic shells (eij)
  int j = 0;              // (eij)
  bool lowest = false;    // lambda_A bucket [0, 2A)
  std::int64_t count = 0;
  double weighted = 0.0;  // sum |a_k1 ... a_k6| when coefficients are given
  double bound = 0.0;
  double ratio = 0.0;
};

/// |Q(k1) - Q(k2) + ... - Q(k6)| = |sum_i beta_i D_i| for the integer vector D
/// of alternating coordinate square sums, with error-free products.
double alternating_form(std::span<const double> beta, std::span<const std::int64_t> d);

/// Smallest power of two strictly larger than N^{2-2d}.
double lambda_lowest_bucket(int d, int n);

/// Coefficients |a_k| on the box |k_i| <= N (row-major, side 2N+1) of the
/// L^2-normalized constant family.
std::vector<double> normalized_constant_coeffs(int d, int n);

/// Sextuples with k1 + k3 + k5 = k2 + k4 + k6 and |alternating form| in
/// [A, 2A) ([0, 2A) when A is the lowest bucket). A must be a power of two in
/// [lambda_lowest_bucket, 100 N^2]. `coeffs` (empty, or one magnitude per box
/// point) fills `weighted`. bound = N^{2d-2} A, scaled by N^{3d} when unweighted.
/// Throws MemoryLimitExceeded when a per-sum table would exceed `max_bytes`.
CountRecord lambda_a_count(const TorusParams& params, int n, double a,
                           std::span<const double> coeffs = {},
                           std::size_t max_bytes = std::size_t{1} << 30);

/// Counts for every bucket A = lowest * 2^m, m = 0, 1, ... up to the largest
/// attainable value.
std::vector<CountRecord> lambda_a_histogram(const TorusParams& params, int n,
                                            std::span<const double> coeffs = {});

/// #Sigma_X: sextuples with zero vector sum and alternating square sums X_i
/// in each coordinate. bound = (2N+1)^{3d}.
CountRecord sigma_x_count(int n, std::span<const std::int64_t> x);

/// #{X in Z^d : |X_i| < K, |X_1 + beta_2 X_2 + ... + beta_d X_d| < A}.
/// bound = K^{d-1} A.
CountRecord x_count(const TorusParams& params, std::int64_t k, double a);

/// Upper bound (2K-1)^{d-1} (2A+1) from choosing X_2..X_d freely.
double x_count_trivial_bound(int d, std::int64_t k, double a);

struct BadnessResult {
  double value = 0.0;
  std::int64_t terms = 0;
  /// Keyed "i2,...,id|j"; |k_r| in [2^i_r, 2^{i_r+1}) (k_r = 0 joins i_r = 0),
  /// ||beta.k|| in (2^{-j-1}, 2^{-j}].
  std::map<std::string, std::int64_t> census;
  /// max over cells of #E_ij 2^{j - i_2 - ... - i_d}.
  double census_max = 0.0;
  std::string census_argmax;
};

/// sum over 0 < |k_2| + ... + |k_d| <= K of
/// 1 / (<k_2> ... <k_d> ||beta_2 k_2 + ... + beta_d k_d||), <x> = max(1, |x|).
/// Throws DivergentTerm when some ||beta.k|| vanishes.
BadnessResult badness_sum(std::span<const double> beta, std::int64_t k);

}  // namespace irtorus
