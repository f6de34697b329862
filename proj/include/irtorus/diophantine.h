#pragma once

// Rational approximation: Dirichlet approximations, measured genericity
// constants for the coefficient vector, seeded sampling of generic
// coefficients, and refocusing-time search.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "irtorus/torus.h"

namespace irtorus {

/// ||x||, the distance from x to the nearest integer.
double nearest_int_dist(double x);

struct RationalApprox {
  std::int64_t a = 0;
  std::int64_t q = 1;
  double delta = 0.0;  // |t - a/q|
};

enum class DirichletMode { kContinuedFraction, kExhaustive };

/// Relative slack on the bound q|t - a/q| <= 1/N that absorbs the decimal to
/// binary conversion of t (0.3 is not a double).
inline constexpr double kDirichletSlack = 1e-12;

/// The smallest q <= N with ||q t|| <= 1/N, and a = nearest integer to q t.
/// Continued-fraction mode walks the convergents of the exact binary value
/// of t; exhaustive mode scans q = 1..N and requires N <= 64.
RationalApprox dirichlet_approx(double t, std::int64_t n,
                                DirichletMode mode = DirichletMode::kContinuedFraction);

/// Continued-fraction denominators q_0 = 1 < q_1 < ... of x, up to `limit`.
std::vector<std::int64_t> convergent_denominators(double x, std::int64_t limit);

enum class GenericityMode { kD1, kD2, kD3 };

std::string to_string(GenericityMode mode);
GenericityMode genericity_mode_from_string(const std::string& name);

struct GenericityReport {
  std::vector<double> beta;
  int depth = 0;
  GenericityMode mode = GenericityMode::kD1;
  /// min LHS / RHS over the scanned range with the constant set to 1.
  double constant = 0.0;
  /// kD1, kD2: (k_1, ..., k_d). kD3: (a_1, ..., a_d, b_1, ..., b_d).
  std::vector<std::int64_t> witness;
  /// An exact zero of the left-hand side was found.
  bool non_generic = false;
};

/// The ratio LHS / RHS of the selected condition at one index vector. For the
/// linear-form conditions the log factors are ln(2 + |.|).
double genericity_ratio(std::span<const double> beta, GenericityMode mode,
                        std::span<const std::int64_t> witness);

/// Exhaustive minimization of genericity_ratio.
///
/// kD1, kD2: all (k_2..k_d) in [-K, K]^{d-1} \ {0}, with k_1 the integer
/// nearest to -(beta_2 k_2 + ... + beta_d k_d).
/// kD3: all a_i, b_i in [-K, K] with a_1, b_2..b_d nonzero. The cost is
/// O(d K^4); depths of a few dozen are practical.
///
/// Ties are broken by the smaller l1 norm of the witness, then
/// lexicographically; witnesses are sign-normalized (first nonzero entry
/// positive). `constant` is the ratio re-evaluated at the witness.
GenericityReport genericity_scan(std::span<const double> beta, int depth, GenericityMode mode);

/// min over k in [k_min, K] of k ||k x||.
struct ApproximationConstant {
  double value = 0.0;
  std::int64_t witness = 0;
};
ApproximationConstant approximation_constant(double x, std::int64_t k_max, std::int64_t k_min = 1);

struct GenericSample {
  std::vector<double> beta;
  GenericityReport report;
  int draws = 0;
};

/// Draws beta_2..beta_d uniformly from [1, 2] (beta_1 = 1) from a
/// mt19937_64 stream seeded with `seed`, rejecting draws whose D1 constant at
/// depth K is below `threshold`. Throws RejectionLimitExceeded after
/// `max_draws` rejections.
GenericSample sample_generic_beta(std::uint64_t seed, int d, double threshold = 1e-3,
                                  int depth = 4096, int max_draws = 1000);

struct RefocusResult {
  std::int64_t q = 0;
  double defect = 0.0;
  /// defect < eps.
  bool found = false;
  std::int64_t bound = 0;
  std::int64_t candidates_checked = 0;
};

/// max over 0 <= k_i <= N of ||q Q_beta(k)||.
double refocus_defect(const TorusParams& params, int n, std::int64_t q);

/// Minimizes refocus_defect over q <= ceil(N^{2d-2+eta}). Candidates are the
/// products of continued-fraction denominators of beta_2..beta_d, followed by
/// an exhaustive scan of 1..min(bound, scan_cap). Ties go to the smaller q.
/// A miss (defect >= eps) is reported with found = false.
RefocusResult refocus_time(const TorusParams& params, int n, double eta, double eps,
                           std::int64_t scan_cap = 10'000'000);

}  // namespace irtorus
