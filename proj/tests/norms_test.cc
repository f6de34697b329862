#include "irtorus/norms.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "irtorus/errors.h"

namespace irtorus {
namespace {

// Brute-force oracle for a 1-d profile: F(s) = int_0^1 |sum_k h_k e(kx - s k^2)|^p dx
// by a midpoint rule on M points, evaluated without FFTs.
double brute_profile_power(const std::vector<Complex>& h, int n, int p, double s, int m) {
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    const double x = static_cast<double>(j) / m;
    Complex u{};
    for (int k = -2 * n; k <= 2 * n; ++k) {
      const double ph = 2 * M_PI * (k * x - s * static_cast<double>(k) * k);
      u += h[k + 2 * n] * Complex(std::cos(ph), std::sin(ph));
    }
    acc += std::pow(std::norm(u), p / 2.0);
  }
  return acc / m;
}

TEST(SamplesPerUnitTime, EvenAndSufficient) {
  for (int n : {1, 3, 8}) {
    for (double b : {1.0, 1.37, 2.0}) {
      const auto s = samples_per_unit_time(b, n, 0.125);
      EXPECT_EQ(s % 2, 0);
      EXPECT_LE(1.0 / s, 0.125 / (b * 4.0 * n * n) * (1 + 1e-15));
    }
  }
}

TEST(LpNorm, PlaneWaveIsTimeToOneOverP) {
  const auto params = TorusParams({1.0, 1.4142});
  const auto f = make_profile(ProfileSpec::plane_wave({2, -1}), 2, 2);
  for (double p : {2.0, 4.0, 6.0}) {
    for (double t : {1.0, 2.0, 0.75}) {
      const auto r = lp_spacetime_norm(f, params, p, t);
      EXPECT_NEAR(r.norm, std::pow(t, 1.0 / p), 1e-12) << "p=" << p << " T=" << t;
      EXPECT_TRUE(r.spatial_exact);
    }
  }
}

TEST(LpNorm, OneDimensionalTwoModes) {
  // f = e(0) + e(x): ||f||_{L^2}^2 = 2 for all t, so the space-time integral is 2T.
  const TorusParams params({1.0}, true);
  const auto f = make_profile(
      ProfileSpec::custom({{{0}, Complex(1.0, 0.0)}, {{1}, Complex(1.0, 0.0)}}), 1, 1);
  for (double t : {1.0, 3.0, 0.5}) {
    const auto r = lp_spacetime_norm(f, params, 2.0, t);
    EXPECT_NEAR(r.power_integral, 2.0 * t, 1e-12);
  }
}

TEST(LpNorm, OneDimensionalQuarticClosedForm) {
  // |1 + e(x - t)|^4 averaged over x is 6, independent of t.
  const TorusParams params({1.0}, true);
  const auto f = make_profile(
      ProfileSpec::custom({{{0}, Complex(1.0, 0.0)}, {{1}, Complex(1.0, 0.0)}}), 1, 1);
  const auto r = lp_spacetime_norm(f, params, 4.0, 2.0);
  EXPECT_NEAR(r.power_integral, 12.0, 1e-12);
}

TEST(LpNorm, Homogeneity) {
  const auto params = TorusParams({1.0, 1.3});
  const auto f = make_profile(ProfileSpec::peaked_psi(), 1, 2);
  const auto a = lp_spacetime_norm(f, params, 4.0, 1.0);
  const auto b = lp_spacetime_norm(f.scaled(Complex(0.0, 3.0)), params, 4.0, 1.0);
  EXPECT_NEAR(b.norm, 3.0 * a.norm, 1e-12 * b.norm);
}

TEST(LpNorm, GridDoublingIsStableForEvenP) {
  const auto params = TorusParams({1.0, 1.61803398875});
  const auto f = make_profile(ProfileSpec::peaked_psi(true), 2, 2);
  QuadratureSpec q;
  const auto a = lp_spacetime_norm(f, params, 4.0, 1.0, q);
  q.spatial_points = 2 * a.spatial_points;
  const auto b = lp_spacetime_norm(f, params, 4.0, 1.0, q);
  EXPECT_NEAR(a.norm, b.norm, 1e-12 * a.norm);
}

TEST(LpNorm, RejectsCoarseGrid) {
  const auto f = make_profile(ProfileSpec::peaked_psi(), 2, 2);
  QuadratureSpec q;
  q.spatial_points = 10;
  EXPECT_THROW(lp_spacetime_norm(f, TorusParams::square(2), 4.0, 1.0, q), GridTooCoarse);
}

TEST(LpNorm, DimensionMismatch) {
  const auto f = make_profile(ProfileSpec::peaked_psi(), 1, 2);
  EXPECT_THROW(lp_spacetime_norm(f, TorusParams::square(3), 4.0, 1.0), DimensionMismatch);
}

TEST(LpNorm, NonEvenExponentReportsGridDelta) {
  const auto f = make_profile(ProfileSpec::peaked_psi(true), 1, 2);
  const auto r = lp_spacetime_norm(f, TorusParams({1.0, 1.5}), 3.0, 1.0);
  EXPECT_FALSE(r.spatial_exact);
  EXPECT_LT(r.grid_delta, 1e-3);
  EXPECT_GT(r.norm, 0.0);
}

TEST(LpNorm, TimeQuadratureConverges) {
  const auto f = make_profile(ProfileSpec::peaked_psi(true), 2, 2);
  const TorusParams params({1.0, 1.7});
  const auto r = lp_spacetime_norm(f, params, 4.0, 1.0);
  EXPECT_LT(r.richardson_delta, 1e-3);
  // Second-order trapezoid: halving the step cuts the estimate by about 4.
  QuadratureSpec q;
  q.time_step_constant = 0.0625;
  const auto fine = lp_spacetime_norm(f, params, 4.0, 1.0, q);
  EXPECT_LT(fine.richardson_delta, r.richardson_delta / 3.0);
}

TEST(PeriodicProfile, SamplesMatchBruteForce) {
  const int n = 2;
  const int p = 4;
  std::vector<Complex> h = peaked_line(n, true);
  const PeriodicProfile prof(h, n, p);
  const int l = static_cast<int>(prof.samples().size());
  for (int j : {0, 1, 7, l / 3, l - 1}) {
    const double s = static_cast<double>(j) / l;
    EXPECT_NEAR(prof.samples()[j], brute_profile_power(h, n, p, s, 64), 1e-12);
  }
}

TEST(PeriodicProfile, InterpolationMatchesBruteForce) {
  const int n = 2;
  const int p = 6;
  std::vector<Complex> h = peaked_line(n, true);
  const PeriodicProfile prof(h, n, p);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double s = u(rng);
    EXPECT_NEAR(prof.at_phase(s), brute_profile_power(h, n, p, s, 128), 1e-10) << "s=" << s;
  }
}

TEST(PeriodicProfile, MeanIsParsevalForP2) {
  const int n = 3;
  std::vector<Complex> h = peaked_line(n, false);
  double l2 = 0.0;
  for (const auto& v : h) l2 += std::norm(v);
  const PeriodicProfile prof(h, n, 2);
  EXPECT_NEAR(prof.a0(), l2, 1e-12 * l2);
  // F is constant when p = 2.
  EXPECT_NEAR(prof.at_phase(0.123), l2, 1e-11 * l2);
}

TEST(PeriodicProfile, MeanCountsQuadruplesForP4) {
  // a0 = sum over k1 + k2 = k3 + k4, k1^2 + k2^2 = k3^2 + k4^2 of h h conj(h h).
  const int n = 2;
  std::vector<Complex> h = peaked_line(n, false);
  double oracle = 0.0;
  const int b = 2 * n;
  for (int a = -b; a <= b; ++a)
    for (int c = -b; c <= b; ++c)
      for (int e = -b; e <= b; ++e) {
        const int f = a + c - e;
        if (std::abs(f) > b) continue;
        if (a * a + c * c != e * e + f * f) continue;
        oracle += (h[a + b] * h[c + b] * std::conj(h[e + b] * h[f + b])).real();
      }
  const PeriodicProfile prof(h, n, 4);
  EXPECT_NEAR(prof.a0(), oracle, 1e-12 * oracle);
}

TEST(TensorFast, MatchesDirectTwoDimensional) {
  const int n = 4;
  const auto params = TorusParams({1.0, 1.38196601125});
  const auto f = make_profile(ProfileSpec::peaked_psi(true), n, 2);
  const auto direct = lp_spacetime_norm(f, params, 4.0, 2.0);
  const auto fast = tensor_norm_fast(f, params, 4, 2);
  EXPECT_NEAR(fast.norm, direct.norm, 1e-8 * direct.norm);
  EXPECT_EQ(fast.time_steps, direct.time_steps);
}

TEST(TensorFast, MatchesDirectThreeDimensional) {
  const int n = 1;
  const auto params = TorusParams({1.0, 1.2, 1.9});
  const auto f = make_profile(ProfileSpec::peaked_psi(true), n, 3);
  const auto direct = lp_spacetime_norm(f, params, 6.0, 1.0);
  const auto fast = tensor_norm_fast(f, params, 6, 1);
  EXPECT_NEAR(fast.norm, direct.norm, 1e-8 * direct.norm);
}

TEST(TensorFast, SquareTorusPeriodicity) {
  const auto h = peaked_line(2, true);
  const PeriodicProfile prof(h, 2, 4);
  const std::int64_t horizons[] = {1, 2, 5};
  const auto r = tensor_power_integrals(prof, TorusParams::square(2), horizons);
  EXPECT_NEAR(r[1].power_integral, 2.0 * r[0].power_integral, 1e-11 * r[1].power_integral);
  EXPECT_NEAR(r[2].power_integral, 5.0 * r[0].power_integral, 1e-11 * r[2].power_integral);
}

TEST(TensorFast, RejectsNonTensorAndOddP) {
  const auto f = make_profile(
      ProfileSpec::custom({{{0, 1}, Complex(1.0, 0.0)}, {{1, 0}, Complex(1.0, 0.0)}}), 1, 2);
  EXPECT_THROW(tensor_norm_fast(f, TorusParams::square(2), 4, 1), std::invalid_argument);
  EXPECT_THROW(tensor_norm_fast(peaked_line(1, true), 1, TorusParams::square(2), 3, 1),
               std::invalid_argument);
}

TEST(GDeviation, VanishesForPTwo) {
  const auto h = peaked_line(2, true);
  const PeriodicProfile prof(h, 2, 2);
  EXPECT_LT(g_deviation(prof, TorusParams({1.0, 1.5}), 10, 16), 1e-12);
}

}  // namespace
}  // namespace irtorus
