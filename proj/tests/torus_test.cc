#include "irtorus/torus.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "irtorus/cutoff.h"
#include "irtorus/errors.h"

namespace irtorus {
namespace {

SpectralField random_field(std::mt19937_64& rng, int d, int n) {
  std::normal_distribution<double> g;
  SpectralField shape(d, n);
  std::vector<Complex> c(shape.size());
  for (auto& v : c) v = {g(rng), g(rng)};
  return SpectralField(d, n, std::move(c));
}

TEST(QuadraticForm, IntegerCase) {
  const std::vector<int> k = {3, 4};
  EXPECT_EQ(quadratic_form(TorusParams::square(2), k), 25.0);
}

TEST(QuadraticForm, ZeroVector) {
  const std::vector<int> k = {0, 0, 0};
  EXPECT_EQ(quadratic_form(TorusParams({1.0, 1.7, 1.3}), k), 0.0);
}

TEST(QuadraticForm, DyadicCoefficients) {
  const std::vector<int> k = {1, 2, 2};
  EXPECT_EQ(quadratic_form(TorusParams({1.0, 1.25, 1.5}), k), 12.0);
}

TEST(QuadraticForm, DimensionMismatch) {
  const std::vector<int> k = {1, 2, 3};
  EXPECT_THROW(quadratic_form(TorusParams::square(2), k), DimensionMismatch);
}

TEST(TorusParams, Validation) {
  EXPECT_THROW(TorusParams({1.0}), std::invalid_argument);
  EXPECT_THROW(TorusParams({1.0, 2.5}), std::invalid_argument);
  EXPECT_THROW(TorusParams({1.5, 1.5}), std::invalid_argument);
  EXPECT_NO_THROW(TorusParams({1.5, 1.5}, true));
  EXPECT_NO_THROW(TorusParams({1.0}, true));
  EXPECT_TRUE(TorusParams::square(3).integral());
  EXPECT_FALSE(TorusParams({1.0, 1.5}).integral());
}

TEST(Propagate, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(1);
  const auto f = random_field(rng, 2, 3);
  const auto g = propagate(f, TorusParams({1.0, 1.37}), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g.coeffs()[i], f.coeffs()[i]);
}

TEST(Propagate, SquareTorusUnitTime) {
  std::mt19937_64 rng(2);
  const auto f = random_field(rng, 2, 3);
  const auto g = propagate(f, TorusParams::square(2), 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g.coeffs()[i], f.coeffs()[i]);
}

TEST(Propagate, PlaneWaveStaysUnimodular) {
  const auto f = make_profile(ProfileSpec::plane_wave({1, -2}), 2, 2);
  const auto g = propagate(f, TorusParams({1.0, 1.618}), 123.456);
  const std::vector<int> k = {1, -2};
  EXPECT_NEAR(std::abs(g.at(k)), 1.0, 1e-15);
  EXPECT_NEAR(g.l2_norm(), 1.0, 1e-15);
}

TEST(Propagate, PhaseConvention) {
  // a_k -> a_k exp(-2 pi i t Q(k)).
  const auto f = make_profile(ProfileSpec::plane_wave({1, 1}), 2, 2);
  const double t = 0.1;
  const auto g = propagate(f, TorusParams({1.0, 1.5}), t);
  const std::vector<int> k = {1, 1};
  const double angle = -2.0 * M_PI * t * 2.5;
  EXPECT_NEAR(g.at(k).real(), std::cos(angle), 1e-14);
  EXPECT_NEAR(g.at(k).imag(), std::sin(angle), 1e-14);
}

TEST(Propagate, ConservesL2AndComposes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_real_distribution<double> b(1.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 2;
    std::vector<double> beta(d, 1.0);
    for (int i = 1; i < d; ++i) beta[i] = b(rng);
    const TorusParams params(beta);
    const auto f = random_field(rng, d, 2);
    const double s = u(rng);
    const double t = u(rng);
    const auto fs = propagate(f, params, s);
    EXPECT_LE(std::abs(fs.l2_norm() - f.l2_norm()), 1e-12 * f.l2_norm());
    const auto composed = propagate(fs, params, t);
    const auto direct = propagate(f, params, s + t);
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_LE(std::abs(composed.coeffs()[i] - direct.coeffs()[i]), 1e-12 * f.l2_norm());
    }
  }
}

TEST(Propagate, SquareTorusPeriodicity) {
  std::mt19937_64 rng(4);
  const auto f = random_field(rng, 3, 2);
  const auto params = TorusParams::square(3);
  // Dyadic times keep t and t + 1 exact.
  for (double t : {0.25, 3.125, 1024.5}) {
    const auto a = propagate(f, params, t);
    const auto b = propagate(f, params, t + 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(a.coeffs()[i], b.coeffs()[i]);
  }
}

TEST(Propagate, LargeTimesKeepPhaseAccuracy) {
  // t Q(k) ~ 1e11: a naive double product would lose all fractional digits.
  const auto f = make_profile(ProfileSpec::plane_wave({7, 0}), 4, 2);
  const double t = 2147483647.25;  // exact in binary
  const auto g = propagate(f, TorusParams::square(2), t);
  const std::vector<int> k = {7, 0};
  // t * 49 = integer + 12.25 -> phase 0.25 -> exp(-i pi/2) = -i.
  EXPECT_NEAR(g.at(k).real(), 0.0, 1e-12);
  EXPECT_NEAR(g.at(k).imag(), -1.0, 1e-12);
}

TEST(MakeProfile, PlaneWaveIsDelta) {
  const auto f = make_profile(ProfileSpec::plane_wave({1, 0}), 3, 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto k = f.frequency(i);
    const double expected = (k[0] == 1 && k[1] == 0) ? 1.0 : 0.0;
    EXPECT_EQ(f.coeffs()[i], Complex(expected, 0.0));
  }
  EXPECT_THROW(make_profile(ProfileSpec::plane_wave({7, 0}), 3, 2), std::invalid_argument);
}

TEST(MakeProfile, PeakedPlateau) {
  for (int n : {1, 4, 9}) {
    const auto f = make_profile(ProfileSpec::peaked_psi(), n, 2);
    for (int a = -n; a <= n; ++a) {
      for (int b = -n; b <= n; ++b) {
        const std::vector<int> k = {a, b};
        EXPECT_EQ(f.at(k), Complex(1.0, 0.0));
      }
    }
    const std::vector<int> edge = {2 * n, 0};
    EXPECT_EQ(f.at(edge), Complex(0.0, 0.0));
  }
}

TEST(MakeProfile, PeakedNormMatchesDirectSum) {
  // Oracle: (sum_k chi(k/8)^2)^2 accumulated from the closed-form cutoff.
  double line = 0.0;
  for (int k = -16; k <= 16; ++k) {
    const double z = std::abs(k / 8.0);
    double c = 1.0;
    if (z >= 2.0) {
      c = 0.0;
    } else if (z > 1.0) {
      const double x = z - 1.0;
      const double a = std::exp(-1.0 / x);
      const double b = std::exp(-1.0 / (1.0 - x));
      c = 1.0 - a / (a + b);
    }
    line += c * c;
  }
  const auto f = make_profile(ProfileSpec::peaked_psi(), 8, 2);
  EXPECT_NEAR(f.l2_norm() * f.l2_norm(), line * line, 1e-12 * line * line);
  const auto g = make_profile(ProfileSpec::peaked_psi(true), 8, 2);
  EXPECT_NEAR(g.l2_norm(), 1.0, 1e-14);
}

TEST(MakeProfile, Custom) {
  const auto f = make_profile(
      ProfileSpec::custom({{{0, 1}, Complex(3.0, 0.0)}, {{1, 0}, Complex(0.0, 4.0)}}, true), 1, 2);
  EXPECT_NEAR(f.l2_norm(), 1.0, 1e-15);
  const std::vector<int> k = {1, 0};
  EXPECT_NEAR(f.at(k).imag(), 0.8, 1e-15);
}

TEST(TensorFactor, RecoversPeakedProfile) {
  const auto f = make_profile(ProfileSpec::peaked_psi(), 4, 3);
  const auto h = tensor_factor(f);
  ASSERT_TRUE(h.has_value());
  const auto line = peaked_line(4, false);
  for (std::size_t i = 0; i < line.size(); ++i) EXPECT_NEAR(std::abs((*h)[i] - line[i]), 0.0, 1e-14);
}

TEST(TensorFactor, RejectsNonTensor) {
  const auto f = make_profile(
      ProfileSpec::custom({{{0, 1}, Complex(1.0, 0.0)}, {{1, 0}, Complex(1.0, 0.0)}}), 1, 2);
  EXPECT_FALSE(tensor_factor(f).has_value());
}

TEST(Chi, ShapeConstraints) {
  EXPECT_EQ(chi(0.0), 1.0);
  EXPECT_EQ(chi(1.0), 1.0);
  EXPECT_EQ(chi(-1.0), 1.0);
  EXPECT_EQ(chi(2.0), 0.0);
  EXPECT_NEAR(chi(1.5), 0.5, 1e-15);
  for (double z = -3; z <= 3; z += 0.01) {
    EXPECT_GE(chi(z), 0.0);
    EXPECT_LE(chi(z), 1.0);
    EXPECT_EQ(chi(z), chi(-z));
  }
  // Integral of chi is 3.
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += chi(-2.0 + (i + 0.5) * 4.0 / n);
  EXPECT_NEAR(s * 4.0 / n, kChiIntegral, 1e-9);
}

TEST(PhiWindow, Constraints) {
  EXPECT_EQ(phi_window(2.0), 0.0);
  EXPECT_EQ(phi_window(3.0), 0.0);
  for (double z = -1.0; z <= 1.0; z += 0.01) EXPECT_GT(phi_window(z), 1.0);
  for (double z = -2.0; z <= 2.0; z += 0.013) {
    EXPECT_GE(phi_window(z), -1e-12);
    EXPECT_NEAR(phi_window(z), phi_window(-z), 1e-14);
  }
  // Nonnegative Fourier transform, sampled.
  for (double xi = 0.0; xi < 6.0; xi += 0.05) {
    double s = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
      const double z = -2.0 + (i + 0.5) * 4.0 / n;
      s += phi_window(z) * std::cos(2 * M_PI * xi * z);
    }
    EXPECT_GE(s * 4.0 / n, -1e-8) << "xi=" << xi;
  }
}

}  // namespace
}  // namespace irtorus
