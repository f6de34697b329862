#include "irtorus/counting.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "irtorus/errors.h"
#include "oracles.h"

namespace irtorus {
namespace {

constexpr double kSeedZeroBeta2 = 0x1.28e837c5cb41ep+0;
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

TEST(Eisenstein, Examples) {
  EXPECT_EQ(eisenstein_triple_count({0, 0}, 5), 1);
  EXPECT_EQ(eisenstein_triple_count({0, 2}, 5), 6);
  EXPECT_EQ(eisenstein_triple_count({3, 3}, 5), 1);
}

TEST(Eisenstein, MatchesBruteForceOnGrid) {
  for (std::int64_t m = -20; m <= 20; ++m) {
    for (std::int64_t s = 0; s <= 200; ++s) {
      ASSERT_EQ(eisenstein_triple_count({m, s}, 20), oracle::eisenstein(m, s, 20))
          << "M=" << m << " S=" << s;
    }
  }
}

TEST(Eisenstein, RangeRestriction) {
  for (std::int64_t m = -9; m <= 9; ++m) {
    for (std::int64_t s = 0; s <= 80; ++s) {
      ASSERT_EQ(eisenstein_triple_count({m, s}, 3), oracle::eisenstein(m, s, 3));
    }
  }
}

TEST(Eisenstein, SymmetricInM) {
  for (std::int64_t m = 0; m <= 30; ++m) {
    for (std::int64_t s = 0; s <= 400; s += 7) {
      EXPECT_EQ(eisenstein_triple_count({m, s}, 40), eisenstein_triple_count({-m, s}, 40));
    }
  }
}

TEST(Eisenstein, ImpossibleQueries) {
  EXPECT_EQ(eisenstein_triple_count({6, 11}, 10), 0);  // S < M^2 / 3
  EXPECT_EQ(eisenstein_triple_count({1, 2}, 10), 0);   // parity of S and M differ
}

TEST(Eisenstein, FiberMaxGrowsSlowly) {
  const std::int64_t small = eisenstein_fiber_max(8);
  const std::int64_t large = eisenstein_fiber_max(32);
  EXPECT_GE(large, small);
  EXPECT_LE(large, 4 * small);
}

std::vector<double> random_coeffs(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(size);
  for (double& c : out) c = static_cast<double>(rng() >> 11) * 0x1p-53;
  return out;
}

void expect_histogram_matches(const std::vector<CountRecord>& fast, const oracle::Hist& ref,
                              bool weighted) {
  std::int64_t fast_total = 0;
  for (std::size_t m = 0; m < fast.size(); ++m) {
    const auto it = ref.counts.find(static_cast<int>(m));
    const std::int64_t expected = it == ref.counts.end() ? 0 : it->second;
    EXPECT_EQ(fast[m].count, expected) << "bucket " << m << " A=" << fast[m].a;
    if (weighted && expected > 0) {
      const long double w = ref.weights.at(static_cast<int>(m));
      EXPECT_NEAR(fast[m].weighted, static_cast<double>(w), 1e-9 * static_cast<double>(w));
    }
    fast_total += fast[m].count;
  }
  std::int64_t ref_total = 0;
  for (const auto& [m, c] : ref.counts) ref_total += c;
  EXPECT_EQ(fast_total, ref_total);
}

TEST(LambdaA, MatchesSextupleEnumeration) {
  for (int n = 1; n <= 2; ++n) {
    const TorusParams params({1.0, kSeedZeroBeta2});
    const std::vector<double> beta(params.beta().begin(), params.beta().end());
    const auto fast = lambda_a_histogram(params, n);
    const auto ref = oracle::lambda_sextuples_d2(beta, n, lambda_lowest_bucket(2, n), {});
    expect_histogram_matches(fast, ref, false);
  }
}

TEST(LambdaA, MatchesGroupedOracle) {
  const std::vector<std::vector<double>> betas = {{1.0, kSeedZeroBeta2}, {1.0, 1.0}, {1.0, 1.5}};
  for (const auto& beta : betas) {
    for (int n = 3; n <= 4; ++n) {
      const TorusParams params(beta);
      const auto fast = lambda_a_histogram(params, n);
      const auto ref = oracle::lambda_grouped(beta, n, lambda_lowest_bucket(2, n), {});
      expect_histogram_matches(fast, ref, false);
    }
  }
}

TEST(LambdaA, WeightedMatchesOracle) {
  const TorusParams params({1.0, kSeedZeroBeta2});
  const std::vector<double> beta(params.beta().begin(), params.beta().end());
  const auto coeffs = random_coeffs(25, 7);
  const auto fast = lambda_a_histogram(params, 2, coeffs);
  const auto ref = oracle::lambda_sextuples_d2(beta, 2, lambda_lowest_bucket(2, 2), coeffs);
  expect_histogram_matches(fast, ref, true);
}

TEST(LambdaA, ThreeDimensionalGrouped) {
  const std::vector<double> beta = {1.0, kSeedZeroBeta2, 1.7320508075688772};
  const TorusParams params(beta);
  const auto fast = lambda_a_histogram(params, 1);
  const auto ref = oracle::lambda_grouped(beta, 1, lambda_lowest_bucket(3, 1), {});
  expect_histogram_matches(fast, ref, false);
}

TEST(LambdaA, SingleBucketAgreesWithHistogram) {
  const TorusParams params({1.0, kSeedZeroBeta2});
  const auto hist = lambda_a_histogram(params, 3);
  for (const CountRecord& rec : hist) {
    if (rec.a > 100.0 * 9) break;
    const CountRecord one = lambda_a_count(params, 3, rec.a);
    EXPECT_EQ(one.count, rec.count);
    EXPECT_EQ(one.lowest, rec.lowest);
  }
}

TEST(LambdaA, SquareTorusIntegrality) {
  const auto hist = lambda_a_histogram(TorusParams::square(2), 3);
  for (const CountRecord& rec : hist) {
    if (!rec.lowest && 2 * rec.a <= 1.0) EXPECT_EQ(rec.count, 0) << "A=" << rec.a;
  }
}

TEST(LambdaA, SwapSymmetry) {
  // (k1,k3,k5) <-> (k2,k4,k6) negates the form; the oracle evaluated on the
  // swapped sextuples must reproduce the same buckets.
  const std::vector<double> beta = {1.0, kSeedZeroBeta2};
  const auto fast = lambda_a_histogram(TorusParams(beta), 3);
  const auto swapped = oracle::lambda_grouped(beta, 3, lambda_lowest_bucket(2, 3), {}, true);
  expect_histogram_matches(fast, swapped, false);
}

TEST(LambdaA, Validation) {
  const TorusParams params({1.0, kSeedZeroBeta2});
  EXPECT_THROW(lambda_a_count(params, 4, 3.0), std::invalid_argument);
  EXPECT_THROW(lambda_a_count(params, 4, 1.0 / 4096.0), std::invalid_argument);
  EXPECT_THROW(lambda_a_count(params, 4, 4096.0), std::invalid_argument);
  EXPECT_THROW(lambda_a_count(params, 4, 1.0, std::vector<double>(3, 1.0)), DimensionMismatch);
  EXPECT_THROW(lambda_a_count(params, 8, 1.0, {}, 1024), MemoryLimitExceeded);
  EXPECT_DOUBLE_EQ(lambda_lowest_bucket(2, 4), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(lambda_lowest_bucket(2, 3), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(lambda_lowest_bucket(3, 2), 1.0 / 8.0);
}

TEST(LambdaA, NormalizedFamilyScaling) {
  const TorusParams params({1.0, kSeedZeroBeta2});
  std::vector<double> logn, logr;
  for (int n : {4, 6, 8}) {
    const auto coeffs = normalized_constant_coeffs(2, n);
    const CountRecord rec = lambda_a_count(params, n, 1.0, coeffs);
    EXPECT_NEAR(rec.weighted * std::pow(2.0 * n + 1.0, 6), static_cast<double>(rec.count),
                1e-6 * static_cast<double>(rec.count));
    logn.push_back(std::log(n));
    logr.push_back(std::log(static_cast<double>(rec.count) /
                            (std::pow(n, 2.0) * 1.0 * std::pow(n, 6.0))));
  }
  const double mx = (logn[0] + logn[1] + logn[2]) / 3, my = (logr[0] + logr[1] + logr[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (logn[i] - mx) * (logr[i] - my);
    sxx += (logn[i] - mx) * (logn[i] - mx);
  }
  EXPECT_LE(sxy / sxx, 0.2);
}

TEST(SigmaX, MatchesDirectEnumeration) {
  for (int n = 1; n <= 2; ++n) {
    for (std::int64_t x = -6; x <= 6; ++x) {
      std::int64_t ref = 0;
      for (int a1 = -n; a1 <= n; ++a1) for (int a2 = -n; a2 <= n; ++a2)
      for (int a3 = -n; a3 <= n; ++a3) for (int a4 = -n; a4 <= n; ++a4)
      for (int a5 = -n; a5 <= n; ++a5) {
        const int a6 = a1 + a3 + a5 - a2 - a4;
        if (a6 < -n || a6 > n) continue;
        if (a1 * a1 - a2 * a2 + a3 * a3 - a4 * a4 + a5 * a5 - a6 * a6 == x) ++ref;
      }
      const std::int64_t xs[2] = {x, 0};
      const std::int64_t one[1] = {x};
      EXPECT_EQ(sigma_x_count(n, one).count, ref);
      EXPECT_EQ(sigma_x_count(n, xs).count, ref * sigma_x_count(n, std::vector<std::int64_t>{0}).count);
    }
  }
}

TEST(XCount, VacuousConstraintGivesFullBox) {
  const TorusParams params({1.0, kSeedZeroBeta2});
  const CountRecord rec = x_count(params, 16, 200.0);
  EXPECT_EQ(rec.count, 31 * 31);
}

TEST(XCount, GoldenMatchesBruteForce) {
  const std::vector<double> beta = {1.0, kGolden};
  EXPECT_EQ(x_count(TorusParams(beta), 16, 0.1).count, oracle::x_count(beta, 16, 0.1));
}

TEST(XCount, MatchesBruteForceSweep) {
  const std::vector<std::vector<double>> betas = {
      {1.0, kSeedZeroBeta2}, {1.0, kGolden}, {1.0, 1.0}, {1.0, kSeedZeroBeta2, 1.7320508075688772}};
  for (const auto& beta : betas) {
    for (std::int64_t k : {1, 2, 5, 16, 32}) {
      if (beta.size() == 3 && k > 16) continue;
      for (double a : {0.01, 0.1, 0.5, 1.0, 2.5, 40.0}) {
        ASSERT_EQ(x_count(TorusParams(beta), k, a).count, oracle::x_count(beta, k, a))
            << "K=" << k << " A=" << a << " d=" << beta.size();
      }
    }
  }
}

TEST(XCount, Monotone) {
  const TorusParams params({1.0, kSeedZeroBeta2});
  std::int64_t prev_k = 0;
  for (std::int64_t k = 1; k <= 64; k *= 2) {
    const std::int64_t c = x_count(params, k, 0.3).count;
    EXPECT_GE(c, prev_k);
    prev_k = c;
    std::int64_t prev_a = 0;
    for (double a = 1.0 / 64; a <= 8.0; a *= 2) {
      const std::int64_t ca = x_count(params, k, a).count;
      EXPECT_GE(ca, prev_a);
      prev_a = ca;
    }
  }
}

TEST(XCount, LargeAgainstTrivialBound) {
  const TorusParams params({1.0, kSeedZeroBeta2});
  for (double a : {1.5, 4.0, 10.0}) {
    const CountRecord rec = x_count(params, 64, a);
    EXPECT_LE(static_cast<double>(rec.count), x_count_trivial_bound(2, 64, a));
  }
}

TEST(XCount, RatioBoundedByPolylog) {
  const TorusParams params({1.0, kGolden});
  for (std::int64_t k = 16; k <= 1024; k *= 2) {
    const double logk = std::log(static_cast<double>(k));
    for (double a = 1.0; a >= 1.0 / static_cast<double>(k); a /= 2) {
      const CountRecord rec = x_count(params, k, a);
      EXPECT_LE(rec.ratio, logk * logk * logk) << "K=" << k << " A=" << a;
    }
  }
}

TEST(Badness, RationalDiverges) {
  const double beta[2] = {1.0, 1.5};
  EXPECT_THROW(badness_sum(beta, 8), DivergentTerm);
}

TEST(Badness, MatchesDirectSum) {
  const double beta[2] = {1.0, kGolden};
  for (std::int64_t k : {4, 64, 1000}) {
    const BadnessResult r = badness_sum(beta, k);
    const double ref = static_cast<double>(oracle::badness_d2(kGolden, k));
    EXPECT_NEAR(r.value, ref, 1e-11 * ref);
    EXPECT_EQ(r.terms, 2 * k);
  }
}

TEST(Badness, CensusAccountsForEveryTerm) {
  const double beta[3] = {1.0, kSeedZeroBeta2, 1.7320508075688772};
  const BadnessResult r = badness_sum(beta, 40);
  std::int64_t total = 0;
  for (const auto& [key, c] : r.census) {
    EXPECT_NE(key.find('|'), std::string::npos);
    total += c;
  }
  EXPECT_EQ(total, r.terms);
  EXPECT_GT(r.census_max, 0.0);
}

TEST(Badness, GoldenGrowthIsPolylog) {
  const double beta[2] = {1.0, kGolden};
  std::vector<double> x, y;
  for (int e = 6; e <= 12; ++e) {
    const BadnessResult r = badness_sum(beta, std::int64_t{1} << e);
    x.push_back(std::log(static_cast<double>(e)));
    y.push_back(std::log(r.value));
    EXPECT_LE(r.census_max, std::pow(e * std::log(2.0), 3));
  }
  // value ~ (log K)^alpha with alpha <= 3
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  EXPECT_LE(sxy / sxx, 3.0);
}

}  // namespace
}  // namespace irtorus
