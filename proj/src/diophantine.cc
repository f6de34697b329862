#include "irtorus/diophantine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <tuple>

#include "irtorus/errors.h"
#include "irtorus/parallel.h"
#include "irtorus/phase.h"

namespace irtorus {

double nearest_int_dist(double x) {
  const double r = x - std::floor(x);
  return r > 0.5 ? 1.0 - r : r;
}

namespace {

using i128 = __int128;

// Exact value of a double in [0, 1) as num/den; values below 2^-74 read as 0.
struct ExactFraction {
  i128 num = 0;
  i128 den = 1;
};

ExactFraction exact_fraction(double f) {
  if (f <= 0.0 || f < 0x1p-74) return {};
  int e = 0;
  const double m = std::frexp(f, &e);  // f = m 2^e, m in [0.5, 1)
  auto num = static_cast<i128>(std::ldexp(m, 53));
  i128 den = static_cast<i128>(1) << (53 - e);
  while ((num & 1) == 0 && den > 1) {
    num >>= 1;
    den >>= 1;
  }
  return {num, den};
}

// Convergent denominators of num/den (in [0,1)), increasing, up to limit.
std::vector<std::int64_t> denominators(ExactFraction x, std::int64_t limit) {
  std::vector<std::int64_t> out = {1};
  i128 q_prev = 0;
  i128 q = 1;
  i128 num = x.num;
  i128 den = x.den;
  // First partial quotient of a value in [0, 1) is 0; continue with den/num.
  while (num != 0) {
    const i128 a = den / num;
    const i128 r = den % num;
    den = num;
    num = r;
    const i128 next = a * q + q_prev;
    if (next > limit) break;
    q_prev = q;
    q = next;
    if (out.back() != static_cast<std::int64_t>(q)) out.push_back(static_cast<std::int64_t>(q));
  }
  return out;
}

// ||q f|| and the nearest integer, with an error-free product.
std::pair<double, std::int64_t> scaled_distance(double f, std::int64_t q) {
  const double qd = static_cast<double>(q);
  const double a = std::nearbyint(qd * f);
  return {std::abs(std::fma(qd, f, -a)), static_cast<std::int64_t>(a)};
}

}  // namespace

std::vector<std::int64_t> convergent_denominators(double x, std::int64_t limit) {
  if (!std::isfinite(x)) throw std::invalid_argument("convergent_denominators: x must be finite");
  return denominators(exact_fraction(x - std::floor(x)), limit);
}

RationalApprox dirichlet_approx(double t, std::int64_t n, DirichletMode mode) {
  if (n < 1) throw std::invalid_argument("dirichlet_approx: N must be >= 1");
  if (!std::isfinite(t)) throw std::invalid_argument("dirichlet_approx: t must be finite");
  const double fl = std::floor(t);
  const double f = t - fl;  // exact
  const double bound = (1.0 + kDirichletSlack) / static_cast<double>(n);
  auto accept = [&](std::int64_t q) -> std::optional<RationalApprox> {
    const auto [dist, a] = scaled_distance(f, q);
    if (dist > bound) return std::nullopt;
    return RationalApprox{static_cast<std::int64_t>(fl) * q + a, q, dist / static_cast<double>(q)};
  };
  if (mode == DirichletMode::kExhaustive) {
    if (n > 64) throw std::invalid_argument("dirichlet_approx: exhaustive mode requires N <= 64");
    for (std::int64_t q = 1; q <= n; ++q) {
      if (auto r = accept(q)) return *r;
    }
  } else {
    for (std::int64_t q : denominators(exact_fraction(f), n)) {
      if (auto r = accept(q)) return *r;
    }
  }
  throw std::logic_error("dirichlet_approx: no approximation found");
}

std::string to_string(GenericityMode mode) {
  switch (mode) {
    case GenericityMode::kD1:
      return "D1";
    case GenericityMode::kD2:
      return "D2";
    case GenericityMode::kD3:
      return "D3";
  }
  return "?";
}

GenericityMode genericity_mode_from_string(const std::string& name) {
  if (name == "D1") return GenericityMode::kD1;
  if (name == "D2") return GenericityMode::kD2;
  if (name == "D3") return GenericityMode::kD3;
  throw std::invalid_argument("unknown genericity mode '" + name + "'");
}

namespace {

// |k_1 + beta_2 k_2 + ... + beta_d k_d| with error-free products.
double linear_form(std::span<const double> beta, std::span<const std::int64_t> k) {
  CompensatedSum s;
  s.add(static_cast<double>(k[0]));
  for (std::size_t i = 1; i < beta.size(); ++i) {
    const double kd = static_cast<double>(k[i]);
    const double hi = beta[i] * kd;
    s.add(hi);
    s.add(std::fma(beta[i], kd, -hi));
  }
  return std::abs(s.value());
}

double log_weight(std::int64_t x, int power) {
  return std::pow(std::log(2.0 + static_cast<double>(std::llabs(x))), power);
}

// (1 + |x|) log(2 + |x|)^d, the per-index weight of the third condition.
double d3_weight(std::int64_t x, int d) {
  return (1.0 + static_cast<double>(std::llabs(x))) * log_weight(x, d);
}

struct Candidate {
  double ratio = std::numeric_limits<double>::infinity();
  std::int64_t l1 = 0;
  std::vector<std::int64_t> witness;
};

bool better(const Candidate& a, const Candidate& b) {
  return std::tie(a.ratio, a.l1, a.witness) < std::tie(b.ratio, b.l1, b.witness);
}

void normalize_sign(std::vector<std::int64_t>& w) {
  for (std::int64_t v : w) {
    if (v == 0) continue;
    if (v < 0) {
      for (auto& x : w) x = -x;
    }
    return;
  }
}

Candidate make_candidate(std::span<const double> beta, GenericityMode mode,
                         std::vector<std::int64_t> w) {
  normalize_sign(w);
  Candidate c;
  c.ratio = genericity_ratio(beta, mode, w);
  for (auto v : w) c.l1 += std::llabs(v);
  c.witness = std::move(w);
  return c;
}

Candidate reduce(std::vector<Candidate> parts) {
  Candidate best;
  for (auto& c : parts) {
    if (better(c, best)) best = std::move(c);
  }
  return best;
}

Candidate scan_linear(std::span<const double> beta, int depth, GenericityMode mode) {
  const int d = static_cast<int>(beta.size());
  const std::int64_t side = 2 * static_cast<std::int64_t>(depth) + 1;
  std::int64_t total = 1;
  for (int i = 1; i < d; ++i) total *= side;
  auto parts = map_chunks<Candidate>(
      static_cast<std::size_t>(total), 1 << 16, [&](std::size_t b, std::size_t e) {
        Candidate best;
        std::vector<std::int64_t> k(d);
        for (std::size_t flat = b; flat < e; ++flat) {
          auto rest = static_cast<std::int64_t>(flat);
          bool zero = true;
          double s = 0.0;
          for (int i = d - 1; i >= 1; --i) {
            k[i] = rest % side - depth;
            rest /= side;
            zero = zero && k[i] == 0;
            s += beta[i] * static_cast<double>(k[i]);
          }
          if (zero) continue;
          k[0] = -static_cast<std::int64_t>(std::nearbyint(s));
          // The ratio is invariant under k -> -k, so it can be screened before normalizing.
          if (genericity_ratio(beta, mode, k) > best.ratio) continue;
          Candidate c = make_candidate(beta, mode, k);
          if (better(c, best)) best = std::move(c);
        }
        return best;
      });
  return reduce(std::move(parts));
}

Candidate scan_d3(std::span<const double> beta, int depth) {
  const int d = static_cast<int>(beta.size());
  const int side = 2 * depth + 1;
  std::vector<double> weight(side);
  for (int x = -depth; x <= depth; ++x) weight[x + depth] = d3_weight(x, d);
  // Outer loop over (a_1, b_1); each remaining axis is minimized on its own.
  const auto pairs = static_cast<std::size_t>(side) * side;
  auto parts = map_chunks<Candidate>(pairs, 16, [&](std::size_t b, std::size_t e) {
    Candidate best;
    for (std::size_t flat = b; flat < e; ++flat) {
      const std::int64_t a1 = static_cast<std::int64_t>(flat / side) - depth;
      const std::int64_t b1 = static_cast<std::int64_t>(flat % side) - depth;
      if (a1 == 0) continue;
      std::vector<std::int64_t> w(2 * d, 0);
      w[0] = a1;
      w[d] = b1;
      for (int i = 1; i < d; ++i) {
        double axis_best = std::numeric_limits<double>::infinity();
        std::int64_t best_a = 0;
        std::int64_t best_b = 1;
        for (std::int64_t bi = -depth; bi <= depth; ++bi) {
          if (bi == 0) continue;
          const double den = static_cast<double>(a1 * bi);
          for (std::int64_t ai = -depth; ai <= depth; ++ai) {
            const double r = static_cast<double>(ai * b1) / den;
            const double v = std::abs(beta[i] - r) * weight[ai + depth] * weight[bi + depth];
            if (v < axis_best) {
              axis_best = v;
              best_a = ai;
              best_b = bi;
            }
          }
        }
        w[i] = best_a;
        w[d + i] = best_b;
      }
      Candidate c = make_candidate(beta, GenericityMode::kD3, std::move(w));
      if (better(c, best)) best = std::move(c);
    }
    return best;
  });
  return reduce(std::move(parts));
}

void check_beta(std::span<const double> beta) {
  if (beta.size() < 2) throw std::invalid_argument("genericity: need d >= 2");
  for (double b : beta) {
    if (!(b >= 1.0 && b <= 2.0)) throw std::invalid_argument("genericity: beta_i must lie in [1, 2]");
  }
}

}  // namespace

double genericity_ratio(std::span<const double> beta, GenericityMode mode,
                        std::span<const std::int64_t> witness) {
  const int d = static_cast<int>(beta.size());
  switch (mode) {
    case GenericityMode::kD1: {
      if (static_cast<int>(witness.size()) != d) throw DimensionMismatch("genericity_ratio: |k| != d");
      std::int64_t s = 0;
      for (auto v : witness) s += std::llabs(v);
      const double sd = static_cast<double>(s);
      return linear_form(beta, witness) * std::pow(sd, d - 1) * log_weight(s, 2 * d);
    }
    case GenericityMode::kD2: {
      if (static_cast<int>(witness.size()) != d) throw DimensionMismatch("genericity_ratio: |k| != d");
      double r = linear_form(beta, witness);
      for (int i = 1; i < d; ++i) {
        r *= (1.0 + static_cast<double>(std::llabs(witness[i]))) * log_weight(witness[i], 2);
      }
      return r;
    }
    case GenericityMode::kD3: {
      if (static_cast<int>(witness.size()) != 2 * d) {
        throw DimensionMismatch("genericity_ratio: D3 witness is (a_1..a_d, b_1..b_d)");
      }
      const auto a = witness.subspan(0, d);
      const auto b = witness.subspan(d, d);
      if (a[0] == 0) throw std::invalid_argument("genericity_ratio: a_1 must be nonzero");
      double r = 1.0;
      for (int i = 1; i < d; ++i) {
        if (b[i] == 0) throw std::invalid_argument("genericity_ratio: b_i must be nonzero");
        const double q = static_cast<double>(a[i] * b[0]) / static_cast<double>(a[0] * b[i]);
        r *= std::abs(beta[i] - q);
      }
      for (int i = 0; i < d; ++i) r *= d3_weight(a[i], d) * d3_weight(b[i], d);
      return r;
    }
  }
  return 0.0;
}

GenericityReport genericity_scan(std::span<const double> beta, int depth, GenericityMode mode) {
  check_beta(beta);
  if (depth < 2) throw std::invalid_argument("genericity_scan: K must be >= 2");
  const Candidate best =
      mode == GenericityMode::kD3 ? scan_d3(beta, depth) : scan_linear(beta, depth, mode);
  GenericityReport r;
  r.beta.assign(beta.begin(), beta.end());
  r.depth = depth;
  r.mode = mode;
  r.witness = best.witness;
  r.constant = genericity_ratio(beta, mode, r.witness);
  r.non_generic = r.constant == 0.0;
  return r;
}

ApproximationConstant approximation_constant(double x, std::int64_t k_max, std::int64_t k_min) {
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("approximation_constant: need 1 <= k_min <= K");
  ApproximationConstant best{std::numeric_limits<double>::infinity(), 0};
  const double f = x - std::floor(x);
  for (std::int64_t k = k_min; k <= k_max; ++k) {
    const double v = static_cast<double>(k) * scaled_distance(f, k).first;
    if (v < best.value) best = {v, k};
  }
  return best;
}

GenericSample sample_generic_beta(std::uint64_t seed, int d, double threshold, int depth,
                                  int max_draws) {
  if (d < 2 || d > 4) throw std::invalid_argument("sample_generic_beta: d must be in 2..4");
  std::mt19937_64 rng(seed);
  GenericSample out;
  for (int draw = 1; draw <= max_draws; ++draw) {
    std::vector<double> beta(d, 1.0);
    // 53 random bits -> [0, 1); independent of the standard library's distributions.
    for (int i = 1; i < d; ++i) beta[i] = 1.0 + static_cast<double>(rng() >> 11) * 0x1p-53;
    GenericityReport report = genericity_scan(beta, depth, GenericityMode::kD1);
    if (threshold <= 0.0 || report.constant >= threshold) {
      out.beta = std::move(beta);
      out.report = std::move(report);
      out.draws = draw;
      return out;
    }
  }
  throw RejectionLimitExceeded("sample_generic_beta: no draw met the threshold in " +
                               std::to_string(max_draws) + " attempts");
}

namespace {

struct AxisPhases {
  int n = 0;
  std::vector<std::vector<double>> ph;  // ph[i][k] = frac(q beta_i k^2)
};

AxisPhases axis_phases(const TorusParams& params, int n, std::int64_t q) {
  AxisPhases a;
  a.n = n;
  a.ph.resize(params.d());
  for (int i = 0; i < params.d(); ++i) {
    a.ph[i].resize(n + 1);
    for (int k = 0; k <= n; ++k) a.ph[i][k] = frac_mul(params.beta(i), q * k * k);
  }
  return a;
}

double single_axis_bound(const AxisPhases& a) {
  double m = 0.0;
  for (const auto& axis : a.ph) {
    for (double f : axis) m = std::max(m, phase_distance(f));
  }
  return m;
}

double box_maximum(const AxisPhases& a) {
  const int d = static_cast<int>(a.ph.size());
  const int side = a.n + 1;
  std::vector<int> k(d, 0);
  double m = 0.0;
  while (true) {
    double f = 0.0;
    for (int i = 0; i < d; ++i) f += a.ph[i][k[i]];
    m = std::max(m, phase_distance(wrap_unit(f)));
    int i = d - 1;
    while (i >= 0 && ++k[i] == side) k[i--] = 0;
    if (i < 0) break;
  }
  return m;
}

std::int64_t refocus_bound(int d, int n, double eta) {
  const double raw = std::pow(static_cast<double>(n), 2.0 * d - 2.0 + eta);
  const double r = std::nearbyint(raw);
  if (std::abs(raw - r) <= 1e-9 * raw) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(raw));
}

}  // namespace

double refocus_defect(const TorusParams& params, int n, std::int64_t q) {
  if (n < 0) throw std::invalid_argument("refocus_defect: N must be >= 0");
  return box_maximum(axis_phases(params, n, q));
}

RefocusResult refocus_time(const TorusParams& params, int n, double eta, double eps,
                           std::int64_t scan_cap) {
  if (n < 2) throw std::invalid_argument("refocus_time: N must be >= 2");
  if (!(eta > 0.0)) throw std::invalid_argument("refocus_time: eta must be positive");
  RefocusResult res;
  res.bound = refocus_bound(params.d(), n, eta);

  struct Best {
    double defect = std::numeric_limits<double>::infinity();
    std::int64_t q = 0;
    std::int64_t checked = 0;
  };
  auto consider = [](Best& best, std::int64_t q, double defect) {
    if (defect < best.defect || (defect == best.defect && q < best.q)) best = {defect, q, best.checked};
  };
  auto evaluate = [&](Best& best, std::int64_t q) {
    ++best.checked;
    const AxisPhases a = axis_phases(params, n, q);
    if (best.q != 0 && single_axis_bound(a) > best.defect) return;
    consider(best, q, box_maximum(a));
  };

  // Products of continued-fraction denominators.
  std::vector<std::int64_t> cands = {1};
  for (int i = 1; i < params.d(); ++i) {
    std::vector<std::int64_t> next;
    for (std::int64_t den : convergent_denominators(params.beta(i), res.bound)) {
      for (std::int64_t c : cands) {
        if (c <= res.bound / den) next.push_back(c * den);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cands = std::move(next);
  }
  Best best;
  for (std::int64_t q : cands) evaluate(best, q);

  const std::int64_t scan = std::min(res.bound, scan_cap);
  auto parts = map_chunks<Best>(static_cast<std::size_t>(scan), 1 << 14, [&](std::size_t b, std::size_t e) {
    Best local;
    for (std::size_t i = b; i < e; ++i) evaluate(local, static_cast<std::int64_t>(i) + 1);
    return local;
  });
  std::int64_t checked = best.checked;
  for (const Best& p : parts) {
    checked += p.checked;
    if (p.q != 0) consider(best, p.q, p.defect);
  }
  res.q = best.q;
  res.defect = best.defect;
  res.found = best.defect < eps;
  res.candidates_checked = checked;
  return res;
}

}  // namespace irtorus
