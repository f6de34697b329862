#include "irtorus/counting.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "irtorus/diophantine.h"
#include "irtorus/errors.h"
#include "irtorus/parallel.h"

namespace irtorus {

std::string to_string(CountKind kind) {
  switch (kind) {
    case CountKind::kLambdaA:
      return "lambda_A";
    case CountKind::kSigmaX:
      return "sigma_X";
    case CountKind::kXCount:
      return "x_count";
    case CountKind::kEij:
      return "eij";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Eisenstein integers u + v w, w^2 + w + 1 = 0, norm u^2 - uv + v^2.

namespace {

struct Eis {
  std::int64_t u = 0;
  std::int64_t v = 0;
};

Eis mul(Eis a, Eis b) {
  return {a.u * b.u - a.v * b.v, a.u * b.v + a.v * b.u - a.v * b.v};
}

Eis conj(Eis a) { return {a.u - a.v, -a.v}; }

Eis power(Eis a, int e) {
  Eis r{1, 0};
  for (int i = 0; i < e; ++i) r = mul(r, a);
  return r;
}

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

// A prime of norm p for p = 1 mod 3.
Eis split_prime(std::int64_t p) {
  for (std::int64_t v = 1; 3 * v * v <= 4 * p; ++v) {
    // u^2 - uv + v^2 = p  <=>  (2u - v)^2 = 4p - 3v^2
    const std::int64_t disc = 4 * p - 3 * v * v;
    const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(disc))));
    for (std::int64_t w = std::max<std::int64_t>(0, r - 1); w <= r + 1; ++w) {
      if (w * w == disc && (w + v) % 2 == 0) return {(w + v) / 2, v};
    }
  }
  throw std::logic_error("no Eisenstein prime above " + std::to_string(p));
}

// All (x, y) with x^2 + xy + y^2 = n.
std::vector<std::pair<std::int64_t, std::int64_t>> norm_form_solutions(std::int64_t n) {
  if (n == 0) return {{0, 0}};
  std::vector<Eis> elems{{1, 0}};
  for (const auto& [p, e] : factorize(n)) {
    std::vector<Eis> next;
    if (p == 3) {
      const Eis f = power({1, -1}, e);
      for (const Eis& z : elems) next.push_back(mul(z, f));
    } else if (p % 3 == 2) {
      if (e % 2 != 0) return {};
      Eis f{1, 0};
      for (int i = 0; i < e / 2; ++i) f = mul(f, {p, 0});
      for (const Eis& z : elems) next.push_back(mul(z, f));
    } else {
      const Eis pi = split_prime(p);
      for (int i = 0; i <= e; ++i) {
        const Eis f = mul(power(pi, i), power(conj(pi), e - i));
        for (const Eis& z : elems) next.push_back(mul(z, f));
      }
    }
    elems = std::move(next);
  }
  const Eis units[6] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {-1, -1}, {1, 1}};
  std::set<std::pair<std::int64_t, std::int64_t>> out;
  for (const Eis& z : elems) {
    for (const Eis& unit : units) {
      const Eis w = mul(z, unit);
      // x - y w = u + v w
      out.emplace(w.u, -w.v);
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace

std::int64_t eisenstein_triple_count(const EisensteinQuery& q, std::int64_t range) {
  if (range < 0) return 0;
  const std::int64_t twice = 9 * q.s - 3 * q.m * q.m;
  if (twice < 0 || twice % 2 != 0) return 0;
  std::int64_t count = 0;
  for (const auto& [a, b] : norm_form_solutions(twice / 2)) {
    // a = 3 k2 - M, b = 3 k4 - M
    if ((a + q.m) % 3 != 0 || (b + q.m) % 3 != 0) continue;
    const std::int64_t k2 = (a + q.m) / 3;
    const std::int64_t k4 = (b + q.m) / 3;
    const std::int64_t k6 = q.m - k2 - k4;
    if (std::llabs(k2) <= range && std::llabs(k4) <= range && std::llabs(k6) <= range) ++count;
  }
  return count;
}

std::int64_t eisenstein_fiber_max(std::int64_t range) {
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> hist;
  for (std::int64_t a = -range; a <= range; ++a) {
    for (std::int64_t b = -range; b <= range; ++b) {
      for (std::int64_t c = -range; c <= range; ++c) ++hist[{a + b + c, a * a + b * b + c * c}];
    }
  }
  std::int64_t best = 0;
  for (const auto& [key, count] : hist) best = std::max(best, count);
  return best;
}

// ---------------------------------------------------------------------------

double alternating_form(std::span<const double> beta, std::span<const std::int64_t> d) {
  if (beta.size() != d.size()) throw DimensionMismatch("alternating_form: dimension mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const double x = static_cast<double>(d[i]);
    const double hi = beta[i] * x;
    s.add(hi);
    s.add(std::fma(beta[i], x, -hi));
  }
  return std::abs(s.value());
}

double lambda_lowest_bucket(int d, int n) {
  if (n < 1 || d < 1) throw std::invalid_argument("lambda_lowest_bucket: need N, d >= 1");
  const double x = 1.0 / std::pow(static_cast<double>(n), 2 * d - 2);
  int e = 0;
  std::frexp(x, &e);
  return std::ldexp(1.0, e);
}

std::vector<double> normalized_constant_coeffs(int d, int n) {
  const double side = 2.0 * n + 1.0;
  const auto size = static_cast<std::size_t>(std::pow(side, d));
  return std::vector<double>(size, std::pow(side, -0.5 * d));
}

namespace {

constexpr double kBand = 1e-9;

bool power_of_two(double a) {
  int e = 0;
  return a > 0.0 && std::frexp(a, &e) == 0.5;
}

struct PairTotals {
  std::vector<std::int64_t> counts;  // pairs with |form| < threshold
  std::vector<double> weights;
};

// One group of triples sharing the per-coordinate square sums X.
using SquareSums = std::array<std::int64_t, 4>;

struct Group {
  double g = 0.0;
  SquareSums x{};
  std::int64_t count = 0;
  double weight = 0.0;
};

// For every threshold c, the number (and weight) of pairs of triples
// (k1,k3,k5), (k2,k4,k6) with equal vector sums and |form(X - X')| < c.
PairTotals lambda_pair_totals(const TorusParams& params, int n, std::span<const double> coeffs,
                              std::span<const double> thresholds, std::size_t max_bytes) {
  const int d = params.d();
  if (d > 4) throw DimensionMismatch("lambda_a_count: d <= 4 required");
  const int side = 2 * n + 1;
  std::size_t box = 1;
  for (int i = 0; i < d; ++i) box *= static_cast<std::size_t>(side);
  if (!coeffs.empty() && coeffs.size() != box) {
    throw DimensionMismatch("lambda_a_count: coefficient box size mismatch");
  }
  const double per_sum = static_cast<double>(box) * static_cast<double>(box) *
                         (sizeof(Group) + sizeof(std::int64_t) * d + 16.0);
  if (per_sum * worker_count() > static_cast<double>(max_bytes)) {
    throw MemoryLimitExceeded("lambda_a_count: per-sum table exceeds the memory budget");
  }
  for (double c : thresholds) {
    if (!(c > 4 * kBand)) throw std::invalid_argument("lambda_a_count: threshold too small");
  }

  const int sigma_side = 6 * n + 1;
  std::size_t sigma_total = 1;
  for (int i = 0; i < d; ++i) sigma_total *= static_cast<std::size_t>(sigma_side);
  const std::span<const double> beta = params.beta();
  const std::size_t nt = thresholds.size();

  struct Partial {
    std::vector<std::int64_t> counts;
    std::vector<CompensatedSum> weights;
  };

  auto partials = map_chunks<Partial>(sigma_total, 8, [&](std::size_t b, std::size_t e) {
    Partial part{std::vector<std::int64_t>(nt, 0), std::vector<CompensatedSum>(nt)};
    std::vector<int> sigma(d), k1(d), k3(d), lo3(d), hi3(d);
    std::vector<std::pair<SquareSums, double>> raw;
    for (std::size_t idx = b; idx < e; ++idx) {
      std::size_t rest = idx;
      for (int i = d - 1; i >= 0; --i) {
        sigma[i] = static_cast<int>(rest % sigma_side) - 3 * n;
        rest /= sigma_side;
      }
      raw.clear();
      // k1 over the box; k3 over the range that keeps k5 in the box.
      std::fill(k1.begin(), k1.end(), -n);
      bool k1_done = false;
      while (!k1_done) {
        bool empty = false;
        for (int i = 0; i < d; ++i) {
          lo3[i] = std::max(-n, sigma[i] - k1[i] - n);
          hi3[i] = std::min(n, sigma[i] - k1[i] + n);
          if (lo3[i] > hi3[i]) empty = true;
        }
        if (!empty) {
          for (int i = 0; i < d; ++i) k3[i] = lo3[i];
          bool k3_done = false;
          while (!k3_done) {
            SquareSums x{};
            std::size_t i1 = 0, i3 = 0, i5 = 0;
            for (int i = 0; i < d; ++i) {
              const std::int64_t a = k1[i], c = k3[i], f = sigma[i] - k1[i] - k3[i];
              x[i] = a * a + c * c + f * f;
              i1 = i1 * side + static_cast<std::size_t>(a + n);
              i3 = i3 * side + static_cast<std::size_t>(c + n);
              i5 = i5 * side + static_cast<std::size_t>(f + n);
            }
            const double w = coeffs.empty() ? 0.0 : coeffs[i1] * coeffs[i3] * coeffs[i5];
            raw.emplace_back(x, w);
            int ax = d - 1;
            while (ax >= 0 && k3[ax] == hi3[ax]) {
              k3[ax] = lo3[ax];
              --ax;
            }
            if (ax < 0) {
              k3_done = true;
            } else {
              ++k3[ax];
            }
          }
        }
        int ax = d - 1;
        while (ax >= 0 && k1[ax] == n) {
          k1[ax] = -n;
          --ax;
        }
        if (ax < 0) {
          k1_done = true;
        } else {
          ++k1[ax];
        }
      }
      if (raw.empty()) continue;

      std::sort(raw.begin(), raw.end(),
                [](const auto& l, const auto& r) { return l.first < r.first; });
      std::vector<Group> groups;
      for (std::size_t r = 0; r < raw.size();) {
        Group grp;
        grp.x = raw[r].first;
        CompensatedSum w;
        std::size_t s = r;
        while (s < raw.size() && raw[s].first == grp.x) {
          w.add(raw[s].second);
          ++s;
        }
        grp.count = static_cast<std::int64_t>(s - r);
        grp.weight = w.value();
        CompensatedSum g;
        for (int i = 0; i < d; ++i) g.add(beta[i] * static_cast<double>(grp.x[i]));
        grp.g = g.value();
        groups.push_back(std::move(grp));
        r = s;
      }
      std::sort(groups.begin(), groups.end(), [](const Group& l, const Group& r) {
        return l.g < r.g || (l.g == r.g && l.x < r.x);
      });
      const std::size_t m = groups.size();
      std::vector<double> gs(m);
      std::vector<std::int64_t> pc(m + 1, 0);
      std::vector<double> pw(m + 1, 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        gs[r] = groups[r].g;
        pc[r + 1] = pc[r] + groups[r].count;
        pw[r + 1] = pw[r] + groups[r].weight;
      }
      std::vector<std::int64_t> diff(d);
      auto exact_below = [&](const Group& u, const Group& v, double c) {
        for (int i = 0; i < d; ++i) diff[i] = u.x[i] - v.x[i];
        return alternating_form(beta, diff) < c;
      };
      auto index_of = [&](double value) {
        return static_cast<std::size_t>(std::lower_bound(gs.begin(), gs.end(), value) - gs.begin());
      };
      for (std::size_t t = 0; t < nt; ++t) {
        const double c = thresholds[t];
        std::int64_t count = 0;
        CompensatedSum weight;
        for (std::size_t r = 0; r < m; ++r) {
          const Group& u = groups[r];
          // certainly inside: g_v in [g_u - c + band, g_u + c - band)
          const std::size_t in_lo = index_of(u.g - c + kBand);
          const std::size_t in_hi = index_of(u.g + c - kBand);
          std::int64_t cnt = pc[in_hi] - pc[in_lo];
          double wt = pw[in_hi] - pw[in_lo];
          const std::size_t band_lo = index_of(u.g - c - kBand);
          const std::size_t band_hi = index_of(u.g + c + kBand);
          for (std::size_t s = band_lo; s < in_lo; ++s) {
            if (exact_below(u, groups[s], c)) {
              cnt += groups[s].count;
              wt += groups[s].weight;
            }
          }
          for (std::size_t s = in_hi; s < band_hi; ++s) {
            if (exact_below(u, groups[s], c)) {
              cnt += groups[s].count;
              wt += groups[s].weight;
            }
          }
          count += u.count * cnt;
          weight.add(u.weight * wt);
        }
        part.counts[t] += count;
        part.weights[t].add(weight.value());
      }
    }
    return part;
  });

  PairTotals out{std::vector<std::int64_t>(nt, 0), std::vector<double>(nt, 0.0)};
  for (std::size_t t = 0; t < nt; ++t) {
    CompensatedSum w;
    for (const Partial& p : partials) {
      out.counts[t] += p.counts[t];
      w.add(p.weights[t].value());
    }
    out.weights[t] = w.value();
  }
  return out;
}

CountRecord lambda_record(const TorusParams& params, int n, double a, bool lowest,
                          std::int64_t count, double weighted, bool has_coeffs) {
  CountRecord rec;
  rec.kind = CountKind::kLambdaA;
  rec.d = params.d();
  rec.n = n;
  rec.a = a;
  rec.lowest = lowest;
  rec.count = count;
  rec.weighted = has_coeffs ? weighted : 0.0;
  const double nd = static_cast<double>(n);
  rec.bound = std::pow(nd, 2 * rec.d - 2) * a;
  if (!has_coeffs) rec.bound *= std::pow(nd, 3 * rec.d);
  rec.ratio = (has_coeffs ? weighted : static_cast<double>(count)) / rec.bound;
  return rec;
}

}  // namespace

CountRecord lambda_a_count(const TorusParams& params, int n, double a,
                           std::span<const double> coeffs, std::size_t max_bytes) {
  if (n < 1) throw std::invalid_argument("lambda_a_count: N must be >= 1");
  const double lowest = lambda_lowest_bucket(params.d(), n);
  if (!power_of_two(a) || a < lowest || a > 100.0 * n * n) {
    throw std::invalid_argument("lambda_a_count: A must be dyadic in [N^{2-2d}, 100 N^2]");
  }
  const bool is_lowest = a == lowest;
  std::vector<double> thresholds;
  if (!is_lowest) thresholds.push_back(a);
  thresholds.push_back(2 * a);
  const PairTotals totals = lambda_pair_totals(params, n, coeffs, thresholds, max_bytes);
  std::int64_t count = totals.counts.back();
  double weighted = totals.weights.back();
  if (!is_lowest) {
    count -= totals.counts.front();
    weighted -= totals.weights.front();
  }
  return lambda_record(params, n, a, is_lowest, count, weighted, !coeffs.empty());
}

std::vector<CountRecord> lambda_a_histogram(const TorusParams& params, int n,
                                            std::span<const double> coeffs) {
  if (n < 1) throw std::invalid_argument("lambda_a_histogram: N must be >= 1");
  const double lowest = lambda_lowest_bucket(params.d(), n);
  double beta_sum = 0.0;
  for (double b : params.beta()) beta_sum += b;
  const double top = 3.0 * n * n * beta_sum;
  std::vector<double> thresholds;
  for (double c = 2 * lowest;; c *= 2) {
    thresholds.push_back(c);
    if (c > top) break;
  }
  const PairTotals totals =
      lambda_pair_totals(params, n, coeffs, thresholds, std::size_t{1} << 30);
  std::vector<CountRecord> out;
  for (std::size_t m = 0; m < thresholds.size(); ++m) {
    const double a = thresholds[m] / 2;
    std::int64_t count = totals.counts[m];
    double weighted = totals.weights[m];
    if (m > 0) {
      count -= totals.counts[m - 1];
      weighted -= totals.weights[m - 1];
    }
    out.push_back(lambda_record(params, n, a, m == 0, count, weighted, !coeffs.empty()));
  }
  return out;
}

// ---------------------------------------------------------------------------

CountRecord sigma_x_count(int n, std::span<const std::int64_t> x) {
  if (n < 0) throw std::invalid_argument("sigma_x_count: N must be >= 0");
  const int d = static_cast<int>(x.size());
  if (d < 1) throw DimensionMismatch("sigma_x_count: empty X");
  // Coordinates decouple: each contributes #{6 integers in [-N, N] with zero
  // alternating sum and alternating square sum X_i}.
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> hist;
  for (std::int64_t a = -n; a <= n; ++a) {
    for (std::int64_t b = -n; b <= n; ++b) {
      for (std::int64_t c = -n; c <= n; ++c) ++hist[{a + b + c, a * a + b * b + c * c}];
    }
  }
  CountRecord rec;
  rec.kind = CountKind::kSigmaX;
  rec.d = d;
  rec.n = n;
  rec.x.assign(x.begin(), x.end());
  rec.count = 1;
  for (int i = 0; i < d; ++i) {
    std::int64_t per = 0;
    for (const auto& [key, cnt] : hist) {
      const auto it = hist.find({key.first, key.second - x[i]});
      if (it != hist.end()) per += cnt * it->second;
    }
    rec.count *= per;
  }
  rec.bound = std::pow(2.0 * n + 1.0, 3 * d);
  rec.ratio = static_cast<double>(rec.count) / rec.bound;
  return rec;
}

double x_count_trivial_bound(int d, std::int64_t k, double a) {
  return std::pow(2.0 * static_cast<double>(k) - 1.0, d - 1) * (2.0 * a + 1.0);
}

CountRecord x_count(const TorusParams& params, std::int64_t k, double a) {
  if (k < 1) throw std::invalid_argument("x_count: K must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("x_count: A must be positive");
  const int d = params.d();
  const std::span<const double> beta = params.beta();
  const std::int64_t side = 2 * k - 1;
  std::size_t outer = 1;
  for (int i = 1; i < d; ++i) outer *= static_cast<std::size_t>(side);

  const auto partials = map_chunks<std::int64_t>(outer, 4096, [&](std::size_t b, std::size_t e) {
    std::int64_t count = 0;
    std::vector<std::int64_t> x(d);
    for (std::size_t idx = b; idx < e; ++idx) {
      std::size_t rest = idx;
      CompensatedSum s;
      for (int i = d - 1; i >= 1; --i) {
        x[i] = static_cast<std::int64_t>(rest % side) - (k - 1);
        rest /= side;
        const double xd = static_cast<double>(x[i]);
        const double hi = beta[i] * xd;
        s.add(hi);
        s.add(std::fma(beta[i], xd, -hi));
      }
      const double shift = s.value();
      // X_1 in (-shift - A, -shift + A); interior integers are certain, the
      // few near either end are decided by the exact form.
      const double lo = std::max(-shift - a, static_cast<double>(-k));
      const double hi = std::min(-shift + a, static_cast<double>(k));
      const auto sure_lo = static_cast<std::int64_t>(std::ceil(lo + kBand));
      const auto sure_hi = static_cast<std::int64_t>(std::floor(hi - kBand));
      const auto first = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(lo - kBand)), -(k - 1));
      const auto last = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(hi + kBand)), k - 1);
      auto check = [&](std::int64_t x1) {
        x[0] = x1;
        return alternating_form(beta, x) < a;
      };
      if (sure_lo > sure_hi) {
        for (std::int64_t x1 = first; x1 <= last; ++x1) count += check(x1) ? 1 : 0;
        continue;
      }
      count += std::max<std::int64_t>(0, std::min(sure_hi, last) - std::max(sure_lo, first) + 1);
      for (std::int64_t x1 = first; x1 <= std::min(last, sure_lo - 1); ++x1) count += check(x1) ? 1 : 0;
      for (std::int64_t x1 = std::max(first, sure_hi + 1); x1 <= last; ++x1) count += check(x1) ? 1 : 0;
    }
    return count;
  });

  CountRecord rec;
  rec.kind = CountKind::kXCount;
  rec.d = d;
  rec.k = k;
  rec.a = a;
  rec.count = std::accumulate(partials.begin(), partials.end(), std::int64_t{0});
  rec.bound = std::pow(static_cast<double>(k), d - 1) * a;
  rec.ratio = static_cast<double>(rec.count) / rec.bound;
  return rec;
}

// ---------------------------------------------------------------------------

namespace {

int floor_log2(std::int64_t v) {
  int r = 0;
  while (v > 1) {
    v >>= 1;
    ++r;
  }
  return r;
}

// j with ||.|| in (2^{-j-1}, 2^{-j}].
int shell_j(double dist) {
  int e = 0;
  const double f = std::frexp(dist, &e);
  return f == 0.5 ? 1 - e : -e;
}

std::uint64_t pack_cell(std::span<const int> is, int j) {
  std::uint64_t key = static_cast<std::uint64_t>(j);
  for (int i : is) key = (key << 8) | static_cast<std::uint64_t>(i);
  return key;
}

}  // namespace

BadnessResult badness_sum(std::span<const double> beta, std::int64_t k) {
  const int d = static_cast<int>(beta.size());
  if (d < 2) throw DimensionMismatch("badness_sum: need d >= 2");
  if (k < 1) throw std::invalid_argument("badness_sum: K must be >= 1");
  const int m = d - 1;  // free coordinates k_2..k_d
  const std::int64_t side = 2 * k + 1;
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(side);

  struct Partial {
    CompensatedSum value;
    std::int64_t terms = 0;
    std::map<std::uint64_t, std::int64_t> cells;
  };
  auto partials = map_chunks<Partial>(total, 1 << 14, [&](std::size_t b, std::size_t e) {
    Partial part;
    std::vector<std::int64_t> kk(m);
    std::vector<int> is(m);
    for (std::size_t idx = b; idx < e; ++idx) {
      std::size_t rest = idx;
      std::int64_t l1 = 0;
      for (int i = m - 1; i >= 0; --i) {
        kk[i] = static_cast<std::int64_t>(rest % side) - k;
        rest /= side;
        l1 += std::llabs(kk[i]);
      }
      if (l1 == 0 || l1 > k) continue;
      CompensatedSum s;
      double scale = 0.0;
      double denom = 1.0;
      for (int i = 0; i < m; ++i) {
        const double kd = static_cast<double>(kk[i]);
        const double hi = beta[i + 1] * kd;
        s.add(hi);
        s.add(std::fma(beta[i + 1], kd, -hi));
        scale += std::abs(hi);
        const std::int64_t mag = std::max<std::int64_t>(1, std::llabs(kk[i]));
        denom *= static_cast<double>(mag);
        is[i] = floor_log2(mag);
      }
      s.add(-std::nearbyint(s.value()));
      const double dist = std::abs(s.value());
      if (dist <= 8 * std::numeric_limits<double>::epsilon() * (1.0 + scale)) {
        std::string where;
        for (int i = 0; i < m; ++i) where += (i ? "," : "") + std::to_string(kk[i]);
        throw DivergentTerm("badness_sum: ||beta.k|| = 0 at k = (" + where + ")");
      }
      part.value.add(1.0 / (denom * dist));
      ++part.terms;
      ++part.cells[pack_cell(is, shell_j(dist))];
    }
    return part;
  });

  BadnessResult out;
  CompensatedSum value;
  std::map<std::uint64_t, std::int64_t> cells;
  for (const Partial& p : partials) {
    value.add(p.value.value());
    out.terms += p.terms;
    for (const auto& [key, c] : p.cells) cells[key] += c;
  }
  out.value = value.value();
  for (const auto& [key, c] : cells) {
    std::uint64_t rest = key;
    std::vector<int> is(m);
    int isum = 0;
    for (int i = m - 1; i >= 0; --i) {
      is[i] = static_cast<int>(rest & 0xff);
      rest >>= 8;
      isum += is[i];
    }
    const int j = static_cast<int>(rest);
    std::string name;
    for (int i = 0; i < m; ++i) name += (i ? "," : "") + std::to_string(is[i]);
    name += "|" + std::to_string(j);
    out.census[name] = c;
    const double normalized = static_cast<double>(c) * std::ldexp(1.0, j - isum);
    if (normalized > out.census_max) {
      out.census_max = normalized;
      out.census_argmax = name;
    }
  }
  return out;
}

}  // namespace irtorus
