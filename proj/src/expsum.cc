#include "irtorus/expsum.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "irtorus/diophantine.h"
#include "irtorus/errors.h"
#include "irtorus/fft.h"
#include "irtorus/parallel.h"
#include "irtorus/phase.h"

namespace irtorus {

namespace {

constexpr int kOversample = 8;

int kmax_of(int n) { return 2 * n - 1; }

void check_n(int n) {
  if (n < 1) throw std::invalid_argument("Weyl sums need N >= 1");
}

// sum_k c_k e(yk) for coefficients on k = -K..K.
Complex evaluate_poly(std::span<const Complex> c, double y) {
  const int kmax = static_cast<int>(c.size() / 2);
  Complex s{};
  for (int k = -kmax; k <= kmax; ++k) {
    const Complex v = c[k + kmax];
    if (v == Complex{}) continue;
    s += v * unit_phase(frac_mul(y, k));
  }
  return s;
}

// Coefficients chi(k/N) e(phase(k)) for k = -K..K.
template <class Phase>
std::vector<Complex> weyl_coefficients(int n, Phase&& phase) {
  const int kmax = kmax_of(n);
  std::vector<Complex> c(2 * kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    const double w = chi(static_cast<double>(k) / n);
    const Complex v = w * unit_phase(phase(k));
    c[kmax + k] = v;
    c[kmax - k] = v;
  }
  return c;
}

int sup_grid_size(int n) { return fft_size_at_least(kOversample * (4 * n - 1)); }

// |sum c_k e(j k / M)| for j = 0..M-1.
std::vector<double> grid_moduli(std::span<const Complex> c, int m) {
  const int kmax = static_cast<int>(c.size() / 2);
  std::vector<Complex> grid(m);
  for (int k = -kmax; k <= kmax; ++k) grid[((k % m) + m) % m] += c[k + kmax];
  fft_inplace_1d(grid, +1);
  std::vector<double> out(m);
  for (int j = 0; j < m; ++j) out[j] = std::abs(grid[j]);
  return out;
}

SupPoint refine_sup(std::span<const Complex> c, int m) {
  const std::vector<double> g = grid_moduli(c, m);
  // Best few local maxima of the grid.
  std::vector<int> peaks;
  for (int j = 0; j < m; ++j) {
    const double l = g[(j + m - 1) % m];
    const double r = g[(j + 1) % m];
    if (g[j] >= l && g[j] >= r) peaks.push_back(j);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return g[a] > g[b] || (g[a] == g[b] && a < b); });
  if (peaks.size() > 3) peaks.resize(3);
  SupPoint best{0.0, 0.0};
  const double h = 1.0 / m;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int j : peaks) {
    double lo = (j - 1) * h;
    double hi = (j + 1) * h;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = std::abs(evaluate_poly(c, x1));
    double f2 = std::abs(evaluate_poly(c, x2));
    for (int it = 0; it < 48; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = std::abs(evaluate_poly(c, x2));
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = std::abs(evaluate_poly(c, x1));
      }
    }
    SupPoint cand{g[j], j * h};
    if (f1 > cand.value) cand = {f1, x1};
    if (f2 > cand.value) cand = {f2, x2};
    cand.y = wrap_unit(cand.y);
    if (cand.value > best.value) best = cand;
  }
  return best;
}

}  // namespace

Complex weyl_sum(const WeylSumQuery& q) { return weyl_sum(q.y, q.t, q.n); }

Complex weyl_sum(double y, double t, int n) {
  check_n(n);
  // S = 1 + 2 sum_{k>=1} chi(k/N) cos(2 pi y k) e(k^2 t).
  Complex s{1.0, 0.0};
  for (int k = 1; k <= kmax_of(n); ++k) {
    const double w = chi(static_cast<double>(k) / n);
    const double c = std::cos(2.0 * std::numbers::pi * frac_mul(y, k));
    s += 2.0 * w * c * unit_phase(frac_mul(t, static_cast<std::int64_t>(k) * k));
  }
  return s;
}

Complex weyl_sum_scaled(double y, double beta, double t, int n) {
  check_n(n);
  Complex s{1.0, 0.0};
  for (int k = 1; k <= kmax_of(n); ++k) {
    const double w = chi(static_cast<double>(k) / n);
    const double c = std::cos(2.0 * std::numbers::pi * frac_mul(y, k));
    s += 2.0 * w * c * unit_phase(frac_triple(t, beta, static_cast<std::int64_t>(k) * k));
  }
  return s;
}

SupPoint weyl_sup(double beta, double t, int n) {
  check_n(n);
  const auto c = weyl_coefficients(n, [&](int k) {
    return frac_triple(t, beta, static_cast<std::int64_t>(k) * k);
  });
  return refine_sup(c, sup_grid_size(n));
}

Complex kernel_value(const TorusParams& params, double t, std::span<const double> x, int n) {
  if (static_cast<int>(x.size()) != params.d()) throw DimensionMismatch("kernel_value: |x| != d");
  Complex v{1.0, 0.0};
  for (int i = 0; i < params.d(); ++i) v *= weyl_sum_scaled(x[i], params.beta(i), -t, n);
  return v;
}

Complex kernel_value_direct(const TorusParams& params, double t, std::span<const double> x, int n) {
  if (static_cast<int>(x.size()) != params.d()) throw DimensionMismatch("kernel_value_direct: |x| != d");
  check_n(n);
  const int d = params.d();
  const int kmax = kmax_of(n);
  std::vector<int> k(d, -kmax);
  CompensatedSum re;
  CompensatedSum im;
  while (true) {
    double w = 1.0;
    double f = 0.0;
    for (int i = 0; i < d; ++i) {
      w *= chi(static_cast<double>(k[i]) / n);
      f += frac_mul(x[i], k[i]);
      f -= frac_triple(t, params.beta(i), static_cast<std::int64_t>(k[i]) * k[i]);
    }
    const Complex z = w * unit_phase(wrap_unit(f));
    re.add(z.real());
    im.add(z.imag());
    int i = d - 1;
    while (i >= 0 && ++k[i] > kmax) k[i--] = -kmax;
    if (i < 0) break;
  }
  return {re.value(), im.value()};
}

double kernel_sup(const TorusParams& params, double t, int n) {
  double v = 1.0;
  for (int i = 0; i < params.d(); ++i) v *= weyl_sup(params.beta(i), -t, n).value;
  return v;
}

WeylSupTable::WeylSupTable(int n, std::int64_t samples) : n_(n) {
  check_n(n);
  if (samples < 2) throw std::invalid_argument("WeylSupTable: need at least 2 samples");
  values_.assign(static_cast<std::size_t>(samples), 0.0);
  const int m = sup_grid_size(n);
  const auto half = static_cast<std::size_t>(samples / 2 + 1);
  parallel_chunks(half, 64, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      const auto c = weyl_coefficients(n, [&](int k) {
        const auto num = (static_cast<std::int64_t>(j) * k * k) % samples;
        return static_cast<double>(num) / static_cast<double>(samples);
      });
      const auto g = grid_moduli(c, m);
      values_[j] = *std::max_element(g.begin(), g.end());
    }
  });
  for (std::size_t j = half; j < values_.size(); ++j) values_[j] = values_[values_.size() - j];
}

double WeylSupTable::at_phase(double s) const {
  const auto size = static_cast<std::int64_t>(values_.size());
  const double x = wrap_unit(s) * static_cast<double>(size);
  const auto i = std::min(static_cast<std::int64_t>(x), size - 1);
  const double f = x - static_cast<double>(i);
  return (1.0 - f) * values_[i] + f * values_[(i + 1) % size];
}

double WeylSupTable::kernel_sup_at(const TorusParams& params, std::int64_t j) const {
  double v = 1.0;
  for (int i = 0; i < params.d(); ++i) v *= at_phase(frac_ratio(params.beta(i), j, samples()));
  return v;
}

std::string to_string(RatioMode mode) {
  switch (mode) {
    case RatioMode::kDispersive:
      return "dispersive";
    case RatioMode::kWeyl:
      return "weyl";
    case RatioMode::kKernelSup:
      return "kernel_sup";
  }
  return "?";
}

RatioScan bound_ratio_scan(const TorusParams& params, int n, RatioMode mode,
                           std::span<const double> t_grid, std::span<const double> y_grid) {
  check_n(n);
  const double nd = n;
  if (mode == RatioMode::kDispersive) {
    for (double t : t_grid) {
      if (!(t > 0.0 && t <= 1.0 / nd)) throw std::invalid_argument("dispersive scan needs t in (0, 1/N]");
    }
  }
  const bool sup = y_grid.empty() || mode == RatioMode::kKernelSup;
  const std::size_t per_t = sup ? 1 : y_grid.size();
  auto rows = map_chunks<std::vector<RatioRow>>(t_grid.size(), 1, [&](std::size_t b, std::size_t e) {
    std::vector<RatioRow> out;
    for (std::size_t it = b; it < e; ++it) {
      const double t = t_grid[it];
      double bound = 0.0;
      switch (mode) {
        case RatioMode::kDispersive:
          bound = std::min(nd, 1.0 / std::sqrt(t));
          break;
        case RatioMode::kWeyl: {
          const auto r = dirichlet_approx(t, n);
          bound = nd / (std::sqrt(static_cast<double>(r.q)) * (1.0 + nd * std::sqrt(r.delta)));
          break;
        }
        case RatioMode::kKernelSup:
          bound = std::pow(nd, (params.d() + 1) / 2.0) * std::pow(t, 0.25);
          break;
      }
      for (std::size_t iy = 0; iy < per_t; ++iy) {
        RatioRow row;
        row.mode = mode;
        row.n = n;
        row.t = t;
        row.bound = bound;
        if (mode == RatioMode::kKernelSup) {
          const auto s = weyl_sup(params.beta(0), -t, n);
          row.y = s.y;
          row.value = kernel_sup(params, t, n);
        } else if (sup) {
          const auto s = weyl_sup(1.0, t, n);
          row.y = s.y;
          row.value = s.value;
        } else {
          row.y = y_grid[iy];
          row.value = std::abs(weyl_sum(row.y, t, n));
        }
        row.ratio = row.value / bound;
        out.push_back(row);
      }
    }
    return out;
  });
  RatioScan scan;
  for (auto& part : rows) {
    for (auto& r : part) scan.rows.push_back(r);
  }
  for (std::size_t i = 0; i < scan.rows.size(); ++i) {
    if (scan.rows[i].ratio > scan.max_ratio) {
      scan.max_ratio = scan.rows[i].ratio;
      scan.argmax = i;
    }
  }
  return scan;
}

ArcSystem::ArcSystem(int n, double c0) : n_(n), c0_(c0) {
  if (n < 1) throw std::invalid_argument("ArcSystem: N must be >= 1");
  if (!(c0 > 0.0)) throw std::invalid_argument("ArcSystem: c0 must be positive");
  for (int q = 1; q < c0 * n; q *= 2) levels_.push_back(q);
  // Arcs around a/q, a'/q' with q, q' < 2 Q_max are 1/(q q') > 1/(4 Q_max^2)
  // apart and have radii below 2/(N Q); they are disjoint iff 16 Q_max <= N.
  if (!levels_.empty() && 16 * levels_.back() > n) {
    throw std::invalid_argument("ArcSystem: c0 too large, major arcs would overlap");
  }
}

double ArcSystem::lambda(int level_q, double t) const {
  double s = 0.0;
  const double scale = static_cast<double>(n_) * level_q;
  for (int q = level_q; q < 2 * level_q; ++q) {
    const double qd = q;
    const double a = std::nearbyint(t * qd);
    if (a < 1.0) continue;
    if (std::gcd(static_cast<std::int64_t>(a), static_cast<std::int64_t>(q)) != 1) continue;
    const double dist = std::fma(t, qd, -a) / qd;  // t - a/q
    s += chi(scale * dist);
  }
  return s;
}

double ArcSystem::rho(double t) const {
  double s = 0.0;
  for (int q : levels_) s += lambda(q, t);
  return 1.0 - s;
}

double ArcSystem::arc_weight(const TorusParams& params, std::span<const int> qs, double t) const {
  const int d = params.d();
  const int k = static_cast<int>(qs.size());
  if (k > d) throw std::invalid_argument("arc_weight: more levels than dimensions");
  std::vector<double> r(d);
  std::vector<double> lam(static_cast<std::size_t>(d * std::max(k, 1)));
  for (int i = 0; i < d; ++i) {
    const double s = params.beta(i) * t;
    r[i] = rho(s);
    for (int m = 0; m < k; ++m) lam[i * k + m] = lambda(qs[m], s);
  }
  // Increasing k-subsets of the axes.
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  double total = 0.0;
  while (true) {
    double v = 1.0;
    int m = 0;
    for (int i = 0; i < d; ++i) {
      if (m < k && idx[m] == i) {
        v *= lam[i * k + m];
        ++m;
      } else {
        v *= r[i];
      }
    }
    total += v;
    int j = k - 1;
    while (j >= 0 && idx[j] == d - k + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int l = j + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
  }
  return total;
}

double arc_density(const ArcSystem& arcs, const TorusParams& params, std::span<const int> qs,
                   double horizon) {
  if (!(horizon >= 1.0)) throw std::invalid_argument("arc_density: T must be >= 1");
  if (qs.empty() || static_cast<int>(qs.size()) > params.d()) {
    throw std::invalid_argument("arc_density: need 1 <= k <= d levels");
  }
  int qmax = 0;
  for (int q : qs) {
    if (q < 1 || (q & (q - 1)) != 0) throw std::invalid_argument("arc_density: levels must be dyadic");
    if (q >= arcs.c0() * arcs.n()) throw std::invalid_argument("arc_density: level Q >= c0 N");
    qmax = std::max(qmax, q);
  }
  const auto steps = static_cast<std::int64_t>(std::ceil(horizon * 4.0 * arcs.n() * qmax));
  const double h = horizon / static_cast<double>(steps);
  const auto parts = map_chunks<double>(static_cast<std::size_t>(steps + 1), 4096,
                                        [&](std::size_t b, std::size_t e) {
                                          CompensatedSum s;
                                          for (std::size_t j = b; j < e; ++j) {
                                            const double t = static_cast<double>(j) * h;
                                            double v = (j == 0 || j == static_cast<std::size_t>(steps)) ? 0.5 : 1.0;
                                            for (std::size_t m = 0; m < qs.size() && v != 0.0; ++m) {
                                              v *= arcs.lambda(qs[m], params.beta(static_cast<int>(m)) * t);
                                            }
                                            s.add(v);
                                          }
                                          return s.value();
                                        });
  CompensatedSum total;
  for (double p : parts) total.add(p);
  return total.value() * h / horizon;
}

KernelPieces::KernelPieces(TorusParams params, int n, double horizon, double a)
    : params_(std::move(params)), n_(n), horizon_(horizon), a_(a) {
  check_n(n);
  if (!(horizon > 0.0)) throw std::invalid_argument("KernelPieces: T must be positive");
  if (!(a > 0.0 && 2.0 * a * n <= 1.0)) {
    throw std::invalid_argument("KernelPieces: A must lie in (0, 1/(2N)] for J1 + J2 + J3 = phi K_N");
  }
}

double KernelPieces::w1(double t) const { return phi_window(t / horizon_) * chi(t / a_); }

double KernelPieces::w2(double t) const {
  return phi_window(t / horizon_) * chi(n_ * t) * (1.0 - chi(t / a_));
}

double KernelPieces::w3(double t) const { return phi_window(t / horizon_) * (1.0 - chi(n_ * t)); }

Complex KernelPieces::j1(double t, std::span<const double> x) const {
  return w1(t) * kernel_value(params_, t, x, n_);
}
Complex KernelPieces::j2(double t, std::span<const double> x) const {
  return w2(t) * kernel_value(params_, t, x, n_);
}
Complex KernelPieces::j3(double t, std::span<const double> x) const {
  return w3(t) * kernel_value(params_, t, x, n_);
}
Complex KernelPieces::j3_arc(const ArcSystem& arcs, std::span<const int> qs, double t,
                             std::span<const double> x) const {
  return arcs.arc_weight(params_, qs, t) * j3(t, x);
}

namespace {

// sup_j |sum_i h w_i e(-t_i sigma_j)| over sigma_j = j * step, |j| <= points.
double fourier_sup(std::span<const double> ts, std::span<const double> ws, double h, double step,
                   int points) {
  double best = 0.0;
  for (int j = -points; j <= points; ++j) {
    const double sigma = j * step;
    CompensatedSum re;
    CompensatedSum im;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double a = -2.0 * std::numbers::pi * wrap_unit(ts[i] * sigma);
      re.add(ws[i] * std::cos(a));
      im.add(ws[i] * std::sin(a));
    }
    best = std::max(best, h * std::hypot(re.value(), im.value()));
  }
  return best;
}

void qs_tuples(int k, std::span<const int> levels, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int q : levels) {
    cur.push_back(q);
    qs_tuples(k, levels, cur, out);
    cur.pop_back();
  }
}

}  // namespace

KernelMeasurements KernelPieces::measure(const KernelOptions& options) const {
  KernelMeasurements m;
  const int d = params_.d();
  const double nd = n_;

  // F[J1](k, sigma) = prod chi(k_i/N) * w1^(sigma + Q(k)); w1 lives on |t| < 2A.
  {
    const int panels = 4096;
    const double h = 4.0 * a_ / panels;
    std::vector<double> ts(panels + 1);
    std::vector<double> ws(panels + 1);
    for (int i = 0; i <= panels; ++i) {
      ts[i] = -2.0 * a_ + i * h;
      ws[i] = w1(ts[i]);
    }
    m.sigma_step_j1 = 1.0 / (16.0 * a_);
    m.fourier_j1_sup = fourier_sup(ts, ws, h, m.sigma_step_j1, options.sigma_points);
  }

  // J2 on A <= |t| <= 2/N; |K_N(-t, .)| has the same supremum as |K_N(t, .)|.
  {
    const int samples = 512;
    const double lo = std::log(a_);
    const double hi = std::log(2.0 / nd);
    const auto parts = map_chunks<double>(samples, 16, [&](std::size_t b, std::size_t e) {
      double best = 0.0;
      for (std::size_t i = b; i < e; ++i) {
        const double t = std::exp(lo + (hi - lo) * static_cast<double>(i) / (samples - 1));
        const double w = w2(t);
        if (w == 0.0) continue;
        best = std::max(best, w * kernel_sup(params_, t, n_));
      }
      return best;
    });
    m.j2_sup = *std::max_element(parts.begin(), parts.end());
  }

  // J3 and the arc pieces on the grid t = j / L, 1/N <= t <= 2T.
  std::int64_t per_unit = options.samples_per_unit;
  if (per_unit <= 0) per_unit = static_cast<std::int64_t>(std::ceil(16.0 * 4.0 * nd * nd * params_.max_beta()));
  const WeylSupTable table(n_, per_unit);
  const auto j_lo = static_cast<std::int64_t>(std::floor(static_cast<double>(per_unit) / nd));
  const auto j_hi = static_cast<std::int64_t>(std::ceil(2.0 * horizon_ * static_cast<double>(per_unit)));
  const auto count = static_cast<std::size_t>(j_hi - j_lo + 1);
  m.time_samples = static_cast<std::int64_t>(count);
  const auto sups = map_chunks<double>(count, 1 << 14, [&](std::size_t b, std::size_t e) {
    double best = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      const std::int64_t j = j_lo + static_cast<std::int64_t>(i);
      const double t = static_cast<double>(j) / static_cast<double>(per_unit);
      const double w = w3(t);
      if (w == 0.0) continue;
      best = std::max(best, w * table.kernel_sup_at(params_, j));
    }
    return best;
  });
  m.j3_sup = *std::max_element(sups.begin(), sups.end());

  if (options.max_arc_order > 0) {
    const ArcSystem arcs(n_, options.c0);
    m.sigma_step_j3 = 1.0 / (4.0 * horizon_);
    const double h = 1.0 / static_cast<double>(per_unit);
    for (int k = 1; k <= std::min(options.max_arc_order, d); ++k) {
      std::vector<std::vector<int>> tuples;
      std::vector<int> cur;
      qs_tuples(k, arcs.levels(), cur, tuples);
      for (const auto& qs : tuples) {
        struct Part {
          double sup = 0.0;
          std::vector<double> ts;
          std::vector<double> ws;
        };
        const auto parts = map_chunks<Part>(count, 1 << 14, [&](std::size_t b, std::size_t e) {
          Part p;
          for (std::size_t i = b; i < e; ++i) {
            const std::int64_t j = j_lo + static_cast<std::int64_t>(i);
            const double t = static_cast<double>(j) * h;
            const double w3v = w3(t);
            if (w3v == 0.0) continue;
            const double w = w3v * arcs.arc_weight(params_, qs, t);
            if (w == 0.0) continue;
            p.sup = std::max(p.sup, w * table.kernel_sup_at(params_, j));
            p.ts.push_back(t);
            p.ws.push_back(w);
          }
          return p;
        });
        ArcPieceBound ab;
        ab.qs = qs;
        std::vector<double> ts;
        std::vector<double> ws;
        double prod = 1.0;
        for (int q : qs) prod *= q;
        for (const auto& p : parts) {
          ab.sup = std::max(ab.sup, p.sup);
          ts.insert(ts.end(), p.ts.begin(), p.ts.end());
          ws.insert(ws.end(), p.ws.begin(), p.ws.end());
        }
        ab.fourier_sup = fourier_sup(ts, ws, h, m.sigma_step_j3, options.sigma_points);
        ab.sup_bound = std::pow(nd, (k + d) / 2.0) / std::sqrt(prod);
        ab.fourier_bound = horizon_ * prod / std::pow(nd, k);
        m.arcs.push_back(std::move(ab));
      }
    }
  }
  return m;
}

}  // namespace irtorus
