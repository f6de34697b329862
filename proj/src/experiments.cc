#include "irtorus/experiments.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "irtorus/errors.h"
#include "irtorus/fft.h"
#include "irtorus/parallel.h"

namespace irtorus {

// ---------------------------------------------------------------------------
// Rational

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make_rational(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
  if (num > kMax || num < -kMax || den > kMax) throw std::overflow_error("Rational: overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("Rational: non-finite value");
  if (x == 0.0) return Rational(0);
  int e = 0;
  const double m = std::frexp(x, &e);
  auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  e -= 53;
  while (e < 0 && mant % 2 == 0) {
    mant /= 2;
    ++e;
  }
  if (e >= 0) {
    if (e > 62 - 53) throw std::overflow_error("Rational: value too large");
    return Rational(mant * (std::int64_t{1} << e));
  }
  if (-e > 62) throw std::overflow_error("Rational: denominator beyond 2^62");
  return Rational(mant, std::int64_t{1} << (-e));
}

std::string Rational::to_string() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make_rational(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                       static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return make_rational(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
  return make_rational(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<i128>(a.num_) * b.den_ < static_cast<i128>(b.num_) * a.den_;
}

Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// ---------------------------------------------------------------------------
// Exponents

std::string to_string(ThetaKind kind) {
  switch (kind) {
    case ThetaKind::kConjectured:
      return "theta_conj";
    case ThetaKind::kProved:
      return "theta_proved";
    case ThetaKind::kTheta1:
      return "theta1";
    case ThetaKind::kTheta2:
      return "theta2";
  }
  return "?";
}

namespace {

using Formula = std::function<Rational(const Rational&)>;

struct Piece {
  Rational lo;
  Formula f;
};

Rational p_star(int d) { return Rational(2 * (d + 2), d); }

Rational theta1_formula(int d, const Rational& p) {
  const Rational ps = p_star(d);
  return Rational(2 * (d - 1)) * (p - ps) / (p + Rational(8) - ps);
}

Rational theta2_formula(int d, const Rational& p) {
  return Rational(d * (d - 2), 4 * (d - 1)) * (p - p_star(d));
}

std::vector<Piece> theta_pieces(ThetaKind kind, int d) {
  const Rational ps = p_star(d);
  const Formula zero = [](const Rational&) { return Rational(0); };
  const Formula top = [d](const Rational&) { return Rational(2 * d - 2); };
  const Formula t1 = [d](const Rational& p) { return theta1_formula(d, p); };
  const Formula t2 = [d](const Rational& p) { return theta2_formula(d, p); };
  switch (kind) {
    case ThetaKind::kConjectured:
      return {{Rational(1), zero},
              {ps, [d, ps](const Rational& p) { return Rational(d, 2) * (p - ps); }},
              {Rational(6), top}};
    case ThetaKind::kTheta1:
      return {{Rational(1), zero}, {ps, t1}};
    case ThetaKind::kTheta2:
      return {{Rational(1), zero}, {ps, t2}};
    case ThetaKind::kProved:
      if (d >= 4) {
        return {{Rational(1), zero}, {ps, t1}, {Rational(2 * d, d - 2), t2}, {Rational(6), top}};
      }
      return {{Rational(1), zero}, {ps, t1}, {Rational(6), top}};
  }
  return {};
}

void check_domain(int d, const Rational& p) {
  if (d < 2) throw std::invalid_argument("theta_exponents: d must be >= 2");
  if (p < Rational(1)) throw std::invalid_argument("theta_exponents: p must be >= 1");
}

}  // namespace

Rational theta_value(ThetaKind kind, int d, const Rational& p) {
  check_domain(d, p);
  if (kind == ThetaKind::kProved) {
    if (p < p_star(d)) return Rational(0);
    if (p >= Rational(6)) return Rational(2 * d - 2);
    return max(theta_value(ThetaKind::kTheta1, d, p), theta_value(ThetaKind::kTheta2, d, p));
  }
  const auto pieces = theta_pieces(kind, d);
  const Piece* active = &pieces.front();
  for (const Piece& piece : pieces) {
    if (piece.lo <= p) active = &piece;
  }
  return active->f(p);
}

ExponentTable theta_exponents(int d, const Rational& p) {
  check_domain(d, p);
  ExponentTable t;
  t.d = d;
  t.p = p;
  t.p_star = p_star(d);
  t.theta_conj = theta_value(ThetaKind::kConjectured, d, p);
  t.theta_proved = theta_value(ThetaKind::kProved, d, p);
  t.theta1 = theta_value(ThetaKind::kTheta1, d, p);
  t.theta2 = theta_value(ThetaKind::kTheta2, d, p);
  return t;
}

ExponentTable theta_exponents(int d, double p) { return theta_exponents(d, Rational::from_double(p)); }

std::vector<Breakpoint> theta_breakpoints(ThetaKind kind, int d) {
  if (d < 2) throw std::invalid_argument("theta_breakpoints: d must be >= 2");
  const auto pieces = theta_pieces(kind, d);
  std::vector<Breakpoint> out;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    Breakpoint b;
    b.p = pieces[i].lo;
    b.left = pieces[i - 1].f(b.p);
    b.right = pieces[i].f(b.p);
    b.jump = abs(b.left - b.right);
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fits

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < n; ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (!(sxx.value() > 0.0)) throw std::invalid_argument("fit_line: x values are all equal");
  LinearFit f;
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  CompensatedSum rr;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    rr.add(r * r);
  }
  f.residual = std::sqrt(rr.value() / n);
  f.points = static_cast<int>(n);
  return f;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw std::domain_error("fit_loglog: nonpositive x");
    lx[i] = std::log(x[i]);
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) throw std::domain_error("fit_loglog: nonpositive y");
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

// ---------------------------------------------------------------------------
// Scans

std::string to_string(ProfileKind kind) {
  return kind == ProfileKind::kPeaked ? "peaked" : "plane_wave";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "peaked") return ProfileKind::kPeaked;
  if (name == "plane_wave") return ProfileKind::kPlaneWave;
  throw std::invalid_argument("unknown profile '" + name + "'");
}

std::vector<Complex> profile_line(ProfileKind kind, int n) {
  if (kind == ProfileKind::kPeaked) return peaked_line(n, true);
  std::vector<Complex> h(4 * n + 1);
  h[2 * n] = 1.0;
  return h;
}

namespace {

std::vector<double> horizons_for(const ScanConfig& config, int n) {
  if (!config.t_law) return config.ts;
  std::vector<double> out;
  const double base = config.t_law->c * std::pow(static_cast<double>(n), config.t_law->alpha);
  for (double m : config.t_multipliers) out.push_back(base * m);
  return out;
}

double tensor_l2(std::span<const Complex> h, int d) {
  CompensatedSum s;
  for (const Complex& z : h) s.add(std::norm(z));
  return std::pow(std::sqrt(s.value()), d);
}

}  // namespace

ScanResult strichartz_scan(const ScanConfig& config) {
  if (config.ns.empty()) throw std::invalid_argument("strichartz_scan: empty N list");
  if (!config.t_law && config.ts.empty()) throw std::invalid_argument("strichartz_scan: empty T list");
  if (config.t_law && config.t_multipliers.empty()) {
    throw std::invalid_argument("strichartz_scan: empty T multiplier list");
  }
  const TorusParams params(config.beta);
  const int d = params.d();
  const bool even = is_even_integer(config.p);
  ScanResult result;
  for (int n : config.ns) {
    if (n < 1) throw std::invalid_argument("strichartz_scan: N must be >= 1");
    const auto h = profile_line(config.profile, n);
    const double l2 = tensor_l2(h, d);
    std::vector<double> ts = horizons_for(config, n);
    result.columns = static_cast<int>(ts.size());
    bool integral = true;
    for (double& t : ts) {
      if (config.t_law && even) t = std::max(1.0, std::round(t));
      if (!(t > 0.0)) throw std::invalid_argument("strichartz_scan: T must be positive");
      if (t != std::floor(t)) integral = false;
    }
    std::vector<NormResult> norms(ts.size());
    const bool fast = even && integral;
    if (fast) {
      // One pass over increasing horizons.
      std::vector<std::size_t> order(ts.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ts[a] < ts[b]; });
      std::vector<std::int64_t> hs;
      for (std::size_t i : order) hs.push_back(static_cast<std::int64_t>(ts[i]));
      const PeriodicProfile profile(h, n, static_cast<int>(config.p));
      const auto sorted = tensor_power_integrals(profile, params, hs, config.quad);
      for (std::size_t r = 0; r < order.size(); ++r) norms[order[r]] = sorted[r];
    } else {
      const SpectralField field = tensor_power(h, n, d);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        norms[i] = lp_spacetime_norm(field, params, config.p, ts[i], config.quad);
      }
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      ScanCell cell;
      cell.n = n;
      cell.column = static_cast<int>(i);
      cell.t = ts[i];
      cell.norm = norms[i].norm;
      cell.l2 = l2;
      cell.c = norms[i].norm / l2;
      cell.richardson_delta = norms[i].richardson_delta;
      cell.time_steps = norms[i].time_steps;
      cell.fast_path = fast;
      result.cells.push_back(cell);
    }
    if (ts.size() >= 2) {
      std::vector<double> x, y;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        x.push_back(ts[i]);
        y.push_back(result.cells[result.cells.size() - ts.size() + i].c);
      }
      result.t_fits.push_back(fit_loglog(x, y));
    }
  }
  if (config.ns.size() >= 2) {
    for (int col = 0; col < result.columns; ++col) {
      std::vector<double> x, y;
      for (const ScanCell& cell : result.cells) {
        if (cell.column != col) continue;
        x.push_back(cell.n);
        y.push_back(cell.c);
      }
      result.n_fits.push_back(fit_loglog(x, y));
    }
  }
  return result;
}

OptimalityResult optimality_experiment(std::span<const double> beta, int p, double eta,
                                       std::span<const int> ns, const QuadratureSpec& quad,
                                       int g_samples) {
  if (p <= 0 || p % 2 != 0) throw std::invalid_argument("optimality_experiment: p must be even");
  if (!(eta > 0.0)) throw std::invalid_argument("optimality_experiment: eta must be positive");
  const TorusParams params(std::vector<double>(beta.begin(), beta.end()));
  const int d = params.d();
  OptimalityResult out;
  out.eta = eta;
  out.p = p;
  out.d = d;
  out.predicted = d / 2.0 - 3.0 * d / p;
  out.square_predicted = d / 2.0 - (d + 2.0) / p;

  ScanConfig config;
  config.beta.assign(beta.begin(), beta.end());
  config.p = p;
  config.profile = ProfileKind::kPeaked;
  config.ns.assign(ns.begin(), ns.end());
  config.t_law = TLaw{1.0, 2.0 * d - 2.0 + eta};
  config.t_multipliers = {1.0, 1.5, 2.0, 3.0, 4.0};
  config.quad = quad;
  out.scan = strichartz_scan(config);
  out.t_fits = out.scan.t_fits;
  for (const LinearFit& f : out.t_fits) {
    out.max_t_slope_error = std::max(out.max_t_slope_error, std::abs(f.slope - 1.0 / p));
  }
  std::vector<double> x, y;
  for (const ScanCell& cell : out.scan.cells) {
    if (cell.column != 0) continue;
    out.t0.push_back(static_cast<std::int64_t>(cell.t));
    x.push_back(cell.n);
    y.push_back(cell.c / std::pow(cell.t, 1.0 / p));
  }
  if (x.size() >= 2) out.n_fit = fit_loglog(x, y);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const PeriodicProfile profile(peaked_line(ns[i], true), ns[i], p);
    out.a0.push_back(profile.a0());
    out.g_deviation.push_back(g_deviation(profile, params, out.t0[i], g_samples));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Level sets

std::vector<double> uniform_levels(double top, int count) {
  if (!(top > 0.0) || count < 1) throw std::invalid_argument("uniform_levels: need top > 0, count >= 1");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = top * (i + 1) / count;
  return out;
}

namespace {

// |u(t, .)| on the spatial grid from the field's Fourier data.
class Slicer {
 public:
  Slicer(const SpectralField& field, const TorusParams& params, int points)
      : field_(field), params_(params), points_(points) {
    const int d = field.d();
    dims_.assign(d, points);
    total_ = 1;
    for (int i = 0; i < d; ++i) total_ *= static_cast<std::size_t>(points);
    for (std::size_t flat = 0; flat < field.size(); ++flat) {
      const Complex v = field.coeffs()[flat];
      if (v == Complex{}) continue;
      Entry e;
      e.k = field.frequency(flat);
      e.value = v;
      e.index = 0;
      for (int i = 0; i < d; ++i) e.index = e.index * points + static_cast<std::size_t>(((e.k[i] % points) + points) % points);
      entries_.push_back(std::move(e));
    }
  }

  std::size_t total() const { return total_; }

  void moduli(double t, std::vector<Complex>& grid, std::vector<double>& out) const {
    grid.assign(total_, Complex{});
    for (const Entry& e : entries_) {
      CompensatedSum f;
      for (int i = 0; i < field_.d(); ++i) {
        f.add(frac_triple(t, params_.beta(i), static_cast<std::int64_t>(e.k[i]) * e.k[i]));
      }
      grid[e.index] += e.value * unit_phase(-wrap_unit(f.value()));
    }
    fft_inplace(grid, dims_, +1);
    out.resize(total_);
    for (std::size_t i = 0; i < total_; ++i) out[i] = std::abs(grid[i]);
  }

 private:
  struct Entry {
    std::size_t index;
    std::vector<int> k;
    Complex value;
  };
  const SpectralField& field_;
  const TorusParams& params_;
  int points_;
  std::vector<int> dims_;
  std::size_t total_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace

LevelSetRecord level_set_census(const SpectralField& field, const TorusParams& params, double p,
                                double horizon, std::span<const double> lambdas,
                                const LevelSetOptions& options) {
  if (field.d() != params.d()) throw DimensionMismatch("level_set_census: dimension mismatch");
  if (!(horizon > 0.0)) throw std::invalid_argument("level_set_census: T must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("level_set_census: p must be >= 1");
  const int d = field.d();
  const int n = field.n();
  LevelSetRecord rec;
  rec.n = n;
  rec.horizon = horizon;
  rec.p = p;
  if (lambdas.empty()) {
    CompensatedSum l1;
    for (const Complex& z : field.coeffs()) l1.add(std::abs(z));
    rec.lambdas = uniform_levels(l1.value(), 1024);
  } else {
    rec.lambdas.assign(lambdas.begin(), lambdas.end());
    for (std::size_t i = 0; i < rec.lambdas.size(); ++i) {
      if (!(rec.lambdas[i] > 0.0) || (i > 0 && !(rec.lambdas[i] > rec.lambdas[i - 1]))) {
        throw std::invalid_argument("level_set_census: levels must be positive and increasing");
      }
    }
  }
  const std::size_t levels = rec.lambdas.size();
  rec.spatial_points = options.spatial_points > 0 ? options.spatial_points : fft_size_at_least(4 * n + 1);
  const std::int64_t s = samples_per_unit_time(params.max_beta(), n, options.time_step_constant);
  auto steps = static_cast<std::int64_t>(std::ceil(horizon * static_cast<double>(s)));
  if (steps % 2 != 0) ++steps;
  rec.time_samples = steps + 1;
  const double dt = horizon / static_cast<double>(steps);
  const Slicer slicer(field, params, rec.spatial_points);
  const double dx = 1.0 / static_cast<double>(slicer.total());

  struct Partial {
    std::vector<double> above;  // weight with |u| > lambda_m, bucketed at the top level exceeded
    CompensatedSum power;
    double max_modulus = 0.0;
  };
  auto partials = map_chunks<Partial>(
      static_cast<std::size_t>(steps + 1), 8, [&](std::size_t b, std::size_t e) {
        Partial part;
        part.above.assign(levels + 1, 0.0);
        std::vector<Complex> grid;
        std::vector<double> mods;
        std::vector<CompensatedSum> bucket(levels + 1);
        for (std::size_t j = b; j < e; ++j) {
          const double w = (j == 0 || j == static_cast<std::size_t>(steps) ? 0.5 : 1.0) * dt * dx;
          slicer.moduli(static_cast<double>(j) * dt, grid, mods);
          CompensatedSum pw;
          std::vector<std::int64_t> counts(levels + 1, 0);
          for (double m : mods) {
            pw.add(std::pow(m, p));
            part.max_modulus = std::max(part.max_modulus, m);
            // number of levels strictly below m
            const auto idx = static_cast<std::size_t>(
                std::lower_bound(rec.lambdas.begin(), rec.lambdas.end(), m) - rec.lambdas.begin());
            ++counts[idx];
          }
          part.power.add(w * pw.value());
          for (std::size_t m = 0; m <= levels; ++m) bucket[m].add(w * static_cast<double>(counts[m]));
        }
        for (std::size_t m = 0; m <= levels; ++m) part.above[m] = bucket[m].value();
        return part;
      });

  std::vector<CompensatedSum> bucket(levels + 1);
  CompensatedSum power;
  for (const Partial& part : partials) {
    for (std::size_t m = 0; m <= levels; ++m) bucket[m].add(part.above[m]);
    power.add(part.power.value());
    rec.max_modulus = std::max(rec.max_modulus, part.max_modulus);
  }
  // |E_{lambda_m}| = weight of samples with more than m levels below them.
  rec.measures.assign(levels, 0.0);
  double tail = 0.0;
  for (std::size_t m = levels + 1; m-- > 1;) {
    tail += bucket[m].value();
    rec.measures[m - 1] = tail;
  }
  rec.total_measure = tail + bucket[0].value();
  rec.power_integral = power.value();

  // p int_0^inf lambda^{p-1} |E_lambda| d lambda, trapezoid on {0} u grid.
  CompensatedSum cake;
  double prev_l = 0.0;
  double prev_v = 0.0;  // lambda^{p-1} |E| vanishes at 0 for p > 1
  if (p == 1.0) prev_v = rec.total_measure;
  for (std::size_t m = 0; m < levels; ++m) {
    const double v = std::pow(rec.lambdas[m], p - 1.0) * rec.measures[m];
    cake.add(0.5 * (rec.lambdas[m] - prev_l) * (v + prev_v));
    prev_l = rec.lambdas[m];
    prev_v = v;
  }
  rec.layer_cake = p * cake.value();
  rec.layer_cake_error =
      rec.power_integral > 0 ? std::abs(rec.layer_cake - rec.power_integral) / rec.power_integral : 0.0;

  rec.exponent = 2.0 * (d + 2) / d;
  rec.split = std::pow(horizon, 0.125) * std::pow(static_cast<double>(n), (d + 1) / 4.0);
  rec.normalized.resize(levels);
  for (std::size_t m = 0; m < levels; ++m) {
    const double scaled = rec.measures[m] * std::pow(rec.lambdas[m], rec.exponent);
    if (rec.lambdas[m] > rec.split) {
      rec.normalized[m] = scaled;
      rec.high_max = std::max(rec.high_max, scaled);
    } else {
      rec.normalized[m] = scaled / horizon;
      rec.low_max = std::max(rec.low_max, rec.normalized[m]);
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------

ProfileCheck profile_coefficient_checks(int p, std::span<const int> ns) {
  if (p <= 0 || p % 2 != 0) throw std::invalid_argument("profile_coefficient_checks: p must be even");
  if (ns.empty()) throw std::invalid_argument("profile_coefficient_checks: empty N list");
  ProfileCheck out;
  out.p = p;
  out.ns.assign(ns.begin(), ns.end());
  out.predicted_slope = p / 2.0 - 3.0;
  std::vector<double> x;
  for (int n : ns) {
    const PeriodicProfile profile(peaked_line(n, true), n, p);
    const double a0 = profile.a0();
    out.a0.push_back(a0);
    x.push_back(n);
    const std::int64_t kmax = std::min<std::int64_t>(
        static_cast<std::int64_t>(n) * n * n, profile.bandwidth());
    for (int order = 1; order <= 3; ++order) {
      double worst = 0.0;
      const double scale = a0 * std::pow(static_cast<double>(n), 2 * order);
      for (std::int64_t k = 1; k <= kmax; ++k) {
        const double mag = std::max(std::abs(profile.coefficient(static_cast<int>(k))),
                                    std::abs(profile.coefficient(static_cast<int>(-k))));
        worst = std::max(worst, mag * std::pow(static_cast<double>(k), order) / scale);
      }
      out.decay[order - 1].push_back(worst);
    }
  }
  if (ns.size() >= 2) out.a0_fit = fit_loglog(x, out.a0);
  return out;
}

RepeakResult refocus_experiment(const TorusParams& params, int n, double eta, double eps,
                                int grid_points) {
  RepeakResult out;
  out.refocus = refocus_time(params, n, eta, eps);
  out.grid_points = grid_points > 0 ? grid_points : fft_size_at_least(8 * n);
  const SpectralField psi = make_profile(ProfileSpec::peaked_psi(true), n, params.d());
  auto sup = [&](const SpectralField& f) {
    const auto values = synthesize(f, out.grid_points);
    double m = 0.0;
    for (const Complex& z : values) m = std::max(m, std::abs(z));
    return m;
  };
  out.sup_initial = sup(psi);
  if (out.refocus.found) {
    out.sup_refocused = sup(propagate(psi, params, static_cast<double>(out.refocus.q)));
    out.ratio = out.sup_refocused / out.sup_initial;
  }
  return out;
}

}  // namespace irtorus
