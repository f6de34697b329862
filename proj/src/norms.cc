#include "irtorus/norms.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "irtorus/errors.h"
#include "irtorus/fft.h"
#include "irtorus/parallel.h"
#include "irtorus/phase.h"

namespace irtorus {

std::int64_t samples_per_unit_time(double max_beta, int n, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("time step constant must be positive");
  const double two_n = 2.0 * n;
  auto s = static_cast<std::int64_t>(std::ceil(max_beta * two_n * two_n / c));
  if (s % 2 != 0) ++s;
  return std::max<std::int64_t>(s, 2);
}

bool is_even_integer(double p) { return p > 0 && p == std::floor(p) && std::fmod(p, 2.0) == 0.0; }

int exact_spatial_points(int n, double p) {
  const double p_even = 2.0 * std::ceil(p / 2.0);
  return static_cast<int>(p_even) * 2 * n + 1;
}

namespace {

double power_of_modulus(Complex z, double p, bool even) {
  const double r2 = std::norm(z);
  if (even) {
    double acc = 1.0;
    for (int e = static_cast<int>(p) / 2; e > 0; --e) acc *= r2;
    return acc;
  }
  return std::pow(r2, 0.5 * p);
}

struct TrapezoidSums {
  double fine = 0.0;
  double coarse = 0.0;
};

// Trapezoid over samples j = first..last of a uniform grid, with the step-2
// estimate from samples of the same parity as `first`. (last - first) is even.
template <class Sample>
TrapezoidSums trapezoid(std::int64_t first, std::int64_t last, double step, Sample&& sample,
                        std::size_t chunk = 64) {
  const auto count = static_cast<std::size_t>(last - first + 1);
  const auto partials =
      map_chunks<std::pair<double, double>>(count, chunk, [&](std::size_t b, std::size_t e) {
        CompensatedSum fine;
        CompensatedSum coarse;
        for (std::size_t i = b; i < e; ++i) {
          const std::int64_t j = first + static_cast<std::int64_t>(i);
          const double w = (j == first || j == last) ? 0.5 : 1.0;
          const double v = sample(j);
          fine.add(w * v);
          if ((j - first) % 2 == 0) coarse.add(w * v);
        }
        return std::make_pair(fine.value(), coarse.value());
      });
  CompensatedSum fine;
  CompensatedSum coarse;
  for (const auto& [f, c] : partials) {
    fine.add(f);
    coarse.add(c);
  }
  return {fine.value() * step, coarse.value() * 2.0 * step};
}

// Spatial mean of |u(t_j)|^p for a field on an M^d grid.
class SpatialPower {
 public:
  SpatialPower(const SpectralField& field, const TorusParams& params, int points, double p)
      : field_(field), params_(params), points_(points), p_(p), even_(is_even_integer(p)) {
    const int d = field.d();
    dims_.assign(d, points);
    total_ = 1;
    for (int i = 0; i < d; ++i) total_ *= static_cast<std::size_t>(points);
    for (std::size_t flat = 0; flat < field.size(); ++flat) {
      const Complex v = field.coeffs()[flat];
      if (v == Complex{}) continue;
      const std::vector<int> k = field.frequency(flat);
      std::size_t idx = 0;
      for (int i = 0; i < d; ++i) {
        idx = idx * points + static_cast<std::size_t>(((k[i] % points) + points) % points);
      }
      entries_.push_back({idx, k, v});
    }
  }

  // `axis_phase(i, k)` returns frac(t beta_i k^2) for the current time.
  template <class AxisPhase>
  double mean(AxisPhase&& axis_phase) const {
    const int d = field_.d();
    const int b = field_.bound();
    const int side = field_.side();
    std::vector<double> axis(static_cast<std::size_t>(d * side));
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k <= b; ++k) {
        const double f = axis_phase(i, k);
        axis[i * side + b + k] = f;
        axis[i * side + b - k] = f;
      }
    }
    std::vector<Complex> grid(total_);
    for (const Entry& e : entries_) {
      double f = 0.0;
      for (int i = 0; i < d; ++i) f += axis[i * side + e.k[i] + b];
      grid[e.index] += e.value * unit_phase(-wrap_unit(f));
    }
    fft_inplace(grid, dims_, +1);
    CompensatedSum s;
    for (const Complex& z : grid) s.add(power_of_modulus(z, p_, even_));
    return s.value() / static_cast<double>(total_);
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
  double p_;
  bool even_;
  std::vector<int> dims_;
  std::size_t total_ = 0;
  std::vector<Entry> entries_;
};

NormResult direct_norm(const SpectralField& field, const TorusParams& params, double p,
                       double horizon, int points, double c) {
  NormResult r;
  r.spatial_points = points;
  const std::int64_t s = samples_per_unit_time(params.max_beta(), field.n(), c);
  if (horizon == 0.0) {
    r.time_step = 1.0 / static_cast<double>(s);
    return r;
  }
  SpatialPower power(field, params, points, p);
  TrapezoidSums sums;
  if (horizon == std::floor(horizon)) {
    const auto steps = static_cast<std::int64_t>(horizon) * s;
    r.time_steps = steps;
    r.time_step = 1.0 / static_cast<double>(s);
    sums = trapezoid(0, steps, r.time_step, [&](std::int64_t j) {
      return power.mean([&](int i, int k) {
        return frac_ratio(params.beta(i), j * static_cast<std::int64_t>(k) * k, s);
      });
    });
  } else {
    auto steps = static_cast<std::int64_t>(std::ceil(horizon * static_cast<double>(s)));
    if (steps % 2 != 0) ++steps;
    r.time_steps = steps;
    r.time_step = horizon / static_cast<double>(steps);
    sums = trapezoid(0, steps, r.time_step, [&](std::int64_t j) {
      const double t = static_cast<double>(j) * r.time_step;
      return power.mean([&](int i, int k) {
        return frac_triple(t, params.beta(i), static_cast<std::int64_t>(k) * k);
      });
    });
  }
  r.power_integral = sums.fine;
  r.norm = std::pow(sums.fine, 1.0 / p);
  r.richardson_delta = sums.fine > 0 ? std::abs(sums.fine - sums.coarse) / sums.fine : 0.0;
  return r;
}

}  // namespace

NormResult lp_spacetime_norm(const SpectralField& field, const TorusParams& params, double p,
                             double horizon, const QuadratureSpec& quad) {
  if (field.d() != params.d()) throw DimensionMismatch("lp_spacetime_norm: dimension mismatch");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_spacetime_norm: p must be >= 1");
  if (!(horizon >= 0.0)) throw std::invalid_argument("lp_spacetime_norm: T must be >= 0");
  const int required = exact_spatial_points(field.n(), p);
  const bool even = is_even_integer(p);
  int points = quad.spatial_points;
  if (points > 0 && points < required) {
    throw GridTooCoarse("lp_spacetime_norm: " + std::to_string(points) +
                        " spatial points, at least " + std::to_string(required) + " required");
  }
  if (points == 0) points = fft_size_at_least(required);
  if (even) {
    NormResult r = direct_norm(field, params, p, horizon, points, quad.time_step_constant);
    r.spatial_exact = true;
    return r;
  }
  const NormResult coarse = direct_norm(field, params, p, horizon, points, quad.time_step_constant);
  NormResult fine = direct_norm(field, params, p, horizon, fft_size_at_least(2 * points),
                                quad.time_step_constant);
  fine.spatial_exact = false;
  fine.grid_delta =
      fine.norm > 0 ? std::abs(fine.norm - coarse.norm) / fine.norm : 0.0;
  return fine;
}

PeriodicProfile::PeriodicProfile(std::span<const Complex> h, int n, int p) : n_(n), p_(p) {
  if (!is_even_integer(p)) throw std::invalid_argument("PeriodicProfile: p must be an even integer");
  if (static_cast<int>(h.size()) != 4 * n + 1) {
    throw DimensionMismatch("PeriodicProfile: table must cover k = -2N..2N");
  }
  int kmax = 0;
  for (int k = -2 * n; k <= 2 * n; ++k) {
    if (h[k + 2 * n] != Complex{}) kmax = std::max(kmax, std::abs(k));
  }
  bandwidth_ = (p / 2) * kmax * kmax;
  const int table = fft_size_at_least(2 * bandwidth_ + 1);
  spatial_points_ = fft_size_at_least(exact_spatial_points(n, p));
  const int m = spatial_points_;

  samples_.assign(table, 0.0);
  parallel_chunks(static_cast<std::size_t>(table), 32, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<Complex> grid(m);
    for (std::size_t l = b; l < e; ++l) {
      std::fill(grid.begin(), grid.end(), Complex{});
      for (int k = -2 * n; k <= 2 * n; ++k) {
        const Complex v = h[k + 2 * n];
        if (v == Complex{}) continue;
        const std::int64_t num = (static_cast<std::int64_t>(l) * k * k) % table;
        const double f = static_cast<double>(num) / table;
        grid[((k % m) + m) % m] += v * unit_phase(-f);
      }
      fft_inplace_1d(grid, +1);
      CompensatedSum s;
      for (const Complex& z : grid) s.add(power_of_modulus(z, p, true));
      samples_[l] = s.value() / m;
    }
  });

  std::vector<Complex> spectrum(samples_.begin(), samples_.end());
  fft_inplace_1d(spectrum, -1);
  fourier_.assign(2 * bandwidth_ + 1, Complex{});
  for (int k = -bandwidth_; k <= bandwidth_; ++k) {
    fourier_[k + bandwidth_] = spectrum[((k % table) + table) % table] / static_cast<double>(table);
  }
  CompensatedSum mean;
  for (double v : samples_) mean.add(v);
  a0_ = mean.value() / table;

  // Band-limited resampling onto a grid oversampled by >= 32 relative to Nyquist.
  const int fine = fft_size_at_least(std::max(64 * std::max(bandwidth_, 1), table));
  std::vector<Complex> padded(fine);
  for (int k = -bandwidth_; k <= bandwidth_; ++k) padded[((k % fine) + fine) % fine] = fourier_[k + bandwidth_];
  fft_inplace_1d(padded, +1);
  fine_.resize(fine);
  for (int i = 0; i < fine; ++i) fine_[i] = padded[i].real();
}

Complex PeriodicProfile::coefficient(int k) const {
  if (k < -bandwidth_ || k > bandwidth_) return {};
  return fourier_[k + bandwidth_];
}

double PeriodicProfile::at_phase(double s) const {
  constexpr int kNodes = 8;
  // c_j = 1 / prod_{m != j} (j - m) for nodes 0..7.
  static constexpr std::array<double, kNodes> kWeights = {
      -1.0 / 5040, 1.0 / 720, -1.0 / 240, 1.0 / 144, -1.0 / 144, 1.0 / 240, -1.0 / 720, 1.0 / 5040};
  const auto size = static_cast<std::int64_t>(fine_.size());
  const double x = s * static_cast<double>(size);
  const double base = std::floor(x);
  const double u = x - base + 3.0;  // position relative to node 0, in [3, 4)
  const auto i0 = static_cast<std::int64_t>(base) - 3;
  auto at = [&](int j) {
    std::int64_t idx = (i0 + j) % size;
    if (idx < 0) idx += size;
    return fine_[static_cast<std::size_t>(idx)];
  };
  double lagrange = 1.0;
  double acc = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const double diff = u - j;
    if (diff == 0.0) return at(j);
    lagrange *= diff;
    acc += kWeights[j] / diff * at(j);
  }
  return lagrange * acc;
}

std::vector<NormResult> tensor_power_integrals(const PeriodicProfile& profile,
                                               const TorusParams& params,
                                               std::span<const std::int64_t> horizons,
                                               const QuadratureSpec& quad) {
  const std::int64_t s = samples_per_unit_time(params.max_beta(), profile.n(), quad.time_step_constant);
  const int d = params.d();
  std::vector<NormResult> out;
  out.reserve(horizons.size());
  CompensatedSum fine_total;
  CompensatedSum coarse_total;
  std::int64_t previous = 0;
  for (std::int64_t horizon : horizons) {
    if (horizon < previous) throw std::invalid_argument("tensor_power_integrals: horizons must increase");
    if (horizon > previous) {
      const TrapezoidSums seg = trapezoid(
          previous * s, horizon * s, 1.0 / static_cast<double>(s),
          [&](std::int64_t j) {
            double v = 1.0;
            for (int i = 0; i < d; ++i) v *= profile.at_ratio(params.beta(i), j, s);
            return v;
          },
          4096);
      fine_total.add(seg.fine);
      coarse_total.add(seg.coarse);
    }
    previous = horizon;
    NormResult r;
    r.power_integral = fine_total.value();
    r.norm = std::pow(r.power_integral, 1.0 / profile.p());
    r.time_step = 1.0 / static_cast<double>(s);
    r.time_steps = horizon * s;
    r.spatial_points = profile.spatial_points();
    r.richardson_delta =
        r.power_integral > 0 ? std::abs(r.power_integral - coarse_total.value()) / r.power_integral : 0.0;
    out.push_back(r);
  }
  return out;
}

NormResult tensor_norm_fast(std::span<const Complex> h, int n, const TorusParams& params, int p,
                            std::int64_t horizon, const QuadratureSpec& quad) {
  if (p % 2 != 0 || p <= 0) throw std::invalid_argument("tensor_norm_fast: p must be a positive even integer");
  if (horizon < 0) throw std::invalid_argument("tensor_norm_fast: T must be a nonnegative integer");
  const PeriodicProfile profile(h, n, p);
  const std::int64_t horizons[1] = {horizon};
  return tensor_power_integrals(profile, params, horizons, quad).front();
}

NormResult tensor_norm_fast(const SpectralField& field, const TorusParams& params, int p,
                            std::int64_t horizon, const QuadratureSpec& quad) {
  if (field.d() != params.d()) throw DimensionMismatch("tensor_norm_fast: dimension mismatch");
  const auto h = tensor_factor(field);
  if (!h) throw std::invalid_argument("tensor_norm_fast: field is not a tensor power h x ... x h");
  return tensor_norm_fast(*h, field.n(), params, p, horizon, quad);
}

double g_deviation(const PeriodicProfile& profile, const TorusParams& params,
                   std::int64_t horizon, int t_samples) {
  if (horizon < 1) throw std::invalid_argument("g_deviation: T must be >= 1");
  if (t_samples < 1) throw std::invalid_argument("g_deviation: need at least one t sample");
  const int d = params.d();
  const double target = std::pow(profile.a0(), d - 1);
  const auto maxima = map_chunks<double>(
      static_cast<std::size_t>(t_samples), 16, [&](std::size_t b, std::size_t e) {
        double worst = 0.0;
        for (std::size_t l = b; l < e; ++l) {
          CompensatedSum g;
          for (std::int64_t n = 0; n < horizon; ++n) {
            double v = 1.0;
            const std::int64_t num = static_cast<std::int64_t>(l) + n * t_samples;
            for (int i = 1; i < d; ++i) v *= profile.at_ratio(params.beta(i), num, t_samples);
            g.add(v);
          }
          const double dev = std::abs(g.value() / static_cast<double>(horizon) - target) / target;
          worst = std::max(worst, dev);
        }
        return worst;
      });
  return maxima.empty() ? 0.0 : *std::max_element(maxima.begin(), maxima.end());
}

}  // namespace irtorus
