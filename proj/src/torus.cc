#include "irtorus/torus.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "irtorus/cutoff.h"
#include "irtorus/errors.h"
#include "irtorus/fft.h"
#include "irtorus/parallel.h"
#include "irtorus/phase.h"

namespace irtorus {

TorusParams::TorusParams(std::vector<double> beta, bool allow_override) : beta_(std::move(beta)) {
  const int d = this->d();
  const int min_d = allow_override ? 1 : 2;
  if (d < min_d || d > 4) {
    throw std::invalid_argument("TorusParams: dimension " + std::to_string(d) +
                                " outside the supported range");
  }
  for (double b : beta_) {
    if (!(b >= 1.0 && b <= 2.0)) {
      throw std::invalid_argument("TorusParams: beta_i must lie in [1, 2]");
    }
  }
  if (!allow_override && beta_[0] != 1.0) {
    throw std::invalid_argument("TorusParams: beta_1 must be 1");
  }
}

TorusParams TorusParams::square(int d) { return TorusParams(std::vector<double>(d, 1.0)); }

double TorusParams::max_beta() const { return *std::max_element(beta_.begin(), beta_.end()); }

bool TorusParams::integral() const {
  return std::all_of(beta_.begin(), beta_.end(), [](double b) { return b == std::floor(b); });
}

double quadratic_form(const TorusParams& params, std::span<const int> k) {
  if (static_cast<int>(k.size()) != params.d()) {
    throw DimensionMismatch("quadratic_form: |k| = " + std::to_string(k.size()) +
                            " but d = " + std::to_string(params.d()));
  }
  double q = 0.0;
  for (int i = 0; i < params.d(); ++i) {
    const double ki = k[i];
    q += params.beta(i) * (ki * ki);
  }
  return q;
}

namespace {

std::size_t box_size(int d, int n) {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(4 * n + 1);
  return s;
}

}  // namespace

SpectralField::SpectralField(int d, int n) : SpectralField(d, n, std::vector<Complex>(box_size(d, n))) {}

SpectralField::SpectralField(int d, int n, std::vector<Complex> coeffs)
    : d_(d), n_(n), coeffs_(std::move(coeffs)) {
  if (d < 1) throw std::invalid_argument("SpectralField: d must be >= 1");
  if (n < 1) throw std::invalid_argument("SpectralField: N must be >= 1");
  if (coeffs_.size() != box_size(d, n)) {
    throw DimensionMismatch("SpectralField: coefficient count does not match (4N+1)^d");
  }
}

SpectralField SpectralField::from_entries(
    int d, int n, std::span<const std::pair<std::vector<int>, Complex>> entries) {
  std::vector<Complex> c(box_size(d, n));
  SpectralField probe(d, n);
  for (const auto& [k, v] : entries) {
    if (static_cast<int>(k.size()) != d) throw DimensionMismatch("from_entries: frequency dimension");
    for (int ki : k) {
      if (std::abs(ki) > 2 * n) {
        throw std::invalid_argument("from_entries: frequency outside |k_i| <= 2N");
      }
    }
    c[probe.flat_index(k)] += v;
  }
  return SpectralField(d, n, std::move(c));
}

std::size_t SpectralField::flat_index(std::span<const int> k) const {
  std::size_t idx = 0;
  for (int i = 0; i < d_; ++i) idx = idx * side() + static_cast<std::size_t>(k[i] + bound());
  return idx;
}

std::vector<int> SpectralField::frequency(std::size_t flat) const {
  std::vector<int> k(d_);
  for (int i = d_ - 1; i >= 0; --i) {
    k[i] = static_cast<int>(flat % side()) - bound();
    flat /= side();
  }
  return k;
}

Complex SpectralField::at(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != d_) throw DimensionMismatch("SpectralField::at");
  for (int ki : k) {
    if (std::abs(ki) > bound()) return {};
  }
  return coeffs_[flat_index(k)];
}

double SpectralField::l2_norm() const {
  CompensatedSum s;
  for (const Complex& c : coeffs_) s.add(std::norm(c));
  return std::sqrt(s.value());
}

int SpectralField::max_frequency() const {
  int m = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == Complex{}) continue;
    for (int ki : frequency(i)) m = std::max(m, std::abs(ki));
  }
  return m;
}

SpectralField SpectralField::scaled(Complex c) const {
  std::vector<Complex> out(coeffs_);
  for (Complex& v : out) v *= c;
  return SpectralField(d_, n_, std::move(out));
}

ProfileSpec ProfileSpec::plane_wave(std::vector<int> n, bool normalize) {
  ProfileSpec s;
  s.kind = Kind::kPlaneWave;
  s.mode = std::move(n);
  s.normalize = normalize;
  return s;
}

ProfileSpec ProfileSpec::peaked_psi(bool normalize) {
  ProfileSpec s;
  s.kind = Kind::kPeakedPsi;
  s.normalize = normalize;
  return s;
}

ProfileSpec ProfileSpec::custom(std::vector<std::pair<std::vector<int>, Complex>> table,
                                bool normalize) {
  ProfileSpec s;
  s.kind = Kind::kCustom;
  s.table = std::move(table);
  s.normalize = normalize;
  return s;
}

std::vector<Complex> peaked_line(int n, bool normalize) {
  if (n < 1) throw std::invalid_argument("peaked_line: N must be >= 1");
  std::vector<Complex> h(4 * n + 1);
  for (int k = -2 * n; k <= 2 * n; ++k) h[k + 2 * n] = chi(static_cast<double>(k) / n);
  if (normalize) {
    CompensatedSum s;
    for (const Complex& v : h) s.add(std::norm(v));
    const double norm = std::sqrt(s.value());
    for (Complex& v : h) v /= norm;
  }
  return h;
}

SpectralField tensor_power(std::span<const Complex> h, int n, int d) {
  if (static_cast<int>(h.size()) != 4 * n + 1) {
    throw DimensionMismatch("tensor_power: table must cover k = -2N..2N");
  }
  const std::size_t total = box_size(d, n);
  std::vector<Complex> c(total);
  const std::size_t side = h.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    Complex v{1.0, 0.0};
    for (int i = 0; i < d; ++i) {
      v *= h[rest % side];
      rest /= side;
    }
    c[flat] = v;
  }
  return SpectralField(d, n, std::move(c));
}

std::optional<std::vector<Complex>> tensor_factor(const SpectralField& field, double rel_tol) {
  const int d = field.d();
  const int side = field.side();
  // Pivot: the largest coefficient.
  std::size_t pivot = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double a = std::abs(field.coeffs()[i]);
    if (a > best) {
      best = a;
      pivot = i;
    }
  }
  if (best == 0.0) return std::nullopt;
  const std::vector<int> kp = field.frequency(pivot);
  // A symmetric rank-one tensor has all pivot coordinates equal.
  for (int k : kp) {
    if (k != kp[0]) return std::nullopt;
  }
  const Complex a = field.coeffs()[pivot];
  // h(k) proportional to the fibre through the pivot along the first axis.
  std::vector<Complex> h(side);
  std::vector<int> k = kp;
  for (int j = 0; j < side; ++j) {
    k[0] = j - field.bound();
    h[j] = field.at(k);
  }
  // Scale so that h(kp)^d = a: h(kp) = a^(1/d) with the fibre normalized by it.
  const Complex root = std::pow(a, 1.0 / d);
  const Complex fibre_pivot = h[kp[0] + field.bound()];
  for (Complex& v : h) v *= root / fibre_pivot;
  const SpectralField rebuilt = tensor_power(h, field.n(), d);
  const double scale = field.l2_norm();
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (std::abs(rebuilt.coeffs()[i] - field.coeffs()[i]) > rel_tol * scale) return std::nullopt;
  }
  return h;
}

SpectralField make_profile(const ProfileSpec& spec, int n, int d) {
  if (n < 1) throw std::invalid_argument("make_profile: N must be >= 1");
  SpectralField out(d, n);
  switch (spec.kind) {
    case ProfileSpec::Kind::kPlaneWave: {
      if (static_cast<int>(spec.mode.size()) != d) throw DimensionMismatch("plane_wave: |n| != d");
      for (int ni : spec.mode) {
        if (std::abs(ni) > 2 * n) throw std::invalid_argument("plane_wave: |n_i| > 2N");
      }
      const std::pair<std::vector<int>, Complex> entry{spec.mode, Complex{1.0, 0.0}};
      out = SpectralField::from_entries(d, n, std::span(&entry, 1));
      break;
    }
    case ProfileSpec::Kind::kPeakedPsi:
      out = tensor_power(peaked_line(n, false), n, d);
      break;
    case ProfileSpec::Kind::kCustom:
      out = SpectralField::from_entries(d, n, spec.table);
      break;
  }
  if (spec.normalize) {
    const double norm = out.l2_norm();
    if (norm == 0.0) throw std::invalid_argument("make_profile: cannot normalize the zero field");
    out = out.scaled(1.0 / norm);
  }
  return out;
}

SpectralField propagate(const SpectralField& field, const TorusParams& params, double t) {
  if (field.d() != params.d()) throw DimensionMismatch("propagate: field and torus dimensions differ");
  const int d = field.d();
  const int b = field.bound();
  const int side = field.side();
  // Per-axis phases frac(t beta_i k^2).
  std::vector<double> axis(static_cast<std::size_t>(d * side));
  for (int i = 0; i < d; ++i) {
    for (int k = -b; k <= b; ++k) {
      axis[i * side + (k + b)] = frac_triple(t, params.beta(i), static_cast<std::int64_t>(k) * k);
    }
  }
  std::vector<Complex> c(field.coeffs().begin(), field.coeffs().end());
  for (std::size_t flat = 0; flat < c.size(); ++flat) {
    if (c[flat] == Complex{}) continue;
    std::size_t rest = flat;
    double f = 0.0;
    for (int i = d - 1; i >= 0; --i) {
      f += axis[i * side + static_cast<int>(rest % side)];
      rest /= side;
    }
    c[flat] *= unit_phase(-wrap_unit(f));
  }
  return SpectralField(d, field.n(), std::move(c));
}

std::vector<Complex> synthesize(const SpectralField& field, int points) {
  const int d = field.d();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(points);
  std::vector<Complex> grid(total);
  const int side = field.side();
  const int b = field.bound();
  for (std::size_t flat = 0; flat < field.size(); ++flat) {
    const Complex v = field.coeffs()[flat];
    if (v == Complex{}) continue;
    std::size_t rest = flat;
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (int i = d - 1; i >= 0; --i) {
      const int k = static_cast<int>(rest % side) - b;
      rest /= side;
      idx += static_cast<std::size_t>(((k % points) + points) % points) * stride;
      stride *= static_cast<std::size_t>(points);
    }
    grid[idx] += v;
  }
  std::vector<int> dims(d, points);
  fft_inplace(grid, dims, +1);
  return grid;
}

}  // namespace irtorus
