#include "irtorus/run.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "irtorus/counting.h"
#include "irtorus/diophantine.h"
#include "irtorus/expsum.h"
#include "irtorus/parallel.h"

namespace irtorus {

using nlohmann::json;

namespace {

bool is_finite(double x) { return std::isfinite(x); }

// ---------------------------------------------------------------------------
// Small output helpers

class Csv {
 public:
  Csv(const std::string& hash, std::vector<std::string> columns) {
    out_ << "# config_hash=" << hash << "\n";
    row(columns);
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::int64_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"points", f.points}};
}

json rational_json(const Rational& r) { return r.to_string(); }

Check at_most(std::string name, double value, double bound) {
  return {std::move(name), value, bound, 0.0, "value <= target", value <= bound};
}

Check at_least(std::string name, double value, double bound) {
  return {std::move(name), value, bound, 0.0, "value >= target", value >= bound};
}

Check within(std::string name, double value, double target, double tol) {
  return {std::move(name), value, target, tol, "|value - target| <= tolerance",
          std::fabs(value - target) <= tol};
}

// Closest rational with denominator <= 1000 when p is one up to rounding,
// else the exact binary value.
Rational rational_p(double p) {
  for (std::int64_t den = 1; den <= 1000; ++den) {
    const double num = std::round(p * static_cast<double>(den));
    if (std::fabs(num / static_cast<double>(den) - p) <= 1e-12 * std::fabs(p)) {
      return Rational(static_cast<std::int64_t>(num), den);
    }
  }
  return Rational::from_double(p);
}

std::vector<double> horizons(const RunConfig& c, int n) {
  if (!c.t_law) return c.ts;
  std::vector<double> out;
  const double base = c.t_law->c * std::pow(static_cast<double>(n), c.t_law->alpha);
  for (double m : c.t_multipliers) out.push_back(base * m);
  return out;
}

std::string seed_field(const RunConfig& c) {
  return c.beta ? std::string() : std::to_string(c.effective_seed());
}

double tol(const RunConfig& c, const std::string& name) {
  if (auto it = c.tolerances.find(name); it != c.tolerances.end()) return it->second;
  return catalog_entry(c.experiment).tolerances.at(name);
}

SpectralField profile_field(const RunConfig& c, int n) {
  if (c.profile == "plane_wave") {
    std::vector<int> mode(static_cast<std::size_t>(c.d), 0);
    mode[0] = 1;
    return make_profile(ProfileSpec::plane_wave(mode, true), n, c.d);
  }
  return make_profile(ProfileSpec::peaked_psi(true), n, c.d);
}

struct Output {
  json result = json::object();
  std::vector<Check> checks;
  std::string csv;  // empty: no CSV artifact
};

// ---------------------------------------------------------------------------
// Experiments

Output run_theta(const RunConfig& c, const std::string& hash) {
  Output o;
  const Rational p = rational_p(c.p);
  const ExponentTable t = theta_exponents(c.d, p);
  o.result = {{"d", c.d},
              {"p", p.to_double()},
              {"p_star", t.p_star.to_double()},
              {"theta_conj", t.theta_conj.to_double()},
              {"theta_proved", t.theta_proved.to_double()},
              {"theta1", t.theta1.to_double()},
              {"theta2", t.theta2.to_double()},
              {"exact",
               {{"p", rational_json(p)},
                {"p_star", rational_json(t.p_star)},
                {"theta_conj", rational_json(t.theta_conj)},
                {"theta_proved", rational_json(t.theta_proved)},
                {"theta1", rational_json(t.theta1)},
                {"theta2", rational_json(t.theta2)}}}};
  json bps = json::object();
  for (ThetaKind kind : {ThetaKind::kConjectured, ThetaKind::kProved, ThetaKind::kTheta1, ThetaKind::kTheta2}) {
    json arr = json::array();
    for (const Breakpoint& b : theta_breakpoints(kind, c.d)) {
      arr.push_back({{"p", rational_json(b.p)},
                     {"left", rational_json(b.left)},
                     {"right", rational_json(b.right)},
                     {"jump", b.jump.to_double()}});
    }
    bps[to_string(kind)] = arr;
  }
  o.result["breakpoints"] = bps;
  Csv csv(hash, {"d", "p", "theta_conj", "theta_proved", "theta1", "theta2"});
  for (int q = 4; q <= 32; ++q) {
    const ExponentTable r = theta_exponents(c.d, Rational(q, 4));
    csv.row({fmt(c.d), fmt(r.p.to_double()), fmt(r.theta_conj.to_double()), fmt(r.theta_proved.to_double()),
             fmt(r.theta1.to_double()), fmt(r.theta2.to_double())});
  }
  o.csv = csv.str();
  o.checks.push_back(at_most("proved_le_conj", t.theta_proved.to_double(), t.theta_conj.to_double()));
  return o;
}

void scan_rows(Csv& csv, const RunConfig& c, const ScanResult& r, bool by_t) {
  const std::size_t cols = static_cast<std::size_t>(r.columns);
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const ScanCell& cell = r.cells[i];
    const std::size_t ni = i / std::max<std::size_t>(cols, 1);
    const LinearFit* fit = nullptr;
    if (!by_t && cell.column < static_cast<int>(r.n_fits.size())) fit = &r.n_fits[static_cast<std::size_t>(cell.column)];
    if (!fit && ni < r.t_fits.size()) fit = &r.t_fits[ni];
    csv.row({fmt(c.d), fmt(c.p), fmt(cell.n), fmt(cell.t), fmt(cell.c), fit ? fmt(fit->slope) : "",
             fit ? fmt(fit->residual) : "", seed_field(c)});
  }
}

json scan_json(const ScanResult& r) {
  json cells = json::array();
  for (const ScanCell& s : r.cells) {
    cells.push_back({{"N", s.n},
                     {"column", s.column},
                     {"T", s.t},
                     {"C", s.c},
                     {"norm", s.norm},
                     {"l2", s.l2},
                     {"richardson_delta", s.richardson_delta},
                     {"time_steps", s.time_steps},
                     {"fast_path", s.fast_path}});
  }
  json tf = json::array(), nf = json::array();
  for (const auto& f : r.t_fits) tf.push_back(fit_json(f));
  for (const auto& f : r.n_fits) nf.push_back(fit_json(f));
  return {{"cells", cells}, {"t_fits", tf}, {"n_fits", nf}, {"columns", r.columns}};
}

const std::vector<std::string> kScanColumns = {"d", "p", "N", "T", "C", "fit_slope", "fit_residual", "seed"};

Output run_scan(const RunConfig& c, const std::string& hash) {
  Output o;
  ScanConfig sc;
  sc.beta = resolve_beta(c);
  sc.p = c.p;
  sc.profile = profile_kind_from_string(c.profile);
  sc.ns = c.ns;
  sc.ts = c.ts;
  sc.t_law = c.t_law;
  sc.t_multipliers = c.t_multipliers;
  sc.quad = c.quad;
  const ScanResult r = strichartz_scan(sc);
  const double predicted = std::max(0.0, c.d / 2.0 - (c.d + 2) / c.p);
  o.result = scan_json(r);
  o.result["beta"] = sc.beta;
  o.result["predicted_n_slope"] = predicted;
  Csv csv(hash, kScanColumns);
  scan_rows(csv, c, r, false);
  o.csv = csv.str();
  for (std::size_t col = 0; col < r.n_fits.size(); ++col) {
    const std::string name = "n_slope[" + std::to_string(col) + "]";
    const double s = r.n_fits[col].slope;
    o.checks.push_back(predicted == 0.0 ? Check{name, s, 0.0, tol(c, "slope"), "value <= target + tolerance",
                                                s <= tol(c, "slope")}
                                        : within(name, s, predicted, tol(c, "slope")));
  }
  return o;
}

Output run_optimality(const RunConfig& c, const std::string& hash) {
  Output o;
  const auto beta = resolve_beta(c);
  const OptimalityResult r =
      optimality_experiment(beta, static_cast<int>(c.p), c.eta, c.ns, c.quad);
  json tf = json::array();
  for (const auto& f : r.t_fits) tf.push_back(fit_json(f));
  o.result = {{"beta", beta},
              {"eta", r.eta},
              {"p", r.p},
              {"d", r.d},
              {"predicted", r.predicted},
              {"square_predicted", r.square_predicted},
              {"n_fit", fit_json(r.n_fit)},
              {"t0", r.t0},
              {"t_fits", tf},
              {"max_t_slope_error", r.max_t_slope_error},
              {"a0", r.a0},
              {"g_deviation", r.g_deviation},
              {"scan", scan_json(r.scan)}};
  Csv csv(hash, kScanColumns);
  scan_rows(csv, c, r.scan, true);
  o.csv = csv.str();
  o.checks.push_back(within("n_exponent", r.n_fit.slope, r.predicted, tol(c, "n_exponent")));
  o.checks.push_back(at_most("t_slope_error", r.max_t_slope_error, tol(c, "t_slope")));
  double gmax = 0.0;
  for (double g : r.g_deviation) gmax = std::max(gmax, g);
  o.checks.push_back(at_most("g_deviation", gmax, tol(c, "g_deviation")));
  return o;
}

Output run_levelset(const RunConfig& c, const std::string& hash) {
  Output o;
  const TorusParams params(resolve_beta(c));
  const LevelSetOptions opts{c.quad.time_step_constant, c.quad.spatial_points};
  json records = json::array();
  Csv csv(hash, {"N", "T", "lambda", "measure", "normalized"});
  double worst_error = 0.0;
  bool monotone = true;
  for (int n : c.ns) {
    const SpectralField field = profile_field(c, n);
    for (double t : horizons(c, n)) {
      const LevelSetRecord r = level_set_census(field, params, c.p, t, {}, opts);
      records.push_back({{"N", r.n},
                         {"T", r.horizon},
                         {"p", r.p},
                         {"lambdas", r.lambdas},
                         {"measures", r.measures},
                         {"normalized", r.normalized},
                         {"total_measure", r.total_measure},
                         {"power_integral", r.power_integral},
                         {"layer_cake", r.layer_cake},
                         {"layer_cake_error", r.layer_cake_error},
                         {"max_modulus", r.max_modulus},
                         {"split", r.split},
                         {"exponent", r.exponent},
                         {"high_max", r.high_max},
                         {"low_max", r.low_max},
                         {"time_samples", r.time_samples},
                         {"spatial_points", r.spatial_points}});
      for (std::size_t i = 0; i < r.lambdas.size(); ++i) {
        csv.row({fmt(n), fmt(t), fmt(r.lambdas[i]), fmt(r.measures[i]), fmt(r.normalized[i])});
        if (i && r.measures[i] > r.measures[i - 1]) monotone = false;
      }
      worst_error = std::max(worst_error, r.layer_cake_error);
    }
  }
  o.result = {{"records", records},
              {"note",
               "low-level regime uses the box-decomposition reading of the self-referential "
               "step in the level-set argument"}};
  o.csv = csv.str();
  o.checks.push_back(at_most("layer_cake_error", worst_error, tol(c, "layer_cake")));
  o.checks.push_back(at_least("monotone", monotone ? 1.0 : 0.0, 1.0));
  return o;
}

Output run_dioph(const RunConfig& c, const std::string&) {
  Output o;
  const GenericityMode mode = genericity_mode_from_string(c.mode.empty() ? "D1" : c.mode);
  std::vector<double> beta;
  int draws = 0;
  if (c.beta) {
    beta = *c.beta;
  } else {
    const GenericSample s = sample_generic_beta(c.effective_seed(), c.d);
    beta = s.beta;
    draws = s.draws;
  }
  const GenericityReport r = genericity_scan(beta, c.depth, mode);
  o.result = {{"beta", r.beta},
              {"K", r.depth},
              {"mode", to_string(r.mode)},
              {"constant", r.constant},
              {"witness", r.witness},
              {"non_generic", r.non_generic}};
  if (!c.beta) o.result["draws"] = draws;
  o.checks.push_back(at_least("constant", r.constant, tol(c, "constant")));
  return o;
}

Output run_refocus(const RunConfig& c, const std::string& hash) {
  Output o;
  const TorusParams params(resolve_beta(c));
  json rows = json::array();
  Csv csv(hash, {"N", "q", "defect", "bound", "found", "sup_initial", "sup_refocused", "ratio"});
  for (int n : c.ns) {
    const RepeakResult r = refocus_experiment(params, n, c.eta, c.eps);
    rows.push_back({{"N", n},
                    {"q", r.refocus.q},
                    {"defect", r.refocus.defect},
                    {"bound", r.refocus.bound},
                    {"found", r.refocus.found},
                    {"candidates_checked", r.refocus.candidates_checked},
                    {"sup_initial", r.sup_initial},
                    {"sup_refocused", r.sup_refocused},
                    {"ratio", r.ratio},
                    {"grid_points", r.grid_points}});
    csv.row({fmt(n), fmt(r.refocus.q), fmt(r.refocus.defect), fmt(r.refocus.bound), r.refocus.found ? "1" : "0",
             fmt(r.sup_initial), fmt(r.sup_refocused), fmt(r.ratio)});
    const std::string tag = "[N=" + std::to_string(n) + "]";
    o.checks.push_back({"defect" + tag, r.refocus.defect, c.eps, 0.0, "value < target", r.refocus.defect < c.eps});
    o.checks.push_back(at_least("repeak" + tag, r.ratio, tol(c, "repeak")));
  }
  o.result = {{"beta", std::vector<double>(params.beta().begin(), params.beta().end())},
              {"eta", c.eta},
              {"eps", c.eps},
              {"rows", rows}};
  o.csv = csv.str();
  return o;
}

RatioMode ratio_mode(const RunConfig& c) {
  if (c.mode.empty() || c.mode == "dispersive") return RatioMode::kDispersive;
  if (c.mode == "weyl") return RatioMode::kWeyl;
  if (c.mode == "kernel_sup") return RatioMode::kKernelSup;
  throw ConfigError("unknown ratio mode '" + c.mode + "'");
}

// Half-octave grids: dispersive t = 2^{-j/2}/N down to N^{-3}; kernel_sup
// t = (2/N) 2^{j/2} in (2/N, N^2); weyl t = frac(j / golden ratio), j = 1..64.
std::vector<double> ratio_time_grid(RatioMode mode, int n) {
  std::vector<double> ts;
  const double nn = static_cast<double>(n);
  if (mode == RatioMode::kWeyl) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int j = 1; j <= 64; ++j) ts.push_back(std::fmod(j * phi, 1.0));
  } else if (mode == RatioMode::kDispersive) {
    const int octaves = static_cast<int>(std::ceil(std::log2(nn)));
    for (int j = 0; j <= 4 * octaves; ++j) ts.push_back(std::exp2(-0.5 * j) / nn);
  } else {
    for (int j = 1;; ++j) {
      const double t = 2.0 / nn * std::exp2(0.5 * j);
      if (t >= nn * nn) break;
      ts.push_back(t);
    }
  }
  return ts;
}

// Maximum of the ratio (or of the measured value) over each octave [2^o, 2^{o+1}) of t.
std::map<int, double> octave_maxima(const RatioScan& scan, bool ratio) {
  std::map<int, double> out;
  for (const RatioRow& r : scan.rows) {
    double& m = out[static_cast<int>(std::floor(std::log2(r.t) + 1e-9))];
    m = std::max(m, ratio ? r.ratio : r.value);
  }
  return out;
}

// Largest rise of log2(max ratio) from one octave of t to the next.
double max_octave_increment(const RatioScan& scan) {
  const auto m = octave_maxima(scan, true);
  double worst = -INFINITY;
  for (auto it = m.begin(); std::next(it) != m.end(); ++it) {
    worst = std::max(worst, std::log2(std::next(it)->second / it->second));
  }
  return worst;
}

// log2(octave max of sup|K|) against the octave index.
LinearFit octave_sup_fit(const RatioScan& scan) {
  std::vector<double> x, y;
  for (const auto& [o, v] : octave_maxima(scan, false)) {
    x.push_back(o);
    y.push_back(std::log2(v));
  }
  return fit_line(x, y);
}

Output run_weyl(const RunConfig& c, const std::string& hash) {
  Output o;
  const RatioMode mode = ratio_mode(c);
  const TorusParams params(resolve_beta(c));
  Csv csv(hash, {"mode", "N", "t", "y_or_x", "value", "bound", "ratio"});
  json per_n = json::array();
  std::vector<double> ns, maxima;
  double worst_increment = -INFINITY;
  for (int n : c.ns) {
    const auto ts = ratio_time_grid(mode, n);
    const RatioScan scan = bound_ratio_scan(params, n, mode, ts, {});
    for (const RatioRow& r : scan.rows) {
      csv.row({to_string(r.mode), fmt(r.n), fmt(r.t), fmt(r.y), fmt(r.value), fmt(r.bound), fmt(r.ratio)});
    }
    json entry = {{"N", n}, {"max_ratio", scan.max_ratio}, {"argmax_t", scan.rows[scan.argmax].t}};
    if (mode == RatioMode::kKernelSup) {
      const double inc = max_octave_increment(scan);
      entry["max_octave_increment"] = inc;
      entry["octave_sup_fit"] = fit_json(octave_sup_fit(scan));
      worst_increment = std::max(worst_increment, inc);
    }
    per_n.push_back(entry);
    ns.push_back(n);
    maxima.push_back(scan.max_ratio);
  }
  o.result = {{"mode", to_string(mode)}, {"per_N", per_n}};
  if (ns.size() >= 2) {
    const LinearFit f = fit_loglog(ns, maxima);
    o.result["max_ratio_fit"] = fit_json(f);
    if (mode == RatioMode::kDispersive) o.checks.push_back(within("max_ratio_slope", f.slope, 0.0, tol(c, "slope")));
  }
  if (mode == RatioMode::kKernelSup) {
    o.checks.push_back(at_most("octave_increment", worst_increment, tol(c, "octave_increment")));
  }
  o.csv = csv.str();
  return o;
}

Output run_arcs(const RunConfig& c, const std::string& hash) {
  Output o;
  const TorusParams params(resolve_beta(c));
  Csv csv(hash, {"N", "k", "Q1", "Q2", "T", "density", "predicted", "ratio"});
  json rows = json::array();
  double low = INFINITY, high = 0.0, pair_excess = 0.0;
  const double t1 = c.ts.front(), t2 = c.ts.back();
  for (int n : c.ns) {
    const ArcSystem arcs(n);
    std::vector<int> levels;
    for (int q : arcs.levels()) {
      if (128 * q <= n) levels.push_back(q);
    }
    if (levels.empty()) throw ConfigError("arcs: N must be at least 128");
    const double envelope = std::pow(std::log(static_cast<double>(n)), tol(c, "polylog_power"));
    auto record = [&](std::vector<int> qs, double t) {
      const double density = arc_density(arcs, params, qs, t);
      double predicted = 1.0;
      for (int q : qs) predicted *= static_cast<double>(q) / n;
      const double ratio = density / predicted;
      rows.push_back({{"N", n}, {"qs", qs}, {"T", t}, {"density", density}, {"predicted", predicted}, {"ratio", ratio}});
      csv.row({fmt(n), fmt(static_cast<int>(qs.size())), fmt(qs[0]), qs.size() > 1 ? fmt(qs[1]) : "", fmt(t),
               fmt(density), fmt(predicted), fmt(ratio)});
      return ratio;
    };
    for (int q : levels) {
      const double r = record({q}, t1);
      low = std::min(low, r);
      high = std::max(high, r);
    }
    if (params.d() >= 2) {
      for (int q1 : levels) {
        for (int q2 : levels) pair_excess = std::max(pair_excess, record({q1, q2}, t2) / envelope);
      }
    }
  }
  o.result = {{"rows", rows}};
  o.csv = csv.str();
  o.checks.push_back(at_least("single_density_low", low, tol(c, "density_low")));
  o.checks.push_back(at_most("single_density_high", high, tol(c, "density_high")));
  if (params.d() >= 2) o.checks.push_back(at_most("pair_ratio_over_polylog", pair_excess, 1.0));
  return o;
}

json count_json(const CountRecord& r) {
  return {{"kind", to_string(r.kind)}, {"d", r.d},         {"N", r.n},
          {"A", r.a},                  {"K", r.k},         {"X", r.x},
          {"i", r.i},                  {"j", r.j},         {"lowest", r.lowest},
          {"count", r.count},          {"weighted", r.weighted}, {"bound", r.bound},
          {"ratio", r.ratio}};
}

void count_row(Csv& csv, const CountRecord& r) {
  csv.row({to_string(r.kind), fmt(r.d), fmt(r.n), fmt(r.a), fmt(r.k), join(r.x), join(r.i), fmt(r.j),
           r.lowest ? "1" : "0", fmt(r.count), fmt(r.weighted), fmt(r.bound), fmt(r.ratio)});
}

Output run_count(const RunConfig& c, const std::string& hash) {
  Output o;
  const TorusParams params(resolve_beta(c));
  Csv csv(hash, {"kind", "d", "N", "A", "K", "X", "i", "j", "lowest", "count", "weighted", "bound", "ratio"});
  json records = json::array();
  const std::string kind = c.mode.empty() ? "x_count" : c.mode;
  if (kind == "x_count") {
    double excess = 0.0;
    for (int k : c.ns) {
      const CountRecord r = x_count(params, k, c.a);
      records.push_back(count_json(r));
      count_row(csv, r);
      if (k >= 3) excess = std::max(excess, r.ratio / std::pow(std::log(static_cast<double>(k)), tol(c, "polylog_power")));
    }
    o.checks.push_back(at_most("ratio_over_polylog", excess, 1.0));
  } else if (kind == "lambda_A") {
    for (int n : c.ns) {
      const auto coeffs = normalized_constant_coeffs(c.d, n);
      for (const CountRecord& r : lambda_a_histogram(params, n, coeffs)) {
        records.push_back(count_json(r));
        count_row(csv, r);
      }
    }
  } else {
    throw ConfigError("unknown count mode '" + kind + "'");
  }
  o.result = {{"mode", kind}, {"records", records}};
  o.csv = csv.str();
  return o;
}

Output run_badness(const RunConfig& c, const std::string& hash) {
  Output o;
  const auto beta = resolve_beta(c);
  Csv csv(hash, {"K", "value", "terms", "census_max", "census_argmax"});
  json rows = json::array();
  std::vector<double> loglog, values;
  for (int k : c.ns) {
    const BadnessResult r = badness_sum(beta, k);
    rows.push_back({{"K", k},
                    {"value", r.value},
                    {"terms", r.terms},
                    {"census", r.census},
                    {"census_max", r.census_max},
                    {"census_argmax", r.census_argmax}});
    csv.row({fmt(k), fmt(r.value), fmt(r.terms), fmt(r.census_max), r.census_argmax});
    if (k >= 3) {
      loglog.push_back(std::log(std::log(static_cast<double>(k))));
      values.push_back(std::log(r.value));
    }
  }
  o.result = {{"beta", beta}, {"rows", rows}};
  if (loglog.size() >= 2) {
    const LinearFit f = fit_line(loglog, values);
    o.result["log_value_vs_loglog_K"] = fit_json(f);
    o.checks.push_back(at_most("loglog_slope", f.slope, tol(c, "loglog_slope")));
  }
  o.csv = csv.str();
  return o;
}

using Runner = std::function<Output(const RunConfig&, const std::string&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"theta", run_theta},     {"scan", run_scan},       {"optimality", run_optimality},
      {"levelset", run_levelset}, {"dioph", run_dioph},   {"refocus", run_refocus},
      {"weyl", run_weyl},       {"arcs", run_arcs},       {"count", run_count},
      {"badness", run_badness}};
  return table;
}

RunConfig make_defaults(const std::string& name, int d, double p, std::vector<int> ns, std::vector<double> ts) {
  RunConfig c;
  c.experiment = name;
  c.d = d;
  c.p = p;
  c.seed = 0;
  c.ns = std::move(ns);
  c.ts = std::move(ts);
  return c;
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> out;
  auto add = [&](CatalogEntry e) { out.push_back(std::move(e)); };
  add({"theta", "conjectured and proved Strichartz exponents in exact arithmetic", {"d", "p"}, {},
       make_defaults("theta", 2, 6.0, {1}, {1.0})});
  add({"scan", "C(N, T) = ||e^{it Delta} f||_{L^p} / ||f||_2 over an (N, T) grid",
       {"d", "p", "seed|beta", "N", "T|t_law", "t_multipliers", "quadrature", "profile"}, {{"slope", 0.15}},
       make_defaults("scan", 2, 4.0, {8, 16, 32, 64}, {1.0})});
  {
    RunConfig c = make_defaults("optimality", 2, 8.0, {8, 12, 16, 24}, {1.0});
    add({"optimality", "long-time refocusing scaling at T = N^{2d-2+eta}",
         {"d", "p", "seed|beta", "N", "eta", "quadrature"},
         {{"n_exponent", 0.15}, {"t_slope", 0.05}, {"g_deviation", 0.1}}, c});
  }
  {
    RunConfig c = make_defaults("levelset", 2, 4.0, {8}, {1.0});
    c.quad.time_step_constant = 1.0;
    add({"levelset", "superlevel-set census and layer-cake check",
         {"d", "p", "seed|beta", "N", "T|t_law", "quadrature", "profile"}, {{"layer_cake", 0.01}}, c});
  }
  {
    RunConfig c = make_defaults("dioph", 2, 4.0, {1}, {1.0});
    c.mode = "D1";
    add({"dioph", "measured genericity constant", {"d", "seed|beta", "depth", "mode"}, {{"constant", 1e-3}}, c});
  }
  add({"refocus", "refocusing time search and re-peaking of the peaked profile",
       {"d", "seed|beta", "N", "eta", "eps"}, {{"repeak", 0.5}}, make_defaults("refocus", 2, 4.0, {16}, {1.0})});
  {
    RunConfig c = make_defaults("weyl", 2, 4.0, {32, 64, 128, 256}, {1.0});
    c.mode = "dispersive";
    add({"weyl", "dispersive, Weyl and kernel-sup bound ratios", {"d", "seed|beta", "N", "mode"},
         {{"slope", 0.1}, {"octave_increment", 0.1}}, c});
  }
  add({"arcs", "major-arc densities; T list: [horizon for single arcs, horizon for pairs]",
       {"d", "seed|beta", "N", "T"}, {{"density_low", 0.25}, {"density_high", 16.0}, {"polylog_power", 3.0}},
       make_defaults("arcs", 2, 4.0, {1024}, {16.0, 64.0})});
  {
    RunConfig c = make_defaults("count", 2, 4.0, {16, 32, 64}, {1.0});
    c.mode = "x_count";
    add({"count", "exact lattice counts (mode x_count with N list = K list, or lambda_A)",
         {"d", "seed|beta", "N", "a", "mode"}, {{"polylog_power", 3.0}}, c});
  }
  add({"badness", "badness sum and E_ij census (N list = K list)", {"d", "seed|beta", "N"},
       {{"loglog_slope", 3.0}}, make_defaults("badness", 2, 4.0, {64, 256, 1024}, {1.0})});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void RunConfig::validate() const {
  if (!runners().count(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
  const int dmax = experiment == "theta" ? 16 : 4;
  if (d < 2 || d > dmax) throw ConfigError("d must be in 2.." + std::to_string(dmax));
  if (!is_finite(p) || p < 1.0) throw ConfigError("p must be finite and >= 1");
  if (seed && beta) throw ConfigError("seed and beta are mutually exclusive");
  if (beta) {
    if (static_cast<int>(beta->size()) != d) throw ConfigError("beta must have d entries");
    try {
      TorusParams check(*beta);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("invalid beta: ") + e.what());
    }
  }
  if (ns.empty()) throw ConfigError("N list is empty");
  for (int n : ns) {
    if (n < 1) throw ConfigError("N values must be >= 1");
  }
  if (t_law && !ts.empty()) throw ConfigError("T list and T-law are mutually exclusive");
  if (!t_law && ts.empty()) throw ConfigError("T list is empty");
  for (double t : ts) {
    if (!is_finite(t) || t <= 0.0) throw ConfigError("T values must be positive");
  }
  if (t_law && (!is_finite(t_law->c) || t_law->c <= 0.0 || !is_finite(t_law->alpha))) {
    throw ConfigError("T-law needs c > 0 and finite alpha");
  }
  if (t_multipliers.empty()) throw ConfigError("T multiplier list is empty");
  for (double m : t_multipliers) {
    if (!is_finite(m) || m <= 0.0) throw ConfigError("T multipliers must be positive");
  }
  if (!is_finite(quad.time_step_constant) || quad.time_step_constant <= 0.0) {
    throw ConfigError("time_step_constant must be positive");
  }
  if (quad.spatial_points < 0) throw ConfigError("spatial_points must be >= 0");
  if (profile != "peaked" && profile != "plane_wave") throw ConfigError("profile must be peaked or plane_wave");
  if (!is_finite(eta) || eta <= 0.0) throw ConfigError("eta must be positive");
  if (!is_finite(eps) || eps <= 0.0 || eps >= 1.0) throw ConfigError("eps must be in (0, 1)");
  if (depth < 1) throw ConfigError("depth must be >= 1");
  if (!is_finite(a) || a <= 0.0) throw ConfigError("a must be positive");
  const CatalogEntry& entry = catalog_entry(experiment);
  for (const auto& [name, value] : tolerances) {
    if (!entry.tolerances.count(name)) throw ConfigError("unknown tolerance '" + name + "' for " + experiment);
    if (!is_finite(value)) throw ConfigError("tolerance '" + name + "' is not finite");
  }
  if (experiment == "optimality" && (!is_even_integer(p) || p <= 6.0)) {
    throw ConfigError("optimality needs an even integer p > 6");
  }
  if (experiment == "dioph" && !mode.empty() && mode != "D1" && mode != "D2" && mode != "D3") {
    throw ConfigError("dioph mode must be D1, D2 or D3");
  }
  if (experiment == "weyl" && !mode.empty() && mode != "dispersive" && mode != "weyl" && mode != "kernel_sup") {
    throw ConfigError("weyl mode must be dispersive, weyl or kernel_sup");
  }
  if (experiment == "count" && !mode.empty() && mode != "x_count" && mode != "lambda_A") {
    throw ConfigError("count mode must be x_count or lambda_A");
  }
  if (experiment == "arcs") {
    if (t_law) throw ConfigError("arcs needs an explicit T list");
    for (double t : ts) {
      if (t < 1.0) throw ConfigError("arcs horizons must be >= 1");
    }
  }
}

json to_json(const RunConfig& c) {
  json j = {{"experiment", c.experiment},
            {"d", c.d},
            {"p", c.p},
            {"N", c.ns},
            {"T", c.ts},
            {"t_multipliers", c.t_multipliers},
            {"quadrature",
             {{"time_step_constant", c.quad.time_step_constant}, {"spatial_points", c.quad.spatial_points}}},
            {"profile", c.profile},
            {"mode", c.mode},
            {"eta", c.eta},
            {"eps", c.eps},
            {"depth", c.depth},
            {"a", c.a},
            {"output_dir", c.output_dir},
            {"tolerances", c.tolerances}};
  if (c.seed) j["seed"] = *c.seed;
  if (c.beta) j["beta"] = *c.beta;
  if (c.t_law) j["t_law"] = {{"c", c.t_law->c}, {"alpha", c.t_law->alpha}};
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "experiment") c.experiment = v.get<std::string>();
      else if (key == "d") c.d = v.get<int>();
      else if (key == "p") c.p = v.get<double>();
      else if (key == "seed") { if (!v.is_null()) c.seed = v.get<std::uint64_t>(); }
      else if (key == "beta") { if (!v.is_null()) c.beta = v.get<std::vector<double>>(); }
      else if (key == "N") c.ns = v.get<std::vector<int>>();
      else if (key == "T") c.ts = v.get<std::vector<double>>();
      else if (key == "t_law") {
        if (!v.is_null()) c.t_law = TLaw{v.at("c").get<double>(), v.at("alpha").get<double>()};
      } else if (key == "t_multipliers") c.t_multipliers = v.get<std::vector<double>>();
      else if (key == "quadrature") {
        for (const auto& [qk, qv] : v.items()) {
          if (qk == "time_step_constant") c.quad.time_step_constant = qv.get<double>();
          else if (qk == "spatial_points") c.quad.spatial_points = qv.get<int>();
          else throw ConfigError("unknown quadrature key '" + qk + "'");
        }
      } else if (key == "profile") c.profile = v.get<std::string>();
      else if (key == "mode") c.mode = v.get<std::string>();
      else if (key == "eta") c.eta = v.get<double>();
      else if (key == "eps") c.eps = v.get<double>();
      else if (key == "depth") c.depth = v.get<int>();
      else if (key == "a") c.a = v.get<double>();
      else if (key == "output_dir") c.output_dir = v.get<std::string>();
      else if (key == "tolerances") c.tolerances = v.get<std::map<std::string, double>>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::string canonical_config(const RunConfig& config) {
  json j = to_json(config);
  j.erase("output_dir");
  return j.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_config(config))));
  return buf;
}

std::vector<double> resolve_beta(const RunConfig& config) {
  if (config.beta) return *config.beta;
  return sample_generic_beta(config.effective_seed(), config.d).beta;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const CatalogEntry& e : catalog()) {
    if (e.name == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

json catalog_json() {
  json arr = json::array();
  for (const CatalogEntry& e : catalog()) {
    arr.push_back({{"name", e.name},
                   {"description", e.description},
                   {"parameters", e.parameters},
                   {"tolerances", e.tolerances},
                   {"defaults", to_json(e.defaults)}});
  }
  return arr;
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

RunReport run_experiment(const RunConfig& config) {
  config.validate();
  const std::string hash = config_hash(config);
  Output out = runners().at(config.experiment)(config, hash);
  RunReport report;
  report.result = std::move(out.result);
  report.checks = std::move(out.checks);
  json checks = json::array();
  for (const Check& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"target", c.target},
                      {"tolerance", c.tolerance},
                      {"relation", c.relation},
                      {"pass", c.pass}});
  }
  const json doc = {{"config_hash", hash},
                    {"experiment", config.experiment},
                    {"result", report.result},
                    {"checks", checks},
                    {"passed", report.passed()}};
  report.artifacts.push_back({config.experiment + ".json", doc.dump(2) + "\n"});
  if (!out.csv.empty()) report.artifacts.push_back({config.experiment + ".csv", out.csv});
  return report;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_artifacts(const RunConfig& config, const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  const std::string hash = config_hash(config);
  json cfg = to_json(config);
  cfg.erase("output_dir");
  write_file(root / "config.json", json{{"config_hash", hash}, {"config", cfg}}.dump(2) + "\n");
  std::vector<std::string> names;
  for (const Artifact& a : report.artifacts) {
    write_file(root / a.name, a.content);
    names.push_back(a.name);
  }
  const json prov = {{"config_hash", hash},
                     {"code_version", IRTORUS_VERSION},
                     {"created_utc", utc_now()},
                     {"workers", worker_count()},
                     {"artifacts", names}};
  write_file(root / "provenance.json", prov.dump(2) + "\n");
}

VerifyResult verify_artifacts(const std::string& dir) {
  namespace fs = std::filesystem;
  VerifyResult v;
  const fs::path root(dir);
  try {
    const json cfg = json::parse(read_file(root / "config.json"));
    const RunConfig config = config_from_json(cfg.at("config"));
    v.hash = config_hash(config);
    if (cfg.at("config_hash").get<std::string>() != v.hash) {
      v.problems.push_back("config.json: stored hash differs from the recomputed " + v.hash);
    }
    const json prov = json::parse(read_file(root / "provenance.json"));
    if (prov.at("config_hash").get<std::string>() != v.hash) v.problems.push_back("provenance.json: hash mismatch");
    for (const auto& name : prov.at("artifacts")) {
      const std::string file = name.get<std::string>();
      const std::string text = read_file(root / file);
      std::string embedded;
      if (file.size() > 4 && file.substr(file.size() - 4) == ".csv") {
        const std::string prefix = "# config_hash=";
        const auto eol = text.find('\n');
        if (text.compare(0, prefix.size(), prefix) == 0 && eol != std::string::npos) {
          embedded = text.substr(prefix.size(), eol - prefix.size());
        }
      } else {
        embedded = json::parse(text).value("config_hash", std::string());
      }
      if (embedded != v.hash) v.problems.push_back(file + ": hash mismatch");
      v.checked.push_back(file);
    }
  } catch (const std::exception& e) {
    v.problems.push_back(e.what());
  }
  v.ok = v.problems.empty();
  return v;
}

json error_record(const std::string& type, const std::string& message) {
  return {{"status", "error"}, {"error", {{"type", type}, {"message", message}}}};
}

}  // namespace irtorus
