// irtorus: run, list and verify experiments.
//
//   irtorus list
//   irtorus run --experiment scan --d 2 --p 4 --T 1 --N 8,16,32,64 --check
//   irtorus run --config cfg.json --out results/
//   irtorus verify --dir results/
//
// Exit codes: 0 success, 1 error (JSON error record on stdout), 2 failed
// check in --check mode or hash mismatch in verify.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "irtorus/run.h"

namespace {

using irtorus::ConfigError;
using irtorus::RunConfig;
using nlohmann::json;

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>) {
        out.push_back(std::stoi(item, &used));
      } else {
        out.push_back(std::stod(item, &used));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad " + what + " entry '" + item + "'");
    }
  }
  return out;
}

struct RunOptions {
  std::string config_file;
  std::string experiment;
  std::optional<int> d;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> beta, ns, ts, t_law, t_mult;
  std::optional<double> dt_constant, eta, eps, a;
  std::optional<int> spatial_points, depth;
  std::optional<std::string> profile, mode, out;
  std::vector<std::string> tolerances;
  bool check = false;
  bool dry_run = false;
};

RunConfig build_config(const RunOptions& o) {
  RunConfig c;
  if (!o.config_file.empty()) {
    std::ifstream f(o.config_file);
    if (!f) throw ConfigError("cannot read config file " + o.config_file);
    json j;
    try {
      f >> j;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config file is not JSON: ") + e.what());
    }
    c = irtorus::config_from_json(j);
    if (!o.experiment.empty()) c.experiment = o.experiment;
  } else {
    if (o.experiment.empty()) throw ConfigError("--experiment or --config is required");
    c = irtorus::catalog_entry(o.experiment).defaults;
  }
  if (o.d) c.d = *o.d;
  if (o.p) c.p = *o.p;
  if (o.beta) {
    c.beta = parse_list<double>(*o.beta, "beta");
    if (!o.seed) c.seed.reset();
  }
  if (o.seed) c.seed = *o.seed;
  if (o.ns) c.ns = parse_list<int>(*o.ns, "N");
  if (o.t_law) {
    const auto v = parse_list<double>(*o.t_law, "t-law");
    if (v.size() != 2) throw ConfigError("--t-law takes c,alpha");
    c.t_law = irtorus::TLaw{v[0], v[1]};
    if (!o.ts) c.ts.clear();
  }
  if (o.ts) c.ts = parse_list<double>(*o.ts, "T");
  if (o.t_mult) c.t_multipliers = parse_list<double>(*o.t_mult, "T multiplier");
  if (o.dt_constant) c.quad.time_step_constant = *o.dt_constant;
  if (o.spatial_points) c.quad.spatial_points = *o.spatial_points;
  if (o.profile) c.profile = *o.profile;
  if (o.mode) c.mode = *o.mode;
  if (o.eta) c.eta = *o.eta;
  if (o.eps) c.eps = *o.eps;
  if (o.depth) c.depth = *o.depth;
  if (o.a) c.a = *o.a;
  if (o.out) c.output_dir = *o.out;
  for (const std::string& t : o.tolerances) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("--tol takes name=value");
    const auto v = parse_list<double>(t.substr(eq + 1), "tolerance");
    if (v.size() != 1) throw ConfigError("--tol takes name=value");
    c.tolerances[t.substr(0, eq)] = v[0];
  }
  return c;
}

int fail(const std::string& type, const std::string& message) {
  std::cout << irtorus::error_record(type, message).dump(2) << std::endl;
  return 1;
}

int do_run(const RunOptions& o) {
  try {
    const RunConfig config = build_config(o);
    config.validate();
    if (o.dry_run) {
      std::cout << json{{"config_hash", irtorus::config_hash(config)}, {"config", irtorus::to_json(config)}}.dump(2)
                << std::endl;
      return 0;
    }
    const irtorus::RunReport report = irtorus::run_experiment(config);
    irtorus::write_artifacts(config, report, config.output_dir);
    std::cout << report.artifacts.front().content;
    if (o.check && !report.passed()) return 2;
    return 0;
  } catch (const ConfigError& e) {
    return fail("invalid_config", e.what());
  } catch (const std::exception& e) {
    return fail("runtime_error", e.what());
  }
}

int do_verify(const std::string& dir) {
  const irtorus::VerifyResult v = irtorus::verify_artifacts(dir);
  std::cout << json{{"status", v.ok ? "ok" : "mismatch"},
                    {"config_hash", v.hash},
                    {"checked", v.checked},
                    {"problems", v.problems}}
                   .dump(2)
            << std::endl;
  return v.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strichartz laboratory on rectangular tori"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "Print the experiment catalog as JSON");

  RunOptions o;
  auto* run = app.add_subcommand("run", "Run one experiment and write its artifacts");
  run->add_option("--config", o.config_file, "JSON config file (flags below override it)");
  run->add_option("--experiment", o.experiment, "Catalog name; starts from its defaults");
  run->add_option("--d", o.d, "Dimension");
  run->add_option("--p", o.p, "Lebesgue exponent");
  run->add_option("--seed", o.seed, "Seed of the generic coefficient draw");
  run->add_option("--beta", o.beta, "Explicit coefficients, comma separated");
  run->add_option("--N", o.ns, "N list (K list for count and badness), comma separated");
  run->add_option("--T", o.ts, "Horizon list, comma separated");
  run->add_option("--t-law", o.t_law, "T = c N^alpha, given as c,alpha");
  run->add_option("--t-mult", o.t_mult, "Multipliers applied to the T-law horizon");
  run->add_option("--dt-constant", o.dt_constant, "Time step constant c");
  run->add_option("--spatial-points", o.spatial_points, "Spatial points per dimension (0: automatic)");
  run->add_option("--profile", o.profile, "peaked or plane_wave");
  run->add_option("--mode", o.mode, "Experiment mode");
  run->add_option("--eta", o.eta, "eta");
  run->add_option("--eps", o.eps, "Refocusing tolerance");
  run->add_option("--depth", o.depth, "Genericity scan depth K");
  run->add_option("--a", o.a, "Threshold A for counts");
  run->add_option("--out", o.out, "Output directory");
  run->add_option("--tol", o.tolerances, "Tolerance override name=value (repeatable)");
  run->add_flag("--check", o.check, "Exit 2 when a check fails");
  run->add_flag("--dry-run", o.dry_run, "Validate and print the resolved config");

  std::string dir = "out";
  auto* verify = app.add_subcommand("verify", "Re-check the config hash embedded in artifacts");
  verify->add_option("--dir", dir, "Artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  if (list->parsed()) {
    std::cout << irtorus::catalog_json().dump(2) << std::endl;
    return 0;
  }
  if (run->parsed()) return do_run(o);
  if (verify->parsed()) return do_verify(dir);
  return 1;
}
