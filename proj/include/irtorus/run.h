#pragma once

// Configuration-driven runs: the RunConfig schema, the experiment catalog,
// dispatch, artifact writing and hash verification.
//
// A run is a pure function of its config. Artifacts carry the config hash
// (FNV-1a 64 of the canonical config JSON) and nothing time- or
// host-dependent; timestamps and the code version go to provenance.json.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "irtorus/experiments.h"

namespace irtorus {

/// The config does not validate (or does not parse).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string experiment;
  int d = 2;
  double p = 4.0;
  /// Seed for sample_generic_beta; mutually exclusive with `beta`.
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> beta;
  std::vector<int> ns;
  /// Explicit horizons; mutually exclusive with `t_law`.
  std::vector<double> ts;
  std::optional<TLaw> t_law;
  std::vector<double> t_multipliers{1.0};
  QuadratureSpec quad;
  std::string profile = "peaked";
  /// Experiment-specific mode (genericity condition, ratio mode, count kind).
  std::string mode;
  double eta = 0.5;
  double eps = 0.1;
  /// Search depth K (dioph).
  int depth = 4096;
  /// Threshold A (count).
  double a = 1.0;
  /// Written next to the artifacts but excluded from the hash.
  std::string output_dir = "out";
  std::map<std::string, double> tolerances;

  /// Throws ConfigError.
  void validate() const;
  /// Seed 0 when neither seed nor beta is given.
  std::uint64_t effective_seed() const { return seed.value_or(0); }
};

nlohmann::json to_json(const RunConfig& config);
/// Unknown keys are rejected; missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);

/// Sorted-key compact JSON of the config without output_dir.
std::string canonical_config(const RunConfig& config);
std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits of fnv1a64(canonical_config(config)).
std::string config_hash(const RunConfig& config);

/// The coefficient vector of a run: the override, or the seeded generic draw.
std::vector<double> resolve_beta(const RunConfig& config);

struct CatalogEntry {
  std::string name;
  std::string description;
  /// Config fields the experiment reads.
  std::vector<std::string> parameters;
  /// Tolerance names with their default values.
  std::map<std::string, double> tolerances;
  RunConfig defaults;
};

/// Every experiment, in a fixed order.
const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);
nlohmann::json catalog_json();

struct Check {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  /// Human-readable relation, e.g. "|value - target| <= tolerance".
  std::string relation;
  bool pass = false;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct RunReport {
  nlohmann::json result;
  std::vector<Check> checks;
  /// <experiment>.json (and <experiment>.csv for grid-shaped results).
  std::vector<Artifact> artifacts;
  bool passed() const;
};

/// Validates and runs. Deterministic for any worker count.
RunReport run_experiment(const RunConfig& config);

/// "%.17g", or an empty field for NaN.
std::string format_double(double x);

/// Writes the artifacts plus config.json and provenance.json to `dir`
/// (created if needed).
void write_artifacts(const RunConfig& config, const RunReport& report, const std::string& dir);

struct VerifyResult {
  bool ok = false;
  std::string hash;
  std::vector<std::string> checked;
  std::vector<std::string> problems;
};

/// Re-reads config.json from `dir`, recomputes its hash and compares it with
/// the hash embedded in every artifact listed in provenance.json.
VerifyResult verify_artifacts(const std::string& dir);

/// Machine-readable error record.
nlohmann::json error_record(const std::string& type, const std::string& message);

}  // namespace irtorus
