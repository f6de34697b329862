#include "irtorus/run.h"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "irtorus/parallel.h"

namespace irtorus {
namespace {

namespace fs = std::filesystem;

RunConfig theta_config() {
  RunConfig c = catalog_entry("theta").defaults;
  c.d = 2;
  c.p = 6.0;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("irtorus_run_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

TEST(Catalog, ContainsEveryExperimentInFixedOrder) {
  std::vector<std::string> names;
  for (const auto& e : catalog()) names.push_back(e.name);
  const std::vector<std::string> expected = {"theta",   "scan", "optimality", "levelset", "dioph",
                                             "refocus", "weyl", "arcs",       "count",    "badness"};
  EXPECT_EQ(names, expected);
  EXPECT_EQ(catalog_json().dump(), catalog_json().dump());
}

TEST(Catalog, DefaultsValidate) {
  for (const auto& e : catalog()) {
    EXPECT_NO_THROW(e.defaults.validate()) << e.name;
    EXPECT_EQ(e.defaults.experiment, e.name);
  }
}

TEST(Config, RoundTripsThroughJson) {
  RunConfig c = catalog_entry("scan").defaults;
  c.seed.reset();
  c.beta = std::vector<double>{1.0, 1.1597933633704609};
  c.ts.clear();
  c.t_law = TLaw{0.7, 2.5};
  c.t_multipliers = {1.0, 1.5, 4.0};
  c.quad.time_step_constant = 0.1;
  c.tolerances["slope"] = 0.1;
  c.output_dir = "elsewhere";
  const RunConfig back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(*back.beta, *c.beta);
  EXPECT_EQ(back.t_law->c, 0.7);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, HashIgnoresOutputDirOnly) {
  RunConfig a = theta_config(), b = theta_config();
  b.output_dir = "somewhere/else";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.p = 5.0;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Config, ValidationRejectsBadConfigs) {
  auto bad = [](auto mutate) {
    RunConfig c = catalog_entry("scan").defaults;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](RunConfig& c) { c.ns.clear(); }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.ts.clear(); }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.beta = std::vector<double>{1.0, 1.5}; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.experiment = "nope"; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.tolerances["nope"] = 1.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.t_law = TLaw{1.0, 2.0}; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.d = 5; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) { c.profile = "flat"; }).validate(), ConfigError);
  EXPECT_THROW(bad([](RunConfig& c) {
                 c.seed.reset();
                 c.beta = std::vector<double>{1.0};
               }).validate(),
               ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "scan"}, {"bogus", 1}}), ConfigError);
  RunConfig opt = catalog_entry("optimality").defaults;
  opt.p = 6.0;
  EXPECT_THROW(opt.validate(), ConfigError);
}

TEST(Run, ThetaExample) {
  const RunReport r = run_experiment(theta_config());
  EXPECT_EQ(r.result["theta_conj"].get<double>(), 2.0);
  EXPECT_EQ(r.result["theta_proved"].get<double>(), 2.0);
  EXPECT_EQ(r.result["exact"]["p_star"].get<std::string>(), "4");
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.artifacts.size(), 2u);
  EXPECT_EQ(r.artifacts[0].name, "theta.json");
  EXPECT_EQ(r.artifacts[1].content.rfind("# config_hash=" + config_hash(theta_config()), 0), 0u);
}

TEST(Run, ThetaRationalP) {
  RunConfig c = theta_config();
  c.d = 4;
  c.p = 3.5;
  const RunReport r = run_experiment(c);
  EXPECT_EQ(r.result["exact"]["theta1"].get<std::string>(), "6/17");
}

TEST(Run, ScanCsvColumns) {
  RunConfig c = catalog_entry("scan").defaults;
  c.ns = {4, 6};
  const RunReport r = run_experiment(c);
  ASSERT_EQ(r.artifacts.size(), 2u);
  const std::string& csv = r.artifacts[1].content;
  EXPECT_NE(csv.find("\nd,p,N,T,C,fit_slope,fit_residual,seed\n"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].name, "n_slope[0]");
}

TEST(Run, FailingCheckIsReported) {
  RunConfig c = catalog_entry("dioph").defaults;
  c.seed.reset();
  c.beta = std::vector<double>{1.0, 1.5};
  c.depth = 16;
  const RunReport r = run_experiment(c);
  EXPECT_FALSE(r.passed());
}

TEST(Run, ArtifactsAreIdenticalAcrossWorkerCounts) {
  RunConfig c = catalog_entry("levelset").defaults;
  c.ns = {4};
  std::vector<std::string> blobs;
  const int saved = worker_count();
  for (int w : {1, 4}) {
    set_worker_count(w);
    const RunReport r = run_experiment(c);
    std::string all;
    for (const auto& a : r.artifacts) all += a.name + "\n" + a.content;
    blobs.push_back(all);
  }
  set_worker_count(saved);
  EXPECT_EQ(blobs[0], blobs[1]);
}

TEST(Artifacts, VerifyAcceptsAndDetectsTampering) {
  const fs::path dir = scratch("verify");
  const RunConfig c = theta_config();
  write_artifacts(c, run_experiment(c), dir.string());
  for (const char* f : {"config.json", "provenance.json", "theta.json", "theta.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  VerifyResult v = verify_artifacts(dir.string());
  EXPECT_TRUE(v.ok);
  EXPECT_EQ(v.checked.size(), 2u);
  EXPECT_EQ(v.hash, config_hash(c));

  std::string cfg = slurp(dir / "config.json");
  const auto pos = cfg.find("\"p\": 6.0");
  ASSERT_NE(pos, std::string::npos);
  cfg.replace(pos, 8, "\"p\": 5.0");
  std::ofstream(dir / "config.json", std::ios::binary) << cfg;
  v = verify_artifacts(dir.string());
  EXPECT_FALSE(v.ok);
  EXPECT_GE(v.problems.size(), 3u);
  fs::remove_all(dir);
}

TEST(Artifacts, ErrorRecordShape) {
  const auto e = error_record("invalid_config", "N list is empty");
  EXPECT_EQ(e["status"], "error");
  EXPECT_EQ(e["error"]["type"], "invalid_config");
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::nan("")), "");
}

}  // namespace
}  // namespace irtorus
