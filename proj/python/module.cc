#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irtorus/counting.h"
#include "irtorus/diophantine.h"
#include "irtorus/experiments.h"
#include "irtorus/expsum.h"
#include "irtorus/parallel.h"
#include "irtorus/run.h"

namespace py = pybind11;
using namespace irtorus;

namespace {

py::dict theta(int d, std::int64_t num, std::int64_t den) {
  const ExponentTable t = theta_exponents(d, Rational(num, den));
  py::dict out;
  out["d"] = t.d;
  out["p"] = t.p.to_string();
  out["p_star"] = t.p_star.to_string();
  out["theta_conj"] = t.theta_conj.to_string();
  out["theta_proved"] = t.theta_proved.to_string();
  out["theta1"] = t.theta1.to_string();
  out["theta2"] = t.theta2.to_string();
  return out;
}

RunConfig parse(const std::string& config_json) {
  return config_from_json(nlohmann::json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the irtorus laboratory";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("worker_count", &worker_count);
  m.def("set_worker_count", &set_worker_count, py::arg("workers"));

  m.def("theta_exponents", &theta, py::arg("d"), py::arg("p_num"), py::arg("p_den") = 1,
        "Exponent table at p = p_num / p_den; values are exact rationals as strings.");

  m.def("nearest_int_dist", &nearest_int_dist, py::arg("x"));
  m.def(
      "dirichlet_approx",
      [](double t, std::int64_t n) {
        const RationalApprox r = dirichlet_approx(t, n);
        return py::make_tuple(r.a, r.q, r.delta);
      },
      py::arg("t"), py::arg("n"));
  m.def(
      "sample_generic_beta",
      [](std::uint64_t seed, int d, double threshold, int depth) {
        const GenericSample s = sample_generic_beta(seed, d, threshold, depth);
        py::dict out;
        out["beta"] = s.beta;
        out["constant"] = s.report.constant;
        out["draws"] = s.draws;
        return out;
      },
      py::arg("seed"), py::arg("d"), py::arg("threshold") = 1e-3, py::arg("depth") = 4096);

  m.def("weyl_sum", py::overload_cast<double, double, int>(&weyl_sum), py::arg("y"), py::arg("t"), py::arg("n"));
  m.def(
      "kernel_sup",
      [](std::vector<double> beta, double t, int n) { return kernel_sup(TorusParams(std::move(beta)), t, n); },
      py::arg("beta"), py::arg("t"), py::arg("n"));

  m.def(
      "eisenstein_triple_count",
      [](std::int64_t m_, std::int64_t s, std::int64_t range) { return eisenstein_triple_count({m_, s}, range); },
      py::arg("m"), py::arg("s"), py::arg("range"));
  m.def(
      "x_count",
      [](std::vector<double> beta, std::int64_t k, double a) { return x_count(TorusParams(std::move(beta)), k, a).count; },
      py::arg("beta"), py::arg("k"), py::arg("a"));
  m.def(
      "badness_sum",
      [](const std::vector<double>& beta, std::int64_t k) {
        const BadnessResult r = badness_sum(beta, k);
        py::dict out;
        out["value"] = r.value;
        out["terms"] = r.terms;
        out["census"] = r.census;
        out["census_max"] = r.census_max;
        return out;
      },
      py::arg("beta"), py::arg("k"));

  // JSON strings cross the boundary; the Python package decodes them.
  m.def("_catalog_json", [] { return catalog_json().dump(); });
  m.def("_config_hash", [](const std::string& c) { return config_hash(parse(c)); });
  m.def("_validate", [](const std::string& c) { parse(c).validate(); });
  m.def(
      "_run_json",
      [](const std::string& c, bool write) {
        const RunConfig config = parse(c);
        RunReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(config);
        }
        if (write) write_artifacts(config, report, config.output_dir);
        return report.artifacts.front().content;
      },
      py::arg("config"), py::arg("write") = false);
  m.def("_verify_json", [](const std::string& dir) {
    const VerifyResult v = verify_artifacts(dir);
    return nlohmann::json{{"ok", v.ok}, {"config_hash", v.hash}, {"checked", v.checked}, {"problems", v.problems}}
        .dump();
  });
}
