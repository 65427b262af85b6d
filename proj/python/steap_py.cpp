// Python bindings. Structured data crosses the boundary as JSON text; the
// package wrapper turns it into dicts.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "steap/bench/bench.hpp"
#include "steap/gp/gp_prior.hpp"
#include "steap/runtime/runner.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace steap;

namespace {

runtime::ProblemSpec problem_from(const std::string& text) {
  runtime::ProblemSpec p = runtime::ProblemSpec::benchmark_default();
  if (!text.empty()) json::parse(text).get_to(p);
  p.gp.dt_default = p.dt();
  return p;
}

std::string run(const std::string& mode, const std::string& problem, const std::string& sim_text) {
  const runtime::ProblemSpec p = problem_from(problem);
  runtime::SimConfig sim;
  if (!sim_text.empty()) json::parse(sim_text).get_to(sim);
  runtime::RunRecord rec;
  {
    py::gil_scoped_release release;
    rec = runtime::run_mode(runtime::run_mode_from_string(mode), p, sim);
  }
  return json{{"metrics", runtime::compute_metrics(rec, p)}, {"record", rec}}.dump();
}

std::string run_bench(const std::string& config) {
  bench::BenchConfig cfg;
  if (!config.empty()) json::parse(config).get_to(cfg);
  cfg.validate();
  bench::BenchResult res;
  {
    py::gil_scoped_release release;
    res = bench::run_benchmark(cfg);
  }
  return json{{"aggregate", bench::aggregate_csv(res.rows)}, {"runs", bench::runs_csv(res.runs)},
              {"timing", bench::timing_csv(res.rows)}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_steap, m) {
  m.doc() = "Sparse factor-graph trajectory estimation and planning";

  py::register_exception<bench::WorldGenerationError>(m, "WorldGenerationError", PyExc_RuntimeError);

  m.def("default_problem", [] { return json(runtime::ProblemSpec::benchmark_default()).dump(); });
  m.def("default_bench_config", [] { return json(bench::BenchConfig{}).dump(); });
  m.def("generate_world", [](std::uint64_t seed, const std::string& problem) {
    return json(bench::generate_world(seed, bench::WorldTemplate{}, problem_from(problem))).dump();
  }, py::arg("seed"), py::arg("problem") = "");
  m.def("run", &run, py::arg("mode"), py::arg("problem") = "", py::arg("sim") = "");
  m.def("bench", &run_bench, py::arg("config") = "");
  m.def("render_svg", [](const std::string& record, int snapshot) {
    return bench::render_svg(json::parse(record).get<runtime::RunRecord>(), snapshot);
  }, py::arg("record"), py::arg("snapshot") = -1);

  m.def("se2_exp", [](const Vector3& xi) {
    const Se2Pose p = Se2Pose::exp(xi);
    return Vector3(p.x(), p.y(), p.yaw());
  });
  m.def("se2_log", [](const Vector3& pose) { return Se2Pose(pose[0], pose[1], pose[2]).log(); });
  m.def("gp_interp_coeffs", [](double dt, double tau, const Matrix& qc) {
    const gp::GpInterpCoeffs c = gp::gp_interp_coeffs(dt, tau, qc);
    return py::make_tuple(c.lambda, c.psi);
  });
  m.def("process_noise_cov", &gp::process_noise_cov);
  m.def("transition_matrix", &gp::transition_matrix);
}
