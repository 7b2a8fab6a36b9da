#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "normtail/harness.hpp"
#include "normtail/verify.hpp"

namespace py = pybind11;
using namespace normtail;

namespace {

py::dict trajectory_dict(const Trajectory& traj) {
  py::dict d;
  d["algo"] = std::string(to_string(traj.algo));
  d["T"] = traj.T;
  d["avg_grad_norm"] = traj.avg_grad_norm;
  d["final_grad_norm"] = traj.final_grad_norm;
  d["final_f_gap"] = traj.final_f_gap;
  d["w_final"] = traj.w_final;
  if (!traj.grad_norms.empty()) {
    d["grad_norms"] = traj.grad_norms;
    d["f_gaps"] = traj.f_gaps;
    d["eps_norms"] = traj.eps_norms;
    d["displacements"] = traj.displacements;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(normtail, m) {
  m.doc() = "Normalized/clipped SGD methods under heavy-tailed gradient noise";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_FloatingPointError);

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def_readonly("name", &ProblemSpec::name)
      .def_readonly("dim", &ProblemSpec::dim)
      .def_readonly("lipschitz_L", &ProblemSpec::lipschitz_L)
      .def_readonly("f_min", &ProblemSpec::f_min)
      .def_readonly("w0", &ProblemSpec::w0)
      .def_readonly("grad_w0_norm", &ProblemSpec::grad_w0_norm);

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def_readonly("p", &NoiseSpec::p)
      .def_readonly("sigma", &NoiseSpec::sigma)
      .def_readonly("alpha", &NoiseSpec::alpha)
      .def_property_readonly("family", [](const NoiseSpec& s) {
        return std::string(to_string(s.family));
      });

  py::class_<HyperParams>(m, "HyperParams")
      .def_readonly("theta", &HyperParams::theta)
      .def_readonly("gamma", &HyperParams::gamma)
      .def_readonly("h", &HyperParams::h)
      .def_readonly("zeta", &HyperParams::zeta)
      .def_readonly("T", &HyperParams::T)
      .def_property_readonly("source", [](const HyperParams& hp) {
        return std::string(to_string(hp.source));
      });

  m.def(
      "make_quadratic",
      [](int dim, std::vector<double> eigenvalues,
         std::optional<std::vector<double>> w0) {
        return make_quadratic(dim, std::move(eigenvalues), std::move(w0));
      },
      py::arg("dim"), py::arg("eigenvalues"), py::arg("w0") = py::none());
  m.def(
      "make_log_smooth",
      [](int dim, std::optional<std::vector<double>> w0) {
        return make_log_smooth(dim, std::move(w0));
      },
      py::arg("dim"), py::arg("w0") = py::none());

  m.def(
      "eval_value",
      [](const ProblemSpec& p, const std::vector<double>& w) {
        return eval_value(p, w);
      },
      py::arg("problem"), py::arg("w"));
  m.def(
      "eval_grad",
      [](const ProblemSpec& p, const std::vector<double>& w) {
        std::vector<double> g(p.dim);
        eval_grad(p, w, g);
        return g;
      },
      py::arg("problem"), py::arg("w"));

  m.def(
      "make_noise",
      [](double p, double sigma, const std::string& family,
         std::optional<double> alpha, std::optional<double> cutoff,
         const std::string& oracle_family, std::optional<double> beta) {
        OracleFamily of = oracle_family == "quadratic" ? OracleFamily::quadratic
                                                       : OracleFamily::linear;
        return make_noise(p, sigma, noise_family_from_string(family), alpha,
                          cutoff, of, beta);
      },
      py::arg("p"), py::arg("sigma"), py::arg("family"),
      py::arg("alpha") = py::none(), py::arg("cutoff") = py::none(),
      py::arg("oracle_family") = "linear", py::arg("beta") = py::none());

  m.def(
      "schedule",
      [](const std::string& algo, double sigma, double p, double L, long T,
         double grad_w0_norm) {
        return schedule_for(algorithm_from_string(algo), sigma, p, L, T,
                            grad_w0_norm);
      },
      py::arg("algo"), py::arg("sigma"), py::arg("p"), py::arg("L"),
      py::arg("T"), py::arg("grad_w0_norm") = 1.0);

  m.def(
      "run",
      [](const std::string& algo, const ProblemSpec& problem,
         const NoiseSpec& noise, const HyperParams& hyper, std::uint64_t seed,
         const std::string& trace) {
        TraceLevel lvl = trace == "full"      ? TraceLevel::full
                         : trace == "summary" ? TraceLevel::summary
                                              : TraceLevel::none;
        Trajectory traj = run(algorithm_from_string(algo), problem, noise,
                              hyper, RngStream(seed), lvl);
        return trajectory_dict(traj);
      },
      py::arg("algo"), py::arg("problem"), py::arg("noise"), py::arg("hyper"),
      py::arg("seed"), py::arg("trace") = "none");

  m.def(
      "sweep_csv",
      [](const std::string& config_json, int parallel) {
        SweepConfig cfg = parse_config(nlohmann::json::parse(config_json));
        cfg.parallel = parallel;
        std::ostringstream os;
        emit_csv(run_sweep(cfg), os);
        return os.str();
      },
      py::arg("config_json"), py::arg("parallel") = 1,
      "Run a sweep from a JSON config string; returns the results CSV.");

  m.def(
      "fit_rate",
      [](const std::vector<std::pair<double, double>>& points) {
        RateFit fit = fit_rate(points);
        py::dict d;
        d["slope"] = fit.slope;
        d["intercept"] = fit.intercept;
        d["r_squared"] = fit.r_squared;
        d["n_points"] = fit.n_points;
        return d;
      },
      py::arg("points"), "OLS on (log T, log metric) pairs.");

  m.def(
      "verify",
      [](std::uint64_t seed) {
        py::list out;
        for (const CheckReport& r : run_default_suite(seed)) {
          py::dict d;
          d["name"] = r.name;
          d["pass"] = r.pass;
          d["measured"] = r.measured;
          d["bounds"] = r.bounds;
          d["samples"] = r.samples;
          d["tolerance"] = r.tolerance;
          out.append(std::move(d));
        }
        return out;
      },
      py::arg("seed") = 0, "Run the inequality suite; list of check reports.");
}
