#include "starmd/acceptance.hpp"
#include "starmd/errors.hpp"
#include "starmd/harness.hpp"
#include "starmd/linesearch.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace starmd;

namespace {

py::object to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Json from_py(const py::handle& obj) {
  return Json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::dict trace_columns(const std::vector<TraceRow>& rows) {
  const std::size_t n = rows.size();
  std::vector<int> t(n), probes(n);
  std::vector<double> lambda(n), gap(n, std::nan("")), R(n, std::nan("")), C(n), eps(n),
      eta(n), alpha(n);
  std::vector<std::uint64_t> calls(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i];
    t[i] = r.t;
    probes[i] = r.probes;
    lambda[i] = r.lambda;
    if (r.gap) gap[i] = *r.gap;
    if (r.R) R[i] = *r.R;
    C[i] = r.C_t;
    eps[i] = r.eps_t;
    eta[i] = r.eta_t;
    alpha[i] = r.alpha_t;
    calls[i] = r.value_calls + r.grad_calls;
  }
  py::dict d;
  d["t"] = t;
  d["lambda"] = lambda;
  d["probes"] = probes;
  d["calls"] = calls;
  d["gap"] = gap;
  d["R"] = R;
  d["C_t"] = C;
  d["eps_t"] = eps;
  d["eta_t"] = eta;
  d["alpha_t"] = alpha;
  return d;
}

py::dict run_config(const py::dict& config) {
  const ExperimentConfig c = config_from_json(from_py(config));
  const ExperimentResult r = run_experiment(c);
  py::dict out;
  out["summary"] = to_py(summarize(r.run));
  out["trace"] = trace_columns(r.run.rows);
  out["x"] = r.run.x_ag;
  out["seconds"] = r.seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Accelerated mirror descent with binary search";
  m.attr("__version__") = STARMD_VERSION;

  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<PreconditionViolation>(m, "PreconditionViolation", PyExc_ValueError);

  m.def("norm", [](double p, const Vector& x) { return norm(NormSpec::pnorm(p), x); },
        py::arg("p"), py::arg("x"));
  m.def("dual_norm", [](double p, const Vector& z) { return dual_norm(NormSpec::pnorm(p), z); },
        py::arg("p"), py::arg("z"));

  py::class_<Geometry>(m, "Geometry")
      .def(py::init([](double p) { return Geometry(NormSpec::pnorm(p)); }), py::arg("p"))
      .def_property_readonly("q", &Geometry::q)
      .def_property_readonly("mu", &Geometry::mu)
      .def("psi", [](const Geometry& g, const Vector& x) { return g.psi(x); })
      .def("grad_psi", [](const Geometry& g, const Vector& x) { return g.grad_psi(x); })
      .def("bregman", [](const Geometry& g, const Vector& x, const Vector& y) {
        return g.bregman(x, y);
      })
      .def("mirror_step",
           [](const Geometry& g, const Vector& x, const Vector& grad, double eta) {
             return mirror_step(g, x, grad, eta);
           },
           py::arg("x"), py::arg("grad"), py::arg("eta"));

  py::class_<ScheduleEntry>(m, "ScheduleEntry")
      .def_readonly("alpha_t", &ScheduleEntry::alpha_t)
      .def_readonly("eta_t", &ScheduleEntry::eta_t)
      .def_readonly("C_t", &ScheduleEntry::C_t)
      .def_readonly("eps_t", &ScheduleEntry::eps_t)
      .def_readonly("A_t", &ScheduleEntry::A_t)
      .def_readonly("B_t", &ScheduleEntry::B_t)
      .def_readonly("clamped", &ScheduleEntry::clamped);

  m.def("schedule_general", &schedule_general, py::arg("q"), py::arg("kappa"), py::arg("tau"),
        py::arg("mu"), py::arg("L"), py::arg("alpha"), py::arg("t"));
  m.def("schedule_smooth", &schedule_smooth, py::arg("tau"), py::arg("mu"), py::arg("L"),
        py::arg("alpha"), py::arg("t"));
  m.def("probe_bound", &probe_bound, py::arg("C"), py::arg("L"), py::arg("kappa"),
        py::arg("dist"), py::arg("eps"));

  m.def("run", &run_config, py::arg("config"),
        "Run one experiment from a config dict; returns summary, trace columns and x.");

  m.def(
      "fit_rate",
      [](std::vector<double> t, std::vector<double> gap, std::optional<double> horizon) {
        const RateFit f = fit_rate(GapSeries{std::move(t), std::move(gap)}, horizon);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["t_lo"] = f.t_lo;
        d["t_hi"] = f.t_hi;
        d["residual"] = f.residual;
        d["clamped"] = f.clamped;
        d["points"] = f.points;
        return d;
      },
      py::arg("t"), py::arg("gap"), py::arg("horizon") = py::none());

  m.def(
      "adversary",
      [](double C, double eps, double Lstar, const std::string& strategy, int N) {
        return to_py(to_json(run_adversary_game(C, eps, Lstar, parse_strategy(strategy), N)));
      },
      py::arg("C") = 1.0, py::arg("eps") = 1e-3, py::arg("Lstar") = 1e6,
      py::arg("strategy") = "bisection", py::arg("N") = 8);

  m.def(
      "acceptance",
      [](int T, std::uint64_t seed, std::vector<int> only) {
        AcceptanceOptions o;
        o.T = T;
        o.seed = seed;
        o.only = std::move(only);
        std::vector<CriterionResult> results;
        {
          py::gil_scoped_release release;
          results = run_acceptance(o);
        }
        return to_py(to_json(results));
      },
      py::arg("T") = 4096, py::arg("seed") = 1, py::arg("only") = std::vector<int>{});
}
