#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gelfand/errors.hpp"
#include "gelfand/experiments.hpp"
#include "gelfand/extremal.hpp"
#include "gelfand/golden.hpp"

namespace py = pybind11;
using namespace gelfand;

namespace {

ProblemSetup make_setup(const FlowProfile& profile, double A, int N, const Nonlinearity& f) {
  return {profile, A, N, f};
}

py::dict sweep_dict(const SweepResult& r) {
  py::dict d;
  d["axis"] = r.axis;
  d["columns"] = r.columns;
  d["rows"] = r.rows;
  py::list verdicts;
  for (const auto& v : r.verdicts) {
    py::dict e;
    e["name"] = v.name;
    e["pass"] = v.pass;
    e["detail"] = v.detail;
    verdicts.append(e);
  }
  d["verdicts"] = verdicts;
  d["notes"] = r.notes;
  d["all_pass"] = r.all_pass();
  return d;
}

SweepOptions sweep_options(int M, double tol, int jobs) {
  SweepOptions o;
  o.intervals = M;
  o.bisection.tol = tol;
  o.jobs = jobs;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<OverflowError>(m, "OverflowError", base.ptr());
  py::register_exception<BracketError>(m, "BracketError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def_static("exponential", &Nonlinearity::exponential)
      .def_static("power", &Nonlinearity::power, py::arg("p"))
      .def_static("mems", &Nonlinearity::mems, py::arg("q"))
      .def("compose_power", &Nonlinearity::compose_power, py::arg("p"))
      .def("f", &Nonlinearity::f)
      .def("fprime", &Nonlinearity::fprime)
      .def("F", &Nonlinearity::F)
      .def("F_inverse", &Nonlinearity::F_inverse)
      .def_property_readonly("F_total", &Nonlinearity::F_total)
      .def_property_readonly("domain_end", &Nonlinearity::domain_end)
      .def("sup_ratio", [](const Nonlinearity& n) {
        const auto s = n.sup_ratio();
        return py::make_tuple(s.value, s.argmax, s.attained);
      })
      .def("__repr__", &Nonlinearity::name);

  py::class_<FlowProfile>(m, "FlowProfile")
      .def_static("constant", &FlowProfile::constant, py::arg("value"))
      .def_static("inverse_quadratic", &FlowProfile::inverse_quadratic)
      .def_static("plateau", &FlowProfile::plateau, py::arg("a"), py::arg("b"),
                  py::arg("outer") = 1.0)
      .def_static("tabulated", &FlowProfile::tabulated, py::arg("radii"), py::arg("values"),
                  py::arg("lipschitz") = 10.0)
      .def("rho", &FlowProfile::rho)
      .def("log_weight", &FlowProfile::log_weight)
      .def("regime", [](const FlowProfile& p) { return to_string(p.classify().regime); })
      .def("__repr__", &FlowProfile::name);

  m.def("torsion", [](const FlowProfile& p, double A, int N, int M) {
        const auto tp = torsion(p, A, N, M);
        py::dict d;
        d["r"] = tp.nodes;
        d["psi"] = tp.psi;
        d["dpsi"] = tp.dpsi;
        d["psi_max"] = tp.psi_max;
        return d;
      }, py::arg("profile"), py::arg("A"), py::arg("N") = 2, py::arg("M") = 1024);
  m.def("torsion_max", &torsion_max, py::arg("profile"), py::arg("A"), py::arg("N") = 2,
        py::arg("M") = 4096);

  m.def("lambda_star", [](const FlowProfile& p, double A, int N, const Nonlinearity& f, int M,
                          double tol) {
        BisectionOptions o;
        o.tol = tol;
        const auto iv = lambda_star_bisect(make_setup(p, A, N, f), RadialGrid(N, M), o);
        return py::make_tuple(iv.lo, iv.hi);
      }, py::arg("profile"), py::arg("A"), py::arg("N") = 2,
      py::arg("f") = Nonlinearity::exponential(), py::arg("M") = 1024, py::arg("tol") = 1e-6);

  m.def("bounds_report", [](const FlowProfile& p, double A, int N, const Nonlinearity& f, int M,
                            bool bisect) {
        BoundsOptions o;
        o.intervals = M;
        o.bisect = bisect;
        const auto b = bounds_report(make_setup(p, A, N, f), o);
        py::dict d;
        d["psi_max"] = b.psi_max;
        d["sup_ratio"] = b.sup_ratio;
        d["F_total"] = b.F_total;
        d["lower_basic"] = b.lower_basic;
        d["lower_alpha"] = b.lower_alpha;
        d["alpha_hat"] = b.alpha_hat;
        d["upper_F"] = b.upper_F;
        d["upper_mu1"] = b.upper_mu1;
        d["mu1"] = b.mu1;
        if (b.has_interval) {
          d["lambda_lo"] = b.lambda_star.lo;
          d["lambda_hi"] = b.lambda_star.hi;
          d["sandwich_ok"] = b.sandwich_ok;
        }
        return d;
      }, py::arg("profile"), py::arg("A"), py::arg("N") = 2,
      py::arg("f") = Nonlinearity::exponential(), py::arg("M") = 4096, py::arg("bisect") = true);

  m.def("sweep_A", [](const FlowProfile& p, int N, const std::vector<double>& As,
                      const Nonlinearity& f, int M, double tol, int jobs) {
        return sweep_dict(sweep_A(p, N, As, f, sweep_options(M, tol, jobs)));
      }, py::arg("profile"), py::arg("N"), py::arg("A_list"),
      py::arg("f") = Nonlinearity::exponential(), py::arg("M") = 1024, py::arg("tol") = 1e-6,
      py::arg("jobs") = 1);
  m.def("sweep_p", [](const FlowProfile& p, double A, int N, const std::vector<double>& ps,
                      const Nonlinearity& base, int M, double tol, int jobs) {
        return sweep_dict(sweep_p(p, A, N, base, ps, sweep_options(M, tol, jobs)));
      }, py::arg("profile"), py::arg("A"), py::arg("N"), py::arg("p_list"),
      py::arg("base") = Nonlinearity::exponential(), py::arg("M") = 1024,
      py::arg("tol") = 1e-6, py::arg("jobs") = 1);
  m.def("branch_scan", [](const FlowProfile& p, double A, int N, const Nonlinearity& f,
                          const std::vector<double>& fractions, int M, double tol, int jobs) {
        return sweep_dict(branch_scan(make_setup(p, A, N, f), fractions,
                                      sweep_options(M, tol, jobs)));
      }, py::arg("profile"), py::arg("A"), py::arg("N"), py::arg("f"), py::arg("fractions"),
      py::arg("M") = 1024, py::arg("tol") = 1e-6, py::arg("jobs") = 1);

  m.def("config_hash", &config_hash);
  m.def("run_golden_suite", [](int jobs) {
        py::list out;
        for (const auto& c : run_golden_suite({jobs})) {
          out.append(py::make_tuple(c.id, c.title, c.pass, c.detail));
        }
        return out;
      }, py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());
}
