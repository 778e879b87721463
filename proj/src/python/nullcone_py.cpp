// Python bindings for the main verification operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nullcone/suites.hpp"

namespace py = pybind11;
using namespace nullcone;

namespace {

py::object value_to_py(const Report::Value& v) {
  if (std::holds_alternative<double>(v)) return py::float_(std::get<double>(v));
  if (std::holds_alternative<std::int64_t>(v))
    return py::int_(std::get<std::int64_t>(v));
  if (std::holds_alternative<bool>(v)) return py::bool_(std::get<bool>(v));
  return py::str(std::get<std::string>(v));
}

py::dict report_to_dict(const Report& rep) {
  py::dict out;
  out["id"] = rep.id;
  py::dict scalars;
  for (const auto& [k, v] : rep.scalars) scalars[py::str(k)] = value_to_py(v);
  out["scalars"] = scalars;
  py::dict checks;
  for (const auto& [k, v] : rep.checks) checks[py::str(k)] = v;
  out["checks"] = checks;
  out["pass"] = rep.all_pass();
  if (!rep.columns.empty()) {
    out["columns"] = rep.columns;
    py::list rows;
    for (const auto& row : rep.rows) {
      py::list r;
      for (const auto& v : row) r.append(value_to_py(v));
      rows.append(r);
    }
    out["rows"] = rows;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_nullcone, m) {
  m.doc() = "double-null Kerr/Schwarzschild verification suites";

  py::register_exception<DomainError>(m, "DomainError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<KerrParams>(m, "KerrParams")
      .def(py::init<double, double>(), py::arg("M"), py::arg("a") = 0.0)
      .def_readonly("M", &KerrParams::M)
      .def_readonly("a", &KerrParams::a)
      .def("r_plus", &KerrParams::r_plus)
      .def("delta", &KerrParams::delta)
      .def("__repr__", [](const KerrParams& p) {
        return "KerrParams(M=" + std::to_string(p.M) + ", a=" + std::to_string(p.a) + ")";
      });

  m.def("horizon_radius", &horizon_radius);
  m.def(
      "bl_metric",
      [](const KerrParams& p, double r, double theta) {
        auto g = bl_metric(p, r, theta);
        std::vector<std::vector<double>> out(4, std::vector<double>(4));
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) out[i][j] = g[i][j];
        return out;
      },
      py::arg("params"), py::arg("r"), py::arg("theta"));
  m.def(
      "tortoise_coords",
      [](const KerrParams& p, double r, double theta) {
        auto t = tortoise_coords(p, r, theta);
        return py::make_tuple(t.r_star, t.theta_star);
      },
      py::arg("params"), py::arg("r"), py::arg("theta") = M_PI / 2);
  m.def(
      "background_ricci",
      [](const KerrParams& p, double r) {
        auto rc = background_ricci(p, r, 1.0, 0.3);
        py::dict d;
        d["trchi"] = rc.trchi;
        d["trchib"] = rc.trchib;
        d["omega"] = rc.omega;
        d["omegab"] = rc.omegab;
        return d;
      },
      py::arg("params"), py::arg("r"));
  m.def(
      "background_rho",
      [](const KerrParams& p, double r) {
        return background_curvature(p, r, 1.0, 0.3).rho;
      },
      py::arg("params"), py::arg("r"));

  m.def("background_suite", &background_suite, py::arg("M") = 1.0,
        py::arg("a") = 0.0, py::arg("r_min") = 10.0, py::arg("r_max") = 1000.0,
        py::arg("n_samples") = 200);
  m.def("hodge_verify", &hodge_verify_suite, py::arg("L") = 16,
        py::arg("trials") = 100, py::arg("seed") = 7);
  m.def("hodge_poincare", &hodge_poincare_suite, py::arg("L") = 16,
        py::arg("eps") = 0.01, py::arg("trials") = 60, py::arg("seed") = 7);
  m.def("decay_check", &decay_suite, py::arg("db_path"), py::arg("s_min") = 4.0,
        py::arg("s_max") = 6.0);
  m.def("frames_check", &frames_suite, py::arg("seed") = 7,
        py::arg("f_amplitude") = 1e-2, py::arg("lam") = 1.05);
  m.def("case_table", [](double s) {
    py::list out;
    for (const auto& row : canonical_case_table(s)) {
      py::dict d;
      d["pair"] = row.pair;
      d["p"] = row.p;
      d["case"] = case_name(row.c);
      out.append(d);
    }
    return out;
  });
  m.def("peeling_table", [](double s) {
    py::list out;
    for (const auto& e : peeling_exponents(s)) {
      py::dict d;
      d["quantity"] = e.quantity;
      d["has_l2"] = e.has_l2;
      d["l2_r"] = e.l2_r;
      d["l2_u"] = e.l2_u;
      d["log_flag"] = e.log_flag;
      d["has_sup"] = e.has_sup;
      d["sup_r"] = e.sup_r;
      d["sup_u"] = e.sup_u;
      out.append(d);
    }
    return out;
  });
  m.def("transport_check", &transport_suite);
  m.def(
      "bianchi_run",
      [](double u0, double u1, double ub0, double ub1, int n, int L, double s,
         const std::string& profile) {
        GridSpec spec;
        spec.params = KerrParams(0.0, 0.0);
        spec.u0 = u0;
        spec.u1 = u1;
        spec.ub0 = ub0;
        spec.ub1 = ub1;
        spec.n_u = n;
        spec.n_ub = n;
        spec.L = L;
        return bianchi_suite(spec, s, profile, 2, 1, 1e-3);
      },
      py::arg("u0") = -240.0, py::arg("u1") = -80.0, py::arg("ub0") = 80.0,
      py::arg("ub1") = 240.0, py::arg("n") = 32, py::arg("L") = 6,
      py::arg("s") = 5.0, py::arg("profile") = "family");

  m.def("report_json", [](const Report& rep) { return to_json(rep); });
  m.def("report_dict", &report_to_dict);
  py::class_<Report>(m, "Report")
      .def_property_readonly("ok", &Report::all_pass)
      .def("to_dict", &report_to_dict)
      .def("to_json", [](const Report& rep) { return to_json(rep); })
      .def("__repr__", [](const Report& rep) {
        return "<Report " + rep.id + (rep.all_pass() ? " pass>" : " FAIL>");
      });
}
