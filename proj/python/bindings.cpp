#include "martin/cli.hpp"
#include "martin/fields.hpp"
#include "martin/green.hpp"
#include "martin/io.hpp"
#include "martin/levelset.hpp"
#include "martin/slice_asymptotics.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace martin;

namespace {

py::object to_py(const io::json& j) {
  switch (j.type()) {
    case io::json::value_t::null: return py::none();
    case io::json::value_t::boolean: return py::bool_(j.get<bool>());
    case io::json::value_t::number_integer: return py::int_(j.get<long long>());
    case io::json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case io::json::value_t::number_float: return py::float_(j.get<double>());
    case io::json::value_t::string: return py::str(j.get<std::string>());
    case io::json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_py(v));
      return out;
    }
    case io::json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return out;
    }
    default: throw std::runtime_error("unsupported json value");
  }
}

geometry::WindowBox window(const std::vector<double>& w) {
  if (w.size() != 4) throw std::invalid_argument("window must be [x0, x1, y0, y1]");
  return geometry::WindowBox::planar(w[0], w[1], w[2], w[3]);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Martin-function potential theory toolkit";
  m.attr("__version__") = io::kVersion;

  py::register_exception<SolverError>(m, "SolverError");
  py::register_exception<io::ConfigError>(m, "ConfigError", PyExc_ValueError);

  // pybind11 holders cannot be shared_ptr<const T>; fields are never mutated from Python
  py::class_<fields::ScalarField, std::shared_ptr<fields::ScalarField>>(m, "Field")
      .def_property_readonly("name", &fields::ScalarField::name)
      .def_property_readonly("dim", &fields::ScalarField::dim)
      .def("value", [](const fields::ScalarField& f, const Vec& p) { return fields::eval(f, Point(p)); })
      .def("gradient", [](const fields::ScalarField& f, const Vec& p) { return fields::gradient(f, Point(p)); })
      .def("hessian", [](const fields::ScalarField& f, const Vec& p) { return fields::hessian(f, Point(p)); })
      .def("contains", [](const fields::ScalarField& f, const Vec& p) { return f.domain().contains(Point(p)); });

  m.def(
      "make_field",
      [](const std::string& spec) { return std::const_pointer_cast<fields::ScalarField>(fields::make_field(spec)); },
      py::arg("spec"),
        "Registry field: strip, exterior, slit_sector, halfplane_v, linear_x, cylinder:A=..,B=..");

  m.def(
      "harmonicity_residual",
      [](const fields::ScalarField& f, const Vec& p, double h) { return fields::harmonicity_residual(f, Point(p), h); },
      py::arg("field"), py::arg("point"), py::arg("h"));

  m.def(
      "level_curves",
      [](const fields::ScalarField& f, double c, const std::vector<double>& w, double h) {
        py::list out;
        for (const auto& curve : levelset::extract_level_curve(f, c, window(w), h)) {
          Eigen::MatrixX2d pts(static_cast<Eigen::Index>(curve.points.size()), 2);
          for (size_t k = 0; k < curve.points.size(); ++k) pts.row(static_cast<Eigen::Index>(k)) = curve.points[k];
          py::dict d;
          d["level"] = curve.level;
          d["closed"] = curve.closed;
          d["points"] = pts;
          out.append(d);
        }
        return out;
      },
      py::arg("field"), py::arg("level"), py::arg("window"), py::arg("h"));

  m.def(
      "level_set_convexity",
      [](const fields::ScalarField& f, double c, const std::vector<double>& w, double h) {
        const auto curves = levelset::extract_level_curve(f, c, window(w), h);
        return to_py(io::to_json(levelset::level_set_convexity(f, c, curves)));
      },
      py::arg("field"), py::arg("level"), py::arg("window"), py::arg("h"));

  m.def("tangent_hessian_form", &levelset::tangent_hessian_form, py::arg("field"), py::arg("point"));

  m.def(
      "slice_scan",
      [](const fields::ScalarField& f, double t, int n) { return to_py(io::to_json(slices::slice_scan(f, t, n))); },
      py::arg("field"), py::arg("t"), py::arg("samples") = 401);

  m.def(
      "decay_fit",
      [](int order, double a, double b, int n) {
        const auto fit = slices::decay_fit([order](double r) { return slices::gap_derivative_magnitude(order, r); },
                                           slices::geometric_radii(a, b, n));
        return to_py(io::to_json(fit));
      },
      py::arg("order"), py::arg("a") = 5.0, py::arg("b") = 80.0, py::arg("n") = 12,
      "Log-log fit of |d^k g| for the slit-sector gap g(z) = z^2 - sqrt(z^4 - 1).");

  m.def(
      "martin_ratio",
      [](const std::string& domain, std::pair<double, double> x0, const std::vector<double>& poles, double h,
         const std::vector<double>& probe) {
        green::MartinApproxConfig cfg;
        cfg.x0 = Vec2(x0.first, x0.second);
        cfg.poles = poles;
        cfg.probe = window(probe);
        const auto res = green::martin_ratio(geometry::NamedDomain::from_json({{"kind", domain}}), cfg, h);
        Eigen::MatrixX3d samples(static_cast<Eigen::Index>(res.probe_values.size()), 3);
        for (size_t k = 0; k < res.probe_values.size(); ++k)
          samples.row(static_cast<Eigen::Index>(k)) << res.probe_values[k].point.x(), res.probe_values[k].point.y(),
              res.probe_values[k].value;
        py::dict d;
        d["cauchy"] = res.cauchy;
        d["probe"] = samples;
        return d;
      },
      py::arg("domain"), py::arg("x0"), py::arg("poles"), py::arg("h"),
      py::arg("probe") = std::vector<double>{0.5, 2.0, -1.0, 1.0});

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv = {"martin"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line front end in process; returns (exit code, stdout, stderr).");
}
