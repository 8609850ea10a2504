// Python bindings for the main operations: domain specs (as JSON text),
// meshing, potential solves, pole sweeps, extremal search, and the
// convexity / Steiner calculus primitives.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "morrey/io.hpp"
#include "morrey/shape_calculus.hpp"
#include "morrey/verify.hpp"

namespace py = pybind11;
using namespace morrey;

namespace {

SolverConfig make_config(double p, double grad_tol) {
    SolverConfig c;
    c.p = p;
    c.grad_tol = grad_tol;
    return c;
}

Polygon to_polygon(const std::vector<std::pair<double, double>>& pts) {
    Polygon poly;
    poly.reserve(pts.size());
    for (auto [x, y] : pts) poly.push_back({x, y});
    return poly;
}

std::vector<std::pair<double, double>> from_polygon(const Polygon& poly) {
    std::vector<std::pair<double, double>> out;
    out.reserve(poly.size());
    for (const auto& v : poly) out.emplace_back(v.x, v.y);
    return out;
}

py::dict report_dict(const SolveReport& rep) {
    py::dict d;
    d["energy"] = rep.energy;
    d["kkt"] = rep.kkt;
    d["iters"] = rep.iters;
    d["eps_floor"] = rep.eps_floor;
    d["seconds"] = rep.seconds;
    return d;
}

}  // namespace

PYBIND11_MODULE(_morreylab, m) {
    m.doc() = "sharp sup-norm embedding constants via p-Laplace potentials";

    m.def("ball_lambda", &ball_lambda, py::arg("n"), py::arg("p"), py::arg("r"));
    m.def("ball_extremal_value",
          [](int n, double p, double r, double a, std::pair<double, double> x,
             std::pair<double, double> x0) {
              return ball_extremal_value(n, p, r, a, {x.first, x.second}, {x0.first, x0.second});
          },
          py::arg("n"), py::arg("p"), py::arg("r"), py::arg("a"), py::arg("x"), py::arg("x0"));
    m.def("whole_space_constant", &whole_space_constant, py::arg("n"), py::arg("p"));
    m.def("holder_exponent", &holder_exponent, py::arg("n"), py::arg("p"));
    m.def("unit_ball_volume", &unit_ball_volume, py::arg("n"));
    m.def("radial_support_ode_residual", &radial_support_ode_residual, py::arg("p"),
          py::arg("n"), py::arg("t"), py::arg("r"));

    m.def("contains",
          [](const std::string& spec_json, double x, double y) {
              return contains(domain_from_json_text(spec_json), {x, y});
          },
          py::arg("spec_json"), py::arg("x"), py::arg("y"));

    m.def("mesh_info",
          [](const std::string& spec_json, double h,
             std::optional<std::pair<double, double>> pole) {
              std::optional<Vec2> pv;
              if (pole) pv = Vec2{pole->first, pole->second};
              const Mesh mesh = triangulate(domain_from_json_text(spec_json), h, pv);
              py::dict d;
              d["vertices"] = mesh.vertices.size();
              d["triangles"] = mesh.triangles.size();
              d["interior"] = mesh.interior_count();
              d["area"] = mesh.area();
              d["max_edge"] = mesh.max_edge();
              return d;
          },
          py::arg("spec_json"), py::arg("h"), py::arg("pole") = std::nullopt);

    m.def("solve_potential",
          [](const std::string& spec_json, double p, double h, std::pair<double, double> pole,
             double grad_tol) {
              auto mesh = std::make_shared<const Mesh>(
                  triangulate(domain_from_json_text(spec_json), h,
                              Vec2{pole.first, pole.second}));
              auto sol = solve_potential(mesh, make_config(p, grad_tol));
              py::dict d;
              d["lambda"] = sol.lambda;
              d["green_diag"] = std::pow(sol.lambda, -1.0 / (p - 1.0));
              d["min"] = sol.w.min_value();
              d["max"] = sol.w.max_value();
              d["report"] = report_dict(sol.report);
              return d;
          },
          py::arg("spec_json"), py::arg("p"), py::arg("h"), py::arg("pole"),
          py::arg("grad_tol") = 1e-8);

    m.def("find_extremal",
          [](const std::string& spec_json, double p, double h, double g, int jobs,
             bool quadrant) {
              FindOptions fo;
              fo.h = h;
              fo.sweep_g = g;
              fo.jobs = jobs;
              fo.fundamental_domain_only = quadrant;
              auto sol = find_extremal(domain_from_json_text(spec_json), make_config(p, 1e-8), fo);
              py::dict d;
              d["lambda_p"] = sol.lambda_p;
              d["x0"] = std::make_pair(sol.x0.x, sol.x0.y);
              d["rayleigh"] = sol.rayleigh;
              d["fit_exponent"] = sol.fit.exponent;
              d["fit_coefficient"] = sol.fit.coefficient;
              d["report"] = report_dict(sol.report);
              return d;
          },
          py::arg("spec_json"), py::arg("p"), py::arg("h"), py::arg("g") = 0.0,
          py::arg("jobs") = 1, py::arg("quadrant") = false);

    m.def("pole_sweep",
          [](const std::string& spec_json, double p, double h, double g, int jobs,
             bool quadrant) {
              SweepOptions sw;
              sw.h = h;
              sw.g = g;
              sw.jobs = jobs;
              sw.fundamental_domain_only = quadrant;
              auto sweep = pole_sweep(domain_from_json_text(spec_json), make_config(p, 1e-8), sw);
              py::list rows;
              for (const auto& e : sweep.entries) {
                  py::dict d;
                  d["pole"] = std::make_pair(e.pole.x, e.pole.y);
                  d["lambda"] = e.lambda;
                  d["ok"] = e.ok;
                  rows.append(d);
              }
              py::dict out;
              out["entries"] = rows;
              out["argmin"] = sweep.argmin;
              return out;
          },
          py::arg("spec_json"), py::arg("p"), py::arg("h"), py::arg("g"), py::arg("jobs") = 1,
          py::arg("quadrant") = false);

    m.def("support_function_polygon",
          [](const std::vector<std::pair<double, double>>& poly,
             std::pair<double, double> xi) {
              return support_function_polygon(to_polygon(poly), {xi.first, xi.second});
          },
          py::arg("polygon"), py::arg("xi"));

    m.def("minkowski_combine_polygons",
          [](const std::vector<std::pair<double, double>>& P,
             const std::vector<std::pair<double, double>>& Q, double rho) {
              return from_polygon(minkowski_combine_polygons(to_polygon(P), to_polygon(Q), rho));
          },
          py::arg("P"), py::arg("Q"), py::arg("rho"));

    m.def("run_battery",
          [](const std::vector<std::string>& only, double slack_scale, int jobs) {
              BatteryOptions opts;
              opts.only = only;
              opts.slack_scale = slack_scale;
              opts.jobs = jobs;
              py::list out;
              for (const auto& r : run_battery(opts)) {
                  py::dict d;
                  d["name"] = r.name;
                  d["passed"] = r.passed;
                  d["detail"] = r.detail;
                  d["seconds"] = r.seconds;
                  out.append(d);
              }
              return out;
          },
          py::arg("only") = std::vector<std::string>{}, py::arg("slack_scale") = 1.0,
          py::arg("jobs") = 2);

    m.attr("__version__") = "0.1.0";
}
