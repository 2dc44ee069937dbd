#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "lbmo/biot_savart.hpp"
#include "lbmo/config.hpp"
#include "lbmo/error.hpp"
#include "lbmo/euler.hpp"
#include "lbmo/field_ops.hpp"
#include "lbmo/flow.hpp"
#include "lbmo/map_zoo.hpp"
#include "lbmo/norms.hpp"
#include "lbmo/scenarios.hpp"
#include "lbmo/test_fields.hpp"

namespace py = pybind11;
using namespace lbmo;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Arrays are indexed [j, i], i.e. shape (ny, nx), matching the row-major layout.
ScalarField2D to_field(const GridSpec& g, const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != g.ny || a.shape(1) != g.nx)
    throw Error("array shape must be (ny, nx) = (" + std::to_string(g.ny) + ", " + std::to_string(g.nx) + ")");
  return ScalarField2D(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const GridSpec& g, std::span<const double> v) {
  Array out({g.ny, g.nx});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict report_dict(const NormReport& r) {
  py::dict d;
  for (const auto& [p, v] : r.lp) d[std::isinf(p) ? py::str("lpinf") : py::str("lp" + csv::num(p))] = v;
  d["bmo"] = r.bmo;
  d["lbmo2"] = r.lbmo_second_term;
  d["lbmo"] = r.lbmo;
  d["balls"] = r.ball_count;
  d["pairs"] = r.pair_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lbmo, m) {
  m.doc() = "Native core of lbmo_euler";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<Error>(m, "LbmoError", PyExc_ValueError);

  py::enum_<Domain>(m, "Domain").value("torus", Domain::torus).value("window", Domain::window);

  py::class_<GridSpec>(m, "GridSpec")
      .def_static("torus", &GridSpec::torus, py::arg("nx"), py::arg("ny"), py::arg("lx") = kTwoPi,
                  py::arg("ly") = kTwoPi)
      .def_static("window", [](int nx, int ny, std::pair<double, double> origin, double lx, double ly) {
        return GridSpec::window(nx, ny, {origin.first, origin.second}, lx, ly);
      }, py::arg("nx"), py::arg("ny"), py::arg("origin"), py::arg("lx"), py::arg("ly"))
      .def_readonly("nx", &GridSpec::nx)
      .def_readonly("ny", &GridSpec::ny)
      .def_readonly("lx", &GridSpec::lx)
      .def_readonly("ly", &GridSpec::ly)
      .def_readonly("domain", &GridSpec::domain)
      .def_property_readonly("hx", &GridSpec::hx)
      .def_property_readonly("hy", &GridSpec::hy)
      .def("__repr__", &GridSpec::id);

  m.def("lbmo_estimate", [](const GridSpec& g, const Array& a, int j_max, int centers, std::uint64_t seed,
                            std::vector<double> ps) {
    return report_dict(lbmo_estimate(to_field(g, a), make_ball_family(g, j_max, centers, seed), ps));
  }, py::arg("grid"), py::arg("values"), py::arg("j_max"), py::arg("centers") = 16, py::arg("seed") = 0,
        py::arg("ps") = std::vector<double>{2.0});
  m.def("max_admissible_j_max", &max_admissible_j_max, py::arg("grid"), py::arg("centers") = 16,
        py::arg("seed") = 0);
  m.def("lp_norm", [](const GridSpec& g, const Array& a, double p) { return lp_norm(to_field(g, a), p); });
  m.def("mollify", [](const GridSpec& g, const Array& a, int n) { return to_array(g, mollify(to_field(g, a), n).values()); });

  m.def("velocity", [](const GridSpec& g, const Array& omega) {
    SpectralWorkspace ws(g);
    const VectorField2D u = velocity_from_vorticity_torus(to_field(g, omega), ws);
    return py::make_tuple(to_array(g, u.u1()), to_array(g, u.u2()));
  }, py::arg("grid"), py::arg("omega"), "Torus Biot-Savart inversion; returns (u1, u2).");
  m.def("ll_norm_estimate", [](const GridSpec& g, const Array& u1, const Array& u2, std::size_t budget, std::uint64_t seed) {
    const auto a = to_field(g, u1), b = to_field(g, u2);
    return ll_norm_estimate(VectorField2D(g, {a.values().begin(), a.values().end()}, {b.values().begin(), b.values().end()}),
                            budget, seed);
  }, py::arg("grid"), py::arg("u1"), py::arg("u2"), py::arg("budget") = 4000, py::arg("seed") = 0);

  m.def("solve", [](const GridSpec& g, const Array& omega0, double dt, double t_final, int diag_every, bool dealias) {
    SolverConfig c;
    c.grid = g;
    c.dt = dt;
    c.t_final = t_final;
    c.diag_every = diag_every;
    c.dealias = dealias;
    c.store_snapshots = true;
    RunRecord rec;
    {
      py::gil_scoped_release release;
      rec = run(to_field(g, omega0), c);
    }
    py::dict d;
    std::vector<double> lp2, energy, mean;
    for (const auto& r : rec.diagnostics) {
      lp2.push_back(r.lp2);
      energy.push_back(r.energy);
      mean.push_back(r.mean);
    }
    d["t"] = rec.times;
    d["lp2"] = lp2;
    d["energy"] = energy;
    d["mean"] = mean;
    d["final"] = to_array(g, rec.snapshots.back().values());
    return d;
  }, py::arg("grid"), py::arg("omega0"), py::arg("dt"), py::arg("t_final"), py::arg("diag_every"),
        py::arg("dealias") = true);

  m.def("phi", &phi);
  m.def("g_of", &g_of);
  m.def("g_psi", &g_psi, py::arg("r"), py::arg("star"));
  m.def("linear_map_star", &linear_map_star);

  m.def("taylor_green", [](const GridSpec& g) { return to_array(g, taylor_green(g).values()); });
  m.def("lbmo_example", [](const GridSpec& g) { return to_array(g, lbmo_example(g).values()); });

  m.def("known_scenarios", &known_scenarios);
  m.def("_default_config", [](const std::string& s, std::uint64_t seed) { return default_config(s, seed).to_json().dump(); });
  m.def("_run_scenario", [](const std::string& cfg_json) {
    const ExperimentConfig c = ExperimentConfig::from_json(Json::parse(cfg_json));
    py::gil_scoped_release release;
    return run_scenario(c).report.dump();
  });
  m.def("_recompute_report", [](const std::filesystem::path& dir) { return recompute_report(dir).dump(); });
}
