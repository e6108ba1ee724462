#include "twomode/cli.hpp"
#include "twomode/mappings.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace twomode;

namespace {

py::dict class_dict(const EntanglementClass& c) {
  py::dict d;
  d["label"] = to_string(c.label);
  d["first_life"] = c.first_life ? py::object(py::float_(*c.first_life)) : py::object(py::none());
  py::list dead;
  for (const auto& i : c.dead_intervals) dead.append(py::make_tuple(i.begin, i.end));
  d["dead_intervals"] = dead;
  d["touch_points"] = c.touch_points;
  d["revives"] = c.revives;
  d["min_after_life"] = c.min_after_life;
  d["window"] = py::make_tuple(c.window.begin, c.window.end);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two atoms coupled to two field modes: dynamics, entanglement and classification";

  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def("normalize_config", [](const std::string& text) {
    return serialize_run_config(parse_run_config(text));
  }, py::arg("config_json"), "Parses a run configuration and returns it with every default written out.");

  m.def("simulate", [](const std::string& text) {
    const SimulationResult r = simulate(parse_run_config(text));
    Eigen::MatrixXd data(static_cast<Eigen::Index>(r.rows.size()),
                         static_cast<Eigen::Index>(r.columns.size()));
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      for (std::size_t k = 0; k < r.columns.size(); ++k) data(i, k) = r.rows[i][k];
    }
    py::dict d;
    d["columns"] = r.columns;
    d["data"] = data;
    d["cutoff"] = r.cutoff;
    d["leakage"] = r.leakage;
    d["classification"] =
        r.classification ? py::object(class_dict(*r.classification)) : py::object(py::none());
    d["csv"] = to_csv(r);
    return d;
  }, py::arg("config_json"));

  m.def("sweep", [](const std::string& text, int threads) {
    const RunConfig cfg = parse_run_config(text);
    std::vector<SweepRow> rows;
    {
      py::gil_scoped_release release;
      rows = sweep(cfg, threads);
    }
    py::list out;
    for (const auto& r : rows) {
      py::dict d;
      d["value"] = r.value;
      d["valid"] = r.valid;
      d["error"] = r.error;
      d["label"] = r.valid ? to_string(r.label) : std::string("INVALID");
      d["first_life"] = r.first_life ? py::object(py::float_(*r.first_life)) : py::object(py::none());
      d["min_after_life"] = r.min_after_life;
      d["max_concurrence"] = r.max_concurrence;
      d["revives"] = r.revives;
      d["cutoff"] = r.cutoff;
      out.append(d);
    }
    return py::make_tuple(cfg.sweep->parameter, out);
  }, py::arg("config_json"), py::arg("threads") = 1);

  m.def("verify", [](const std::string& text) {
    const RunConfig cfg = parse_run_config(text);
    const Scenario s = cfg.scenario();
    const EquivalenceReport r =
        verify_equivalence(s.atomic, s.field, s.scheme, s.grid, s.cutoff, s.g, cfg.tolerances.tau_leak);
    py::dict d;
    d["max_trace_distance"] = r.max_trace_distance;
    d["cutoff"] = r.cutoff;
    d["leakage"] = r.leakage;
    d["pass"] = r.max_trace_distance < cfg.verify_bound;
    return d;
  }, py::arg("config_json"));

  m.def("table1_json", [](const std::string& only, int threads, double t_max, int samples) {
    std::vector<Table1Cell> cells = table1_cells();
    if (!only.empty()) {
      const Scheme s = parse_scheme(only);
      std::erase_if(cells, [&](const Table1Cell& c) { return c.scheme != s; });
    }
    TimeGrid grid;
    grid.t_max = t_max;
    grid.samples = samples;
    py::gil_scoped_release release;
    return table1_json(table1_harness(cells, grid, threads));
  }, py::arg("only") = "", py::arg("threads") = 1, py::arg("t_max") = 25.0,
     py::arg("samples") = 2001);

  m.def("concurrence", [](const Matrix& rho) { return concurrence(rho); }, py::arg("rho"));
  m.def("eof", &eof, py::arg("c"));
  m.def("negativity_atoms", &negativity_atoms, py::arg("rho"));
  m.def("propagator_smsc", [](double t, double g, int cutoff) {
    return propagator_smsc_closed(t, g, cutoff).matrix;
  }, py::arg("t"), py::arg("g"), py::arg("cutoff"));
  m.def("propagator_djc", [](double t, double g, int cutoff) {
    return propagator_djc_closed(t, g, cutoff).matrix;
  }, py::arg("t"), py::arg("g"), py::arg("cutoff"));
  m.def("hamiltonian", [](const std::string& scheme, double g, int cutoff, double phi) {
    ModelConfig cfg;
    cfg.scheme = parse_scheme(scheme);
    cfg.g = g;
    cfg.cutoff = cutoff;
    cfg.phi = phi;
    return model_hamiltonian(cfg).matrix;
  }, py::arg("scheme"), py::arg("g") = 1.0, py::arg("cutoff") = 6, py::arg("phi") = 0.0);
  m.def("small_squeezing_negativities", [](double xi, double gt) {
    const auto n = small_squeezing_negativities(xi, gt);
    return py::make_tuple(n.atoms, n.fields);
  }, py::arg("xi"), py::arg("gt"));
}
