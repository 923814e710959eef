#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wienerlab/convergence.hpp"
#include "wienerlab/parallel.hpp"
#include "wienerlab/pathspace.hpp"
#include "wienerlab/scenarios.hpp"

namespace py = pybind11;
using namespace wienerlab;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete Wiener-space laboratory: paths, shifts, quotients";

    py::register_exception<InvalidArgument>(m, "InvalidArgument",
                                            PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation",
                                              PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError",
                                           PyExc_ArithmeticError);

    py::class_<Grid>(m, "Grid")
        .def_readonly("horizon", &Grid::horizon)
        .def_readonly("n_steps", &Grid::n_steps)
        .def_readonly("times", &Grid::times)
        .def("dt", &Grid::dt, py::arg("step"));
    m.def("make_grid", &make_grid, py::arg("T"), py::arg("n_steps"));

    py::class_<Direction>(m, "Direction")
        .def_readonly("dim", &Direction::dim)
        .def_readonly("density", &Direction::density)
        .def_readonly("cumulative", &Direction::cumulative)
        .def_readonly("support_end", &Direction::support_end)
        .def("hdot", &Direction::hdot, py::arg("step"), py::arg("comp") = 0)
        .def("h", &Direction::h, py::arg("node"), py::arg("comp") = 0)
        .def("norm_sq", &Direction::norm_sq_H);
    m.def("make_direction", &make_direction, py::arg("grid"), py::arg("dim"),
          py::arg("hdot"));
    m.def("constant_direction", &constant_direction, py::arg("grid"),
          py::arg("dim") = 1, py::arg("value") = 1.0,
          py::arg("until") = std::nullopt);
    m.def("bump_direction", &bump_direction, py::arg("grid"), py::arg("dim"),
          py::arg("node"), py::arg("width_cells") = 4);
    m.def("inner", &inner_H, py::arg("h1"), py::arg("h2"));
    m.def(
        "truncate",
        [](const Direction& h, double t) { return wienerlab::truncate(h, t); },
        py::arg("h"), py::arg("t"));

    py::class_<WienerEnsemble>(m, "WienerEnsemble")
        .def_readonly("grid", &WienerEnsemble::grid)
        .def_readonly("dim", &WienerEnsemble::dim)
        .def_readonly("n_paths", &WienerEnsemble::n_paths)
        .def_readonly("seed", &WienerEnsemble::seed)
        .def_readonly("increments", &WienerEnsemble::increments)
        .def_readonly("nodes", &WienerEnsemble::nodes)
        .def("incr", &WienerEnsemble::incr, py::arg("path"), py::arg("step"),
             py::arg("comp") = 0)
        .def("node", &WienerEnsemble::node, py::arg("path"), py::arg("node"),
             py::arg("comp") = 0);
    m.def("sample_ensemble", &sample_ensemble, py::arg("grid"), py::arg("dim"),
          py::arg("n_paths"), py::arg("seed"));
    m.def("save_ensemble", &save_ensemble, py::arg("ensemble"), py::arg("path"));
    m.def("load_ensemble", &load_ensemble, py::arg("path"));

    py::class_<PathSet>(m, "PathSet")
        .def(py::init<const WienerEnsemble&>(), py::keep_alive<1, 2>(),
             py::arg("ensemble"))
        .def_property_readonly("n_paths", &PathSet::n_paths)
        .def_property_readonly("n_steps", &PathSet::n_steps)
        .def_property_readonly("dim", &PathSet::dim)
        .def_property_readonly("shifted", &PathSet::shifted)
        .def("incr", &PathSet::incr, py::arg("path"), py::arg("step"),
             py::arg("comp") = 0)
        .def("node", &PathSet::node, py::arg("path"), py::arg("node"),
             py::arg("comp") = 0);
    m.def(
        "shift",
        [](const PathSet& paths, const Direction& h, double eps) {
            return shift(paths, h, eps);
        },
        py::keep_alive<0, 1>(), py::keep_alive<0, 2>(), py::arg("paths"),
        py::arg("h"), py::arg("eps"));

    m.def("wiener_integral", &wiener_integral, py::arg("h"), py::arg("paths"));
    m.def("cm_weight", &cm_weight, py::arg("h"), py::arg("paths"));
    m.def("gateaux_quotient", &gateaux_quotient, py::arg("functional"),
          py::arg("paths"), py::arg("h"), py::arg("eps"));
    m.def("default_eps_schedule", &default_eps_schedule);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("eps_schedule", &ConvergenceReport::eps_schedule)
        .def_readonly("errors", &ConvergenceReport::errors)
        .def_readonly("stderrs", &ConvergenceReport::stderrs)
        .def_readonly("q", &ConvergenceReport::q)
        .def_readonly("slope", &ConvergenceReport::slope)
        .def_readonly("tolerance", &ConvergenceReport::tolerance)
        .def_readonly("passed", &ConvergenceReport::passed)
        .def("to_csv", &ConvergenceReport::to_csv)
        .def("to_json", &ConvergenceReport::to_json);
    m.def("convergence_test", &convergence_test, py::arg("functional"),
          py::arg("target"), py::arg("paths"), py::arg("h"),
          py::arg("eps_schedule"), py::arg("q") = 1.0,
          py::arg("tolerance") = std::nullopt);

    py::class_<DirectionSpec>(m, "DirectionSpec")
        .def(py::init<>())
        .def_readwrite("kind", &DirectionSpec::kind)
        .def_readwrite("value", &DirectionSpec::value)
        .def_readwrite("until", &DirectionSpec::until)
        .def_readwrite("node", &DirectionSpec::node)
        .def_readwrite("width", &DirectionSpec::width);
    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("scenario", &ScenarioConfig::scenario)
        .def_readwrite("out_dir", &ScenarioConfig::out_dir)
        .def_readwrite("threads", &ScenarioConfig::threads)
        .def_readwrite("T", &ScenarioConfig::T)
        .def_readwrite("n_steps", &ScenarioConfig::n_steps)
        .def_readwrite("d", &ScenarioConfig::d)
        .def_readwrite("n_paths", &ScenarioConfig::n_paths)
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def_readwrite("eps_schedule", &ScenarioConfig::eps_schedule)
        .def_readwrite("p", &ScenarioConfig::p)
        .def_readwrite("q", &ScenarioConfig::q)
        .def_readwrite("basis_degree", &ScenarioConfig::basis_degree)
        .def_readwrite("bump_width", &ScenarioConfig::bump_width)
        .def_readwrite("direction", &ScenarioConfig::direction)
        .def("validate", &ScenarioConfig::validate)
        .def("serialize", &ScenarioConfig::serialize)
        .def("hash", &ScenarioConfig::hash);
    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("name", &CheckResult::name)
        .def_readonly("passed", &CheckResult::passed)
        .def_readonly("value", &CheckResult::value)
        .def_readonly("tolerance", &CheckResult::tolerance);
    py::class_<RunReport>(m, "RunReport")
        .def_readonly("scenario", &RunReport::scenario)
        .def_readonly("anchor", &RunReport::anchor)
        .def_readonly("config_hash", &RunReport::config_hash)
        .def_readonly("checks", &RunReport::checks)
        .def_readonly("artifacts", &RunReport::artifacts)
        .def("passed", &RunReport::passed)
        .def("to_json", &RunReport::to_json);
    py::class_<ScenarioInfo>(m, "ScenarioInfo")
        .def_readonly("name", &ScenarioInfo::name)
        .def_readonly("description", &ScenarioInfo::description)
        .def_readonly("anchor", &ScenarioInfo::anchor);
    m.def("scenario_catalog",
          [] { return scenario_catalog(); });
    m.def("run_scenario", &run_scenario, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("set_max_threads", &set_max_threads, py::arg("n"));
}
