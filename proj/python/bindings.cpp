// Copyright 2026 The AFETM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Structured values cross the boundary as JSON text in the
// same formats the command-line tool reads and writes; the pure-Python
// package turns them into dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "afetm/baselines.hpp"
#include "afetm/calltree.hpp"
#include "afetm/harness.hpp"
#include "afetm/json_io.hpp"
#include "afetm/progmodel.hpp"
#include "afetm/selector.hpp"
#include "cli.hpp"

namespace py = pybind11;
using namespace afetm;

namespace {

CallTree tree_arg(const std::string& text) { return call_tree_from_json(parse_json(text, "tree")); }

std::string select_instance(const std::string& instance_json, const std::string& params_json,
                            bool oracle) {
  const CoverageInstance inst = coverage_instance_from_json(parse_json(instance_json, "instance"));
  MmasParams params;
  update_from_json(params, parse_json(params_json, "params"));
  const SelectionSolution sol = oracle ? brute_force_select(inst) : mmas_select(inst, params);
  return dump_json(to_json(sol, inst));
}

std::string select_model(const ProgramModel& model, const std::string& workload, double p,
                         double sampling_seconds, const std::string& params_json,
                         std::uint64_t sampling_seed) {
  MmasParams params;
  update_from_json(params, parse_json(params_json, "params"));
  const WeightVector w = sample_frequencies(model, workload, sampling_seconds, sampling_seed);
  const CoverageInstance inst = build_coverage_instance(model, w, p);
  return dump_json(to_json(mmas_select(inst, params), inst));
}

std::string color(const std::string& fcts_json, const std::vector<std::string>& traced) {
  const auto fcts = call_trees_from_json(parse_json(fcts_json, "fcts"));
  const FunctionSet set(traced.begin(), traced.end());
  const ColoringResult r = color_fcts(fcts, set);
  return dump_json(Json{{"colored", to_json(std::span<const CallTree>(r.colored))},
                        {"callstack", r.callstack}});
}

std::string build_afct_ndjson(const std::string& ndjson) {
  std::istringstream in(ndjson);
  return dump_json(to_json(build_afct(read_events_ndjson(in))));
}

std::string execute(const ProgramModel& model, const std::string& request, std::uint64_t seed) {
  const Execution e = execute_request(model, request, seed);
  std::ostringstream events;
  write_events_ndjson(events, e.events);
  return dump_json(Json{{"fct", to_json(e.fct)}, {"events", events.str()}, {"cost", e.cost}});
}

py::tuple run_cli_args(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

void evaluate(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  py::gil_scoped_release release;
  const ProgramModel model = load_program_spec(cfg.model);
  write_reports(run_experiment(cfg, model), cfg, out_dir);
}

}  // namespace

PYBIND11_MODULE(_afetm, m) {
  m.doc() = "Adaptive function tracing and GCN fault diagnosis";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());

  py::class_<ProgramModel>(m, "ProgramModel")
      .def_property_readonly("function_count", &ProgramModel::function_count)
      .def_property_readonly("fingerprint", &ProgramModel::fingerprint)
      .def_property_readonly("request_types", &ProgramModel::request_types)
      .def_property_readonly("functions",
                             [](const ProgramModel& model) {
                               std::vector<std::string> ids;
                               for (const auto& f : model.functions()) ids.push_back(f.id);
                               return ids;
                             })
      .def("to_json", [](const ProgramModel& model) { return dump_json(to_json(model.spec())); });

  m.def("load_program", [](const std::string& path) { return load_program_spec(path); },
        py::arg("path"));
  m.def("random_program", [](std::uint64_t seed) { return random_program(seed); },
        py::arg("seed"));
  m.def("execute", &execute, py::arg("model"), py::arg("request"), py::arg("seed"));
  m.def("select_instance", &select_instance, py::arg("instance"), py::arg("params") = "{}",
        py::arg("oracle") = false);
  m.def("select_model", &select_model, py::arg("model"), py::arg("workload"), py::arg("p"),
        py::arg("sampling_seconds") = kDefaultSamplingSeconds, py::arg("params") = "{}",
        py::arg("sampling_seed") = 0);
  m.def("color", &color, py::arg("fcts"), py::arg("traced"));
  m.def("build_afct", &build_afct_ndjson, py::arg("events"));
  m.def(
      "tree_edit_distance",
      [](const std::string& a, const std::string& b) {
        return tree_edit_distance(tree_arg(a), tree_arg(b));
      },
      py::arg("a"), py::arg("b"));
  m.def("gaussian_influence", py::overload_cast<double, double>(&gaussian_influence),
        py::arg("delta"), py::arg("sigma"));
  m.def("evaluate", &evaluate, py::arg("config"), py::arg("out_dir"));
  m.def("run_cli", &run_cli_args, py::arg("args"));
}
