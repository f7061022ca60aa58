// Copyright 2026 The schemapar Authors
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

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "schemapar/dependence.hpp"
#include "schemapar/normalize.hpp"
#include "schemapar/parallel.hpp"
#include "schemapar/text.hpp"
#include "schemapar/validate.hpp"

namespace py = pybind11;
using namespace schemapar;

namespace {

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

py::dict check(const std::string& text) {
  Schema s = parse_schema_unchecked(text);
  ValidationReport vr = validate(s);
  auto lv = check_l_schema(s);
  py::list issues, loops, forward;
  for (const auto& i : vr.issues) issues.append(i.message);
  for (const auto& v : lv) loops.append(v.message);
  if (vr.ok() && lv.empty()) {
    for (const auto& v : forward_violations(s)) forward.append(py::make_tuple(v.reader, v.writer, v.variable));
  }
  py::dict d;
  d["validation"] = issues;
  d["loop_structure"] = loops;
  d["forward"] = forward;
  d["ok"] = vr.ok() && lv.empty() && forward.empty();
  return d;
}

py::dict separate(const std::string& text, const std::string& loop, bool orient) {
  Schema s = parse_schema(text);
  if (orient) s = forward_orient(s);
  auto [sep, rep] = separate_loop(s, loop);
  py::list levels;
  for (const auto& l : rep.levels) levels.append(l.labels);
  py::dict d;
  d["controller_count"] = rep.controller_count;
  d["strictly_separated"] = rep.strictly_separated;
  d["level_conditions"] = rep.level_conditions_hold;
  d["levels"] = levels;
  d["schema"] = pretty_print(sep.schema);
  return d;
}

py::list equations(const std::string& text, const Params& params, const Bounds& overrides) {
  Schema s = parse_schema(text);
  py::list out;
  for (const auto& eq : build_connection_equations(s, derive_bounds(s, params, overrides))) {
    EquationClass c = classify(eq, params);
    py::dict d;
    d["equation"] = eq.str();
    d["class"] = c.str();
    if (c.kind == EquationClass::Kind::Linear) {
      SolveOptions so;
      so.params = params;
      SolutionSet sol = solve_linear(eq, so);
      d["pairs"] = std::vector<std::pair<IterationVector, IterationVector>>(sol.pairs.begin(), sol.pairs.end());
    }
    out.append(d);
  }
  return out;
}

std::vector<std::vector<IterationVector>> wavefronts(const std::string& text, const Params& params,
                                                     const Bounds& overrides) {
  Schema s = parse_schema(text);
  PredecessorProgram prog = predecessor_program(s);
  IterationGraph graph = build_graph(prog, iteration_domain(prog, params, overrides), params);
  std::vector<std::vector<IterationVector>> out;
  for (auto& f : schedule_wavefronts(graph)) out.push_back(std::move(f.iterations));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Program schema analysis: separation, dependences and wavefront schedules.";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

  m.def("run_cli", &run_cli, py::arg("args"), "Runs the command-line tool; returns (status, stdout, stderr).");
  m.def("normalize_text", [](const std::string& text) { return pretty_print(parse_schema(text)); },
        py::arg("text"));
  m.def("check", &check, py::arg("text"));
  m.def("forward_orient", [](const std::string& text) { return pretty_print(forward_orient(parse_schema(text))); },
        py::arg("text"));
  m.def("separate", &separate, py::arg("text"), py::arg("loop"), py::arg("orient") = false);
  m.def("equations", &equations, py::arg("text"), py::arg("params") = Params{}, py::arg("bounds") = Bounds{});
  m.def("wavefronts", &wavefronts, py::arg("text"), py::arg("params") = Params{}, py::arg("bounds") = Bounds{});
  m.def("find_normal", &find_normal, py::arg("distances"), py::arg("cap") = 4);
}
