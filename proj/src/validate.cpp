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

#include "schemapar/validate.hpp"

#include <map>
#include <set>

namespace schemapar {

namespace {

class Checker {
 public:
  explicit Checker(const Schema& schema) : schema_(schema) {}

  ValidationReport run() {
    check_blocks();
    check_labels();
    check_symbols();
    return std::move(report_);
  }

 private:
  void issue(const Label& label, std::string message) {
    report_.issues.push_back({label, std::move(message)});
  }

  void check_blocks() {
    if (schema_.procs.contains(schema_.main.name)) {
      issue("", "procedure name " + schema_.main.name + " is reserved");
    }
    std::map<std::string, std::vector<Label>> owners;
    for (const auto* b : schema_.blocks()) {
      if (b->final_label.empty()) issue("", "missing final label in " + b->name);
      for (const auto& i : b->instructions) {
        if (i.label.empty()) issue("", "empty input label in " + b->name);
        if (const auto* body = i.body()) {
          if (!schema_.find_block(*body)) {
            issue(i.label, "unknown procedure " + *body);
          } else {
            owners[*body].push_back(i.label);
          }
        }
      }
    }
    for (const auto& [name, b] : schema_.procs) {
      if (!b.inline_body) continue;
      const auto& who = owners[name];
      if (who.size() > 1) issue(who[1], "inline body " + name + " is used more than once");
    }
  }

  void check_labels() {
    // Input labels are unique across the whole schema; a block's final label
    // belongs to that block only.
    std::map<Label, std::string> seen;
    for (const auto* b : schema_.blocks()) {
      for (const auto& i : b->instructions) {
        if (i.label.empty()) continue;
        if (!seen.emplace(i.label, b->name).second) issue(i.label, "duplicate input label " + i.label);
      }
    }
    std::map<Label, std::string> finals;
    for (const auto* b : schema_.blocks()) {
      if (b->final_label.empty()) continue;
      if (seen.contains(b->final_label)) {
        issue(b->final_label, "final label " + b->final_label + " of " + b->name + " is also an input label");
      }
      auto [it, fresh] = finals.emplace(b->final_label, b->name);
      if (!fresh) {
        issue(b->final_label, "final label " + b->final_label + " shared by " + it->second + " and " + b->name);
      }
    }
    for (const auto* b : schema_.blocks()) {
      std::set<Label> inputs = b->input_labels();
      for (const auto& i : b->instructions) {
        for (const auto& o : i.outputs()) {
          if (o != b->final_label && !inputs.contains(o)) {
            issue(i.label, "undefined output label " + o + " at " + i.label);
          }
        }
      }
    }
  }

  void check_symbols() {
    std::map<std::string, std::size_t> arity;
    std::map<std::string, std::size_t> dims;
    std::set<std::string> simple;
    std::set<std::string> reported;
    auto once = [&](const Label& l, const std::string& key, std::string msg) {
      if (reported.insert(key).second) issue(l, std::move(msg));
    };
    auto note_symbol = [&](const Label& l, const std::string& sym, std::size_t n) {
      auto [it, fresh] = arity.emplace(sym, n);
      if (!fresh && it->second != n) once(l, "arity:" + sym, "inconsistent arity for " + sym);
    };
    auto note_var = [&](const Label& l, const Variable& v) {
      if (v.indexed()) {
        auto [it, fresh] = dims.emplace(v.name, v.indexes.size());
        if (!fresh && it->second != v.indexes.size()) {
          once(l, "dims:" + v.name, "inconsistent dimensionality for " + v.name);
        }
        for (const auto& e : v.indexes) {
          if (const auto* c = e.call()) note_symbol(l, c->fsym, c->args.size());
        }
        for (const auto& s : v.index_variables()) simple.insert(s);
      } else {
        simple.insert(v.name);
      }
    };
    for (const auto* b : schema_.blocks()) {
      for (const auto& i : b->instructions) {
        for_each_variable(i, [&](const Variable& v) { note_var(i.label, v); });
        if (const auto* a = i.as_assign()) {
          if (const auto* ap = std::get_if<Apply>(&a->source)) note_symbol(i.label, ap->fsym, ap->args.size());
        } else if (const auto* c = i.as_cond()) {
          if (const auto* p = std::get_if<Predicate>(&c->test)) note_symbol(i.label, p->psym, p->args.size());
        } else if (const auto* lp = i.as_loop()) {
          if (const auto* p = std::get_if<Predicate>(&lp->control)) note_symbol(i.label, p->psym, p->args.size());
        }
      }
    }
    // Under predecessor semantics a simple target doubles as the array of
    // its per-iteration values, so the name clash is intended there.
    if (!schema_.predecessor_semantics) {
      for (const auto& [name, n] : dims) {
        if (simple.contains(name)) issue("", "name " + name + " used as both simple variable and array");
      }
    }
    for (const auto& [name, n] : arity) {
      if (simple.contains(name) || dims.contains(name)) {
        issue("", "name " + name + " used as both symbol and variable");
      }
    }
  }

  const Schema& schema_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const Schema& schema) { return Checker(schema).run(); }

}  // namespace schemapar
