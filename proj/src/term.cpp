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

#include "schemapar/term.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace schemapar {

Term Term::make(Kind kind, std::string name, std::vector<Term> args, std::int64_t value) {
  int depth = 0;
  for (const auto& a : args) depth = std::max(depth, a.bracket_depth());
  if (kind == Kind::Cell) ++depth;
  return Term(std::make_shared<const Node>(Node{kind, std::move(name), std::move(args), value, depth}));
}

Term Term::var(std::string name) { return make(Kind::Var, std::move(name), {}, 0); }
Term Term::cell(std::string array, std::vector<Term> index) {
  return make(Kind::Cell, std::move(array), std::move(index), 0);
}
Term Term::app(std::string fsym, std::vector<Term> args) {
  return make(Kind::App, std::move(fsym), std::move(args), 0);
}
Term Term::integer(std::int64_t value) { return make(Kind::Int, "", {}, value); }
Term Term::label(std::string name) { return make(Kind::Label, std::move(name), {}, 0); }

int Term::bracket_depth() const { return node_->depth; }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.value() <=> b.value(); c != 0) return c;
  if (auto c = a.name() <=> b.name(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.args().begin(), a.args().end(), b.args().begin(),
                                                b.args().end());
}

namespace {

void write_list(std::ostringstream& out, const std::vector<Term>& ts) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out << ", ";
    out << ts[i].str();
  }
}

}  // namespace

std::string Term::str() const {
  std::ostringstream out;
  switch (kind()) {
    case Kind::Int:
      out << value();
      break;
    case Kind::Label:
      out << '@' << name();
      break;
    case Kind::Var:
      out << name();
      break;
    case Kind::App:
      out << name() << '(';
      write_list(out, args());
      out << ')';
      break;
    case Kind::Cell:
      out << name() << '[';
      write_list(out, args());
      out << ']';
      break;
  }
  return out.str();
}

namespace {

class TermReader {
 public:
  explicit TermReader(std::string_view s) : s_(s) {}

  Term read_all() {
    Term t = read();
    skip();
    if (i_ != s_.size()) error("trailing characters");
    return t;
  }

  Term read() {
    skip();
    if (i_ >= s_.size()) error("unexpected end of term");
    char c = s_[i_];
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_ + (c == '-' ? 1 : 0);
      std::size_t start = j;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      if (j == start) error("malformed integer");
      std::int64_t v;
      try {
        v = std::stoll(std::string(s_.substr(i_, j - i_)));
      } catch (const std::out_of_range&) {
        error("integer out of range");
      }
      i_ = j;
      return Term::integer(v);
    }
    if (c == '@') {
      ++i_;
      return Term::label(ident());
    }
    std::string name = ident();
    skip();
    if (i_ < s_.size() && (s_[i_] == '(' || s_[i_] == '[')) {
      char close = s_[i_] == '(' ? ')' : ']';
      bool is_cell = close == ']';
      ++i_;
      std::vector<Term> args;
      skip();
      if (i_ < s_.size() && s_[i_] == close) {
        ++i_;
      } else {
        for (;;) {
          args.push_back(read());
          skip();
          if (i_ < s_.size() && s_[i_] == ',') {
            ++i_;
            continue;
          }
          if (i_ < s_.size() && s_[i_] == close) {
            ++i_;
            break;
          }
          error("expected ',' or closing bracket");
        }
      }
      return is_cell ? Term::cell(name, std::move(args)) : Term::app(name, std::move(args));
    }
    return Term::var(name);
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  std::string ident() {
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
    if (j == i_ || !std::isalpha(static_cast<unsigned char>(s_[i_]))) error("expected identifier");
    std::string out(s_.substr(i_, j - i_));
    i_ = j;
    return out;
  }
  [[noreturn]] void error(const std::string& what) const {
    throw SchemaError("term syntax error at offset " + std::to_string(i_) + ": " + what);
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

Term parse_term(std::string_view text) { return TermReader(text).read_all(); }

std::string CellKey::str() const {
  if (index.empty()) return name;
  return Term::cell(name, index).str();
}

std::strong_ordering operator<=>(const CellKey& a, const CellKey& b) {
  if (auto c = a.name <=> b.name; c != 0) return c;
  return std::lexicographical_compare_three_way(a.index.begin(), a.index.end(), b.index.begin(),
                                                b.index.end());
}

std::string dump_memory(const Memory& memory) {
  std::string out;
  for (const auto& [k, v] : memory) out += k.str() + " = " + v.str() + "\n";
  return out;
}

void Diagram::set(const std::string& psym, std::vector<Term> args, bool truth) {
  auto key = std::make_pair(psym, std::move(args));
  auto [it, fresh] = entries_.emplace(key, truth);
  if (!fresh && it->second != truth) {
    throw SchemaError("diagram holds both truth values for " + Term::app(psym, key.second).str());
  }
}

std::optional<bool> Diagram::lookup(const std::string& psym, const std::vector<Term>& args) const {
  auto it = entries_.find(std::make_pair(psym, args));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Diagram Diagram::parse(std::string_view text) {
  Diagram d;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    auto eq = line.rfind('=');
    if (eq == std::string_view::npos) {
      throw SchemaError("diagram line " + std::to_string(line_no) + ": expected '= true|false'");
    }
    std::string truth(line.substr(eq + 1));
    truth.erase(0, truth.find_first_not_of(" \t\r"));
    truth.erase(truth.find_last_not_of(" \t\r") + 1);
    if (truth != "true" && truth != "false") {
      throw SchemaError("diagram line " + std::to_string(line_no) + ": truth must be true or false");
    }
    Term atom;
    try {
      atom = parse_term(line.substr(0, eq));
    } catch (const SchemaError& e) {
      throw SchemaError("diagram line " + std::to_string(line_no) + ": " + e.what());
    }
    if (atom.kind() != Term::Kind::App) {
      throw SchemaError("diagram line " + std::to_string(line_no) + ": expected a predicate atom");
    }
    d.set(atom.name(), atom.args(), truth == "true");
  }
  return d;
}

std::string Diagram::str() const {
  std::string out;
  for (const auto& [key, truth] : entries_) {
    out += Term::app(key.first, key.second).str() + (truth ? " = true\n" : " = false\n");
  }
  return out;
}

}  // namespace schemapar
