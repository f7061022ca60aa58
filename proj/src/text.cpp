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

#include "schemapar/text.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "schemapar/validate.hpp"

namespace schemapar {

namespace {

std::string located(const SourceSpan& span, const std::string& message) {
  return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message;
}

}  // namespace

ParseError::ParseError(SourceSpan span, const std::string& message)
    : SchemaError(located(span, message)), span_(span), detail_(message) {}

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

const std::set<std::string> kKeywords = {"then", "else", "if",   "do",  "while",
                                         "for",  "proc", "final", "aux", "semantics"};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.span = {line, col, 1};
    auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) && uc < 128) {
      std::size_t j = i;
      while (j < text.size() && static_cast<unsigned char>(text[j]) < 128 &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      t.kind = Tok::Ident;
      t.text = std::string(text.substr(i, j - i));
    } else if (std::isdigit(uc) && uc < 128) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(text.substr(i, j - i));
    } else {
      static const char* kPairs[] = {"==", "!=", "&&", "++", "<="};
      t.kind = Tok::Punct;
      for (const char* p : kPairs) {
        if (text.substr(i, 2) == p) t.text = p;
      }
      if (t.text.empty()) {
        if (std::string_view(":;,()[]{}=<+-*@").find(c) == std::string_view::npos) {
          throw ParseError(t.span, "unexpected character");
        }
        t.text = std::string(1, c);
      }
    }
    t.span.length = t.text.size();
    advance(t.text.size());
    out.push_back(std::move(t));
  }
  Token end;
  end.span = {line, col, 0};
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Schema parse() {
    schema_.main.name = "main";
    bool main_final = false;
    while (!at_end()) {
      if (accept_ident("semantics")) {
        const Token& t = expect_name("semantics kind");
        if (t.text != "predecessors") throw ParseError(t.span, "unknown semantics " + t.text);
        schema_.predecessor_semantics = true;
        expect(";");
      } else if (accept_ident("aux")) {
        do {
          schema_.aux.insert(expect_name("variable").text);
        } while (accept(","));
        expect(";");
      } else if (peek_ident("proc")) {
        Token kw = next();
        const Token& name = expect_name("procedure name");
        if (name.text == "main" || schema_.procs.contains(name.text)) {
          throw ParseError(name.span, "duplicate procedure " + name.text);
        }
        expect("{");
        Block b;
        b.name = name.text;
        parse_block(b, kw.span);
        schema_.procs.emplace(b.name, std::move(b));
      } else {
        parse_item(schema_.main, main_final);
      }
    }
    finish_block(schema_.main, main_final, peek().span);
    return std::move(schema_);
  }

  const std::map<Label, SourceSpan>& spans() const { return spans_; }

 private:
  // --- token helpers ---
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool peek_punct(const char* p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  bool peek_ident(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
  bool accept(const char* p) {
    if (!peek_punct(p)) return false;
    next();
    return true;
  }
  bool accept_ident(const char* w) {
    if (!peek_ident(w)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.span, "expected " + what + ", found " + got);
  }
  void expect(const char* p) {
    if (!accept(p)) fail(peek(), std::string("'") + p + "'");
  }
  const Token& expect_name(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.contains(t.text)) fail(t, what);
    next();
    return toks_[pos_ - 1];
  }
  Label expect_label() { return expect_name("label").text; }

  // --- blocks ---
  void parse_block(Block& b, const SourceSpan& open) {
    bool has_final = false;
    while (!accept("}")) {
      if (at_end()) throw ParseError(open, "unterminated block");
      parse_item(b, has_final);
    }
    finish_block(b, has_final, toks_[pos_ - 1].span);
  }

  void parse_item(Block& b, bool& has_final) {
    if (peek_ident("final")) {
      Token kw = next();
      const Token& l = expect_name("label");
      if (has_final) throw ParseError(kw.span, "duplicate final label in " + b.name);
      has_final = true;
      b.final_label = l.text;
      spans_.emplace(l.text, l.span);
      expect(";");
      return;
    }
    parse_statement(b);
  }

  void finish_block(Block& b, bool has_final, const SourceSpan& where) {
    if (has_final) return;
    std::set<Label> inputs = b.input_labels();
    std::set<Label> dangling;
    for (const auto& i : b.instructions) {
      for (const auto& o : i.outputs()) {
        if (!inputs.contains(o)) dangling.insert(o);
      }
    }
    if (dangling.empty()) throw ParseError(where, "missing final label in " + b.name);
    if (dangling.size() > 1) {
      std::string names;
      for (const auto& d : dangling) names += (names.empty() ? "" : ", ") + d;
      throw ParseError(where, "multiple final labels in " + b.name + ": " + names);
    }
    b.final_label = *dangling.begin();
  }

  // --- statements ---
  void parse_statement(Block& b) {
    const Token& lt = peek();
    if (lt.kind != Tok::Ident || kKeywords.contains(lt.text) || !peek_punct(":", 1)) {
      throw ParseError(lt.span, "unknown form");
    }
    Label label = next().text;
    SourceSpan span = lt.span;
    expect(":");
    if (!spans_.contains(label)) spans_.emplace(label, span);
    Instruction instr;
    instr.label = label;
    if (accept_ident("if")) {
      Cond c;
      c.test = parse_test();
      expect_keyword("then");
      c.then_label = expect_label();
      expect_keyword("else");
      c.else_label = expect_label();
      instr.op = std::move(c);
    } else if (peek_ident("do")) {
      next();
      std::string body = parse_body_ref(label);
      if (accept_ident("while")) {
        Loop l;
        l.body = body;
        auto test = parse_test();
        if (auto* p = std::get_if<Predicate>(&test)) {
          l.control = std::move(*p);
        } else {
          l.control = std::get<LabelTest>(test);
        }
        expect_keyword("then");
        l.next = expect_label();
        instr.op = std::move(l);
      } else {
        expect_keyword("then");
        instr.op = Call{body, expect_label()};
      }
    } else if (peek_ident("for")) {
      instr.op = parse_for(label);
    } else if (peek().kind == Tok::Ident && !kKeywords.contains(peek().text)) {
      Assign a;
      a.target = parse_variable();
      expect("=");
      if (accept("@")) {
        a.source = LabelConst{expect_label()};
      } else if (peek().kind == Tok::Ident && peek_punct("(", 1)) {
        const Token& f = expect_name("function symbol");
        Apply ap{f.text, parse_args()};
        a.source = std::move(ap);
      } else if (peek().kind == Tok::Ident) {
        a.source = Copy{parse_variable()};
      } else {
        throw ParseError(peek().span, "unknown form");
      }
      expect_keyword("then");
      a.next = expect_label();
      instr.op = std::move(a);
    } else {
      throw ParseError(peek().span, "unknown form");
    }
    expect(";");
    b.instructions.push_back(std::move(instr));
  }

  void expect_keyword(const char* w) {
    if (!accept_ident(w)) fail(peek(), std::string("'") + w + "'");
  }

  std::string parse_body_ref(const Label& owner) {
    if (peek_punct("{")) {
      Token open = next();
      Block b;
      b.name = inline_body_name(owner);
      b.inline_body = true;
      if (schema_.procs.contains(b.name)) throw ParseError(open.span, "duplicate procedure " + b.name);
      parse_block(b, open.span);
      std::string name = b.name;
      schema_.procs.emplace(name, std::move(b));
      return name;
    }
    const Token& name = expect_name("procedure name");
    return name.text;
  }

  Loop parse_for(const Label& owner) {
    next();  // for
    expect("(");
    Counter k;
    k.var = expect_name("counter variable").text;
    expect("=");
    k.start = parse_poly();
    expect(";");
    do {
      Bound b;
      b.lhs = parse_poly();
      if (accept("<=")) {
        b.rhs = parse_poly() + Polynomial::constant(1);
      } else {
        expect("<");
        b.rhs = parse_poly();
      }
      if (!b.lhs.is_affine() || !b.rhs.is_affine()) {
        throw ParseError(peek().span, "loop bounds must be affine");
      }
      k.conditions.push_back(std::move(b));
    } while (accept("&&"));
    expect(";");
    const Token& inc = expect_name("counter variable");
    if (inc.text != k.var) throw ParseError(inc.span, "increment must name the counter " + k.var);
    expect("++");
    expect(")");
    if (!peek_punct("{")) fail(peek(), "'{'");
    Loop l;
    l.body = parse_body_ref(owner);
    l.control = std::move(k);
    expect_keyword("then");
    l.next = expect_label();
    return l;
  }

  std::variant<Predicate, LabelTest> parse_test() {
    const Token& name = expect_name("predicate or variable");
    if (peek_punct("(")) return Predicate{name.text, parse_args()};
    LabelTest t;
    t.var = name.text;
    if (accept("==")) {
      t.equal = true;
    } else if (accept("!=")) {
      t.equal = false;
    } else {
      fail(peek(), "'(' or a label comparison");
    }
    expect("@");
    t.label = expect_label();
    return t;
  }

  std::vector<Variable> parse_args() {
    expect("(");
    std::vector<Variable> args;
    if (accept(")")) return args;
    do {
      if (peek().kind == Tok::Ident && peek_punct("(", 1)) throw ParseError(peek().span, "unknown form");
      args.push_back(parse_variable());
    } while (accept(","));
    expect(")");
    return args;
  }

  Variable parse_variable() {
    const Token& name = expect_name("variable");
    Variable v{name.text, {}};
    if (accept("[")) {
      do {
        v.indexes.push_back(parse_index());
      } while (accept(","));
      expect("]");
    }
    return v;
  }

  IndexExpr parse_index() {
    if (peek().kind == Tok::Ident && peek_punct("(", 1) && !kKeywords.contains(peek().text)) {
      IndexCall c;
      c.fsym = next().text;
      expect("(");
      if (!accept(")")) {
        do {
          c.args.push_back(simple_index_name());
        } while (accept(","));
        expect(")");
      }
      return IndexExpr(std::move(c));
    }
    return IndexExpr(parse_poly());
  }

  std::string simple_index_name() {
    const Token& t = expect_name("simple variable");
    if (peek_punct("[")) throw ParseError(t.span, "array index must be a simple variable");
    return t.text;
  }

  // poly := term (('+'|'-') term)*
  Polynomial parse_poly() {
    Polynomial p = parse_term();
    for (;;) {
      if (accept("+")) {
        p = p + parse_term();
      } else if (accept("-")) {
        p = p - parse_term();
      } else {
        return p;
      }
    }
  }

  Polynomial parse_term() {
    Polynomial p = parse_factor();
    while (accept("*")) p = p * parse_factor();
    return p;
  }

  Polynomial parse_factor() {
    if (accept("-")) return -parse_factor();
    if (accept("(")) {
      Polynomial p = parse_poly();
      expect(")");
      return p;
    }
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      next();
      try {
        return Polynomial::constant(std::stoll(t.text));
      } catch (const std::out_of_range&) {
        throw ParseError(t.span, "integer literal out of range");
      }
    }
    if (t.kind == Tok::Ident && !kKeywords.contains(t.text)) {
      if (peek_punct("[", 1) || peek_punct("(", 1)) {
        throw ParseError(t.span, "array index must be a simple variable");
      }
      next();
      return Polynomial::variable(t.text);
    }
    fail(t, "index expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Schema schema_;
  std::map<Label, SourceSpan> spans_;
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

std::string join_vars(const std::vector<Variable>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += vs[i].str();
  }
  return out;
}

std::string test_text(const std::variant<Predicate, LabelTest>& t) {
  if (const auto* p = std::get_if<Predicate>(&t)) return p->psym + "(" + join_vars(p->args) + ")";
  const auto& lt = std::get<LabelTest>(t);
  return lt.var + (lt.equal ? " == @" : " != @") + lt.label;
}

class Printer {
 public:
  explicit Printer(const Schema& schema) : schema_(schema) {}

  std::string run() {
    if (schema_.predecessor_semantics) out_ << "semantics predecessors;\n";
    if (!schema_.aux.empty()) {
      out_ << "aux ";
      bool first = true;
      for (const auto& a : schema_.aux) {
        out_ << (first ? "" : ", ") << a;
        first = false;
      }
      out_ << ";\n";
    }
    bool header = schema_.predecessor_semantics || !schema_.aux.empty();
    for (const auto& [name, b] : schema_.procs) {
      if (b.inline_body) continue;
      if (header) out_ << "\n";
      header = true;
      out_ << "proc " << name << " {\n";
      block(b, 1);
      out_ << "}\n";
    }
    if (header) out_ << "\n";
    block(schema_.main, 0);
    return out_.str();
  }

 private:
  void indent(int depth) { out_ << std::string(static_cast<std::size_t>(depth) * 2, ' '); }

  void block(const Block& b, int depth) {
    for (const auto& i : b.instructions) instruction(i, depth);
    indent(depth);
    out_ << "final " << b.final_label << ";\n";
  }

  void body(const std::string& name, int depth) {
    const Block* b = schema_.find_block(name);
    if (b && b->inline_body) {
      out_ << "{\n";
      block(*b, depth + 1);
      indent(depth);
      out_ << "}";
    } else {
      out_ << name;
    }
  }

  void instruction(const Instruction& i, int depth) {
    indent(depth);
    out_ << i.label << ": ";
    if (const auto* a = i.as_assign()) {
      out_ << a->target.str() << " = ";
      if (const auto* ap = std::get_if<Apply>(&a->source)) {
        out_ << ap->fsym << "(" << join_vars(ap->args) << ")";
      } else if (const auto* cp = std::get_if<Copy>(&a->source)) {
        out_ << cp->source.str();
      } else {
        out_ << "@" << std::get<LabelConst>(a->source).label;
      }
      out_ << " then " << a->next;
    } else if (const auto* c = i.as_cond()) {
      out_ << "if " << test_text(c->test) << " then " << c->then_label << " else " << c->else_label;
    } else if (const auto* l = i.as_loop()) {
      if (const auto* k = std::get_if<Counter>(&l->control)) {
        out_ << "for (" << k->var << " = " << k->start.str() << "; ";
        for (std::size_t n = 0; n < k->conditions.size(); ++n) {
          if (n) out_ << " && ";
          out_ << k->conditions[n].lhs.str() << " < " << k->conditions[n].rhs.str();
        }
        out_ << "; " << k->var << "++) ";
        body(l->body, depth);
      } else {
        out_ << "do ";
        body(l->body, depth);
        out_ << " while ";
        if (const auto* p = std::get_if<Predicate>(&l->control)) {
          out_ << test_text(*p);
        } else {
          out_ << test_text(std::get<LabelTest>(l->control));
        }
      }
      out_ << " then " << l->next;
    } else {
      const auto& call = std::get<Call>(i.op);
      out_ << "do ";
      body(call.body, depth);
      out_ << " then " << call.next;
    }
    out_ << ";\n";
  }

  const Schema& schema_;
  std::ostringstream out_;
};

}  // namespace

Schema parse_schema_unchecked(std::string_view text) { return Parser(text).parse(); }

Schema parse_schema(std::string_view text) {
  Parser parser(text);
  Schema schema = parser.parse();
  ValidationReport report = validate(schema);
  if (!report.ok()) {
    const auto& first = report.issues.front();
    SourceSpan span{1, 1, 0};
    if (auto it = parser.spans().find(first.label); it != parser.spans().end()) span = it->second;
    throw ParseError(span, first.message);
  }
  return schema;
}

std::string pretty_print(const Schema& schema) { return Printer(schema).run(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace schemapar
