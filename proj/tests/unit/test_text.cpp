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

#include <gtest/gtest.h>

#include "schemapar/term.hpp"
#include "schemapar/text.hpp"
#include "test_util.hpp"

namespace schemapar {
namespace {

TEST(Text, CorpusRoundTrip) {
  for (const auto& f : testing::corpus_files()) {
    Schema s = parse_schema_unchecked(testing::corpus_text(f));
    std::string printed = pretty_print(s);
    Schema again = parse_schema_unchecked(printed);
    EXPECT_EQ(again, s) << f << "\n" << printed;
    EXPECT_EQ(pretty_print(again), printed) << f;
  }
}

TEST(Text, FinalLabelInferred) {
  Schema s = parse_schema("a: x = f(x) then b;\nb: y = g(x, y) then done;");
  EXPECT_EQ(s.main.final_label, "done");
  EXPECT_EQ(s.main.instructions.size(), 2u);
}

TEST(Text, SemanticsHeader) {
  EXPECT_TRUE(testing::corpus_schema("stencil4_pred.sch").predecessor_semantics);
  EXPECT_FALSE(testing::corpus_schema("stencil4.sch").predecessor_semantics);
}

TEST(Text, CountedLoopFields) {
  Schema s = testing::corpus_schema("shift.sch");
  const Loop* loop = s.main.instructions.front().as_loop();
  ASSERT_NE(loop, nullptr);
  const Counter* c = std::get_if<Counter>(&loop->control);
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->var, "i");
  EXPECT_EQ(c->start, Polynomial::constant(0));
  ASSERT_EQ(c->conditions.size(), 1u);
  EXPECT_EQ(c->conditions[0].rhs, Polynomial::variable("N"));
}

TEST(Text, ErrorCarriesPosition) {
  try {
    parse_schema("a: x = f(x) then b;\nb: y = $ then end;");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span().line, 2u);
    EXPECT_EQ(e.span().column, 8u);
    EXPECT_EQ(e.detail(), "unexpected character");
  }
}

TEST(Text, RejectsUnknownSemantics) {
  EXPECT_THROW(parse_schema("semantics shadows;\na: x = f(x) then end;"), ParseError);
}

TEST(Text, RejectsNestedArrayIndex) {
  EXPECT_THROW(parse_schema("a: x = f(y[z[i]]) then end;"), ParseError);
}

TEST(Text, RejectsUnterminatedBlock) {
  EXPECT_THROW(parse_schema("L: do {\n a: x = f(x) then e;\n"), ParseError);
}

TEST(Text, RejectsWrongIncrement) {
  EXPECT_THROW(parse_schema("L: for (i = 0; i < N; j++) { a: x[i] = f(x[i]) then e; } then end;"), ParseError);
}

TEST(Text, ValidationErrorsRaisedByCheckedParse) {
  EXPECT_THROW(parse_schema("a: x = f(x) then b;\nb: if p(x) then c else d;"), SchemaError);
}

TEST(Text, MissingFileRaises) { EXPECT_THROW(read_file("/nonexistent/x.sch"), SchemaError); }

TEST(Diagram, ParseAndLookup) {
  Diagram d = Diagram::parse("// stop after one hop\nmore(h(i)) = false\n\np(x) = true\n");
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.lookup("more", {Term::app("h", {Term::var("i")})}), false);
  EXPECT_EQ(d.lookup("p", {Term::var("x")}), true);
  EXPECT_FALSE(d.lookup("p", {Term::var("y")}));
  EXPECT_EQ(Diagram::parse(d.str()).str(), d.str());
}

TEST(Diagram, ContradictionRejected) {
  Diagram d;
  d.set("p", {Term::var("x")}, true);
  EXPECT_THROW(d.set("p", {Term::var("x")}, false), SchemaError);
}

TEST(Term, BracketDepth) {
  Term inner = Term::cell("idx", {Term::var("p")});
  Term outer = Term::cell("data", {inner});
  EXPECT_EQ(Term::var("p").bracket_depth(), 0);
  EXPECT_EQ(inner.bracket_depth(), 1);
  EXPECT_EQ(outer.bracket_depth(), 2);
  EXPECT_EQ(Term::app("g", {outer, Term::var("s")}).bracket_depth(), 2);
}

}  // namespace
}  // namespace schemapar
