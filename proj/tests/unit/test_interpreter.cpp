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

#include "schemapar/interpreter.hpp"
#include "schemapar/term.hpp"
#include "schemapar/text.hpp"
#include "test_util.hpp"

namespace schemapar {
namespace {

CellKey cell(const std::string& name, std::vector<std::int64_t> index) {
  CellKey k{name, {}};
  for (auto v : index) k.index.push_back(Term::integer(v));
  return k;
}

std::int64_t int_at(const Memory& m, const CellKey& k) {
  auto it = m.find(k);
  if (it == m.end() || !it->second.is_int()) throw std::runtime_error("no integer at " + k.str());
  return it->second.value();
}

Interpretation zero_filled() {
  Interpretation in;
  in.fill = [](const CellKey&) -> std::optional<std::int64_t> { return 0; };
  return in;
}

TEST(Interpreter, ShiftMatchesDirectLoop) {
  Schema s = testing::corpus_schema("shift.sch");
  for (std::int64_t n : {1, 4, 9}) {
    Interpretation in = zero_filled();
    in.functions["f"] = [](const std::vector<std::int64_t>& a) -> std::optional<std::int64_t> { return 3 * a[0] + 1; };
    in.start[CellKey::simple("N")] = Term::integer(n);
    Outcome out = run(s, in, 10000);
    ASSERT_EQ(out.status, Status::Final) << out.reason;
    std::vector<std::int64_t> a(n + 1, 0);
    for (std::int64_t i = 0; i < n; ++i) a[i + 1] = 3 * a[i] + 1;
    for (std::int64_t i = 1; i <= n; ++i) EXPECT_EQ(int_at(out.memory, cell("a", {i})), a[i]) << n << " " << i;
  }
}

Interpretation hop_interpretation(bool more) {
  Interpretation in = zero_filled();
  in.functions["h"] = [](const std::vector<std::int64_t>& a) -> std::optional<std::int64_t> { return a[0] + 1; };
  in.functions["k"] = [](const std::vector<std::int64_t>& a) -> std::optional<std::int64_t> { return a[0] + a[1]; };
  in.predicates["more"] = [more](const std::vector<std::int64_t>&) -> std::optional<bool> { return more; };
  in.fill = [](const CellKey& k) -> std::optional<std::int64_t> {
    return k.indexed() ? std::optional<std::int64_t>(10 * k.index[0].value()) : std::nullopt;
  };
  in.start[CellKey::simple("i")] = Term::integer(0);
  in.start[CellKey::simple("s")] = Term::integer(0);
  return in;
}

TEST(Interpreter, DoWhileRunsBodyBeforeTest) {
  Outcome out = run(testing::corpus_schema("hop.sch"), hop_interpretation(false), 1000);
  ASSERT_EQ(out.status, Status::Final);
  EXPECT_EQ(int_at(out.memory, CellKey::simple("i")), 1);
  EXPECT_EQ(int_at(out.memory, CellKey::simple("s")), 10);
}

TEST(Interpreter, FuelRunsOut) {
  Outcome out = run(testing::corpus_schema("hop.sch"), hop_interpretation(true), 500);
  EXPECT_EQ(out.status, Status::OutOfFuel);
  EXPECT_FALSE(out.reason.empty());
}

TEST(Interpreter, PartialFunctionGivesUndefined) {
  Interpretation in = hop_interpretation(false);
  in.functions["h"] = [](const std::vector<std::int64_t>&) -> std::optional<std::int64_t> { return std::nullopt; };
  EXPECT_EQ(run(testing::corpus_schema("hop.sch"), in, 1000).status, Status::Undefined);
}

TEST(Interpreter, EmptySimpleVariableIsUndefined) {
  Interpretation in = hop_interpretation(false);
  in.start.erase(CellKey::simple("s"));
  Outcome out = run(testing::corpus_schema("hop.sch"), in, 1000);
  EXPECT_EQ(out.status, Status::Undefined);
  EXPECT_EQ(out.reason, "argument s empty");
}

TEST(Interpreter, BackwardJumpLoops) {
  // l1 increments x until p fails, then l3 copies through g.
  Interpretation in = zero_filled();
  in.functions["f"] = [](const std::vector<std::int64_t>& a) -> std::optional<std::int64_t> { return a[0] + 2; };
  in.functions["g"] = [](const std::vector<std::int64_t>& a) -> std::optional<std::int64_t> { return -a[0]; };
  in.predicates["p"] = [](const std::vector<std::int64_t>& a) -> std::optional<bool> { return a[0] < 7; };
  in.start[CellKey::simple("x")] = Term::integer(0);
  Outcome out = run(testing::corpus_schema("backward_goto.sch"), in, 1000);
  ASSERT_EQ(out.status, Status::Final);
  std::int64_t x = 0;
  do x += 2; while (x < 7);
  EXPECT_EQ(int_at(out.memory, CellKey::simple("x")), x);
  EXPECT_EQ(int_at(out.memory, CellKey::simple("y")), -x);
}

TEST(Interpreter, ObserverSeesWritesInOrder) {
  Schema s = testing::corpus_schema("shift.sch");
  Interpretation in = zero_filled();
  in.functions["f"] = [](const std::vector<std::int64_t>& a) -> std::optional<std::int64_t> { return a[0]; };
  in.start[CellKey::simple("N")] = Term::integer(3);
  std::vector<std::pair<Step, std::string>> writes;
  RunOptions ro;
  ro.observer = [&](const AccessEvent& e) {
    if (e.kind == AccessEvent::Kind::Write && e.cell.indexed()) writes.emplace_back(e.step, e.cell.str());
  };
  ASSERT_EQ(run(s, in, ro).status, Status::Final);
  ASSERT_EQ(writes.size(), 3u);
  for (std::int64_t i = 0; i < 3; ++i) {
    EXPECT_EQ(writes[i].first, (Step{"t1", {i}}));
    EXPECT_EQ(writes[i].second, cell("a", {i + 1}).str());
  }
}

TEST(Herbrand, HopProducesPathTerms) {
  Schema s = testing::corpus_schema("hop.sch");
  Outcome out = herbrand_run(s, Diagram::parse(testing::corpus_text("hop.diag")), 1000);
  ASSERT_EQ(out.status, Status::Final) << out.reason;
  Term hi = Term::app("h", {Term::var("i")});
  EXPECT_EQ(out.memory.at(CellKey::simple("i")), hi);
  EXPECT_EQ(out.memory.at(CellKey::simple("s")), Term::app("k", {Term::cell("a", {hi}), Term::var("s")}));
}

TEST(Herbrand, MissingAtomStops) {
  Outcome out = herbrand_run(testing::corpus_schema("hop.sch"), Diagram{}, 1000);
  EXPECT_NE(out.status, Status::Final);
}

TEST(Herbrand, TermPrintingRoundTrips) {
  Term t = Term::app("g", {Term::cell("data", {Term::cell("idx", {Term::var("p")})}), Term::integer(-3)});
  EXPECT_EQ(parse_term(t.str()), t);
}

TEST(TEquality, SchemaEqualsItself) {
  Schema s = testing::corpus_schema("list_traversal.sch");
  Verdict v = t_equal_check(s, s, 50, 10000, 7);
  EXPECT_FALSE(v.counterexample);
  EXPECT_EQ(v.compared + v.skipped, 50u);
  EXPECT_GT(v.compared, 0u);
}

TEST(TEquality, SwappedArgumentsDiffer) {
  Schema a = parse_schema("a1: y = f(x, y) then end;");
  Schema b = parse_schema("a1: y = f(y, x) then end;");
  Verdict v = t_equal_check(a, b, 50, 1000, 7);
  EXPECT_TRUE(v.counterexample);
  EXPECT_FALSE(v.detail.empty());
}

TEST(TEquality, SignatureMismatchRaises) {
  Schema a = parse_schema("a1: y = f(x) then end;");
  Schema b = parse_schema("a1: y = g(x) then end;");
  EXPECT_THROW(t_equal_check(a, b, 5, 1000, 1), SignatureMismatch);
}

TEST(RandomInterpretation, SeedDeterminesOutcome) {
  Schema s = testing::corpus_schema("pointer_chain.sch");
  auto once = [&](std::uint64_t seed) { return dump_memory(run(s, random_interpretation(s, seed), 5000).memory); };
  EXPECT_EQ(once(3), once(3));
  bool differs = false;
  for (std::uint64_t seed = 4; seed < 10 && !differs; ++seed) differs = once(seed) != once(3);
  EXPECT_TRUE(differs);
}

// With every read naming an earlier iteration, both semantics compute the
// same array.
TEST(PredecessorSemantics, StencilAgreesWithOrdinaryArrays) {
  Schema ordinary = testing::corpus_schema("stencil4.sch");
  Schema pred = testing::corpus_schema("stencil4_pred.sch");
  Interpretation in;
  in.functions["avg4"] = [](const std::vector<std::int64_t>& a) -> std::optional<std::int64_t> {
    return (a[0] * 3 + a[1] * 5 + a[2] * 7 + a[3] * 11) % 1009;
  };
  in.fill = [](const CellKey& k) -> std::optional<std::int64_t> {
    std::int64_t h = 17;
    for (const auto& t : k.index) h = h * 31 + t.value();
    return h % 101;
  };
  in.start[CellKey::simple("N")] = Term::integer(3);
  Outcome a = run(ordinary, in, 100000);
  Outcome b = run(pred, in, 100000);
  ASSERT_EQ(a.status, Status::Final);
  ASSERT_EQ(b.status, Status::Final) << b.reason;
  for (std::int64_t k = 1; k <= 3; ++k) {
    for (std::int64_t i = 1; i <= 3; ++i) {
      for (std::int64_t j = 1; j <= 3; ++j) {
        EXPECT_EQ(int_at(a.memory, cell("f", {k, i, j})), int_at(b.memory, cell("f", {k, i, j})));
      }
    }
  }
}

}  // namespace
}  // namespace schemapar
