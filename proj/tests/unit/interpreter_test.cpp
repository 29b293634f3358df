#include <gtest/gtest.h>

#include "intentcheck/interp/interpreter.hpp"

using namespace intentcheck;
using namespace intentcheck::calculus;
using namespace intentcheck::interp;

namespace {
Value S(const char* s) { return Value::string(s); }
Value P(const char* s) { return Value::path(s); }
ElemPathExpr file_e(const char* p) { return ElemPathExpr("file", lit(P(p))); }
ElementPath file_p(const char* p) { return ElementPath("file", P(p)); }
}  // namespace

TEST(Interpret, EmptyProgram) {
  auto outs = interpret({});
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_TRUE(outs[0].initial.empty());
  EXPECT_TRUE(outs[0].delta.empty());
  EXPECT_EQ(outs[0].result, Value::unit());
  EXPECT_EQ(outs[0].status, Status::Returned);
}

TEST(Interpret, CreateDirectory) {
  Program p{add_elem(file_e("/srv/www")), add_attr({file_e("/srv/www"), "state"}, lit(Value::enum_member("file_state", "directory")))};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_TRUE(outs[0].initial.empty());
  EXPECT_EQ(outs[0].delta.find_elem(file_p("/srv/www")), Presence::Present);
  EXPECT_EQ(*outs[0].delta.find_attr({file_p("/srv/www"), "state"}), Value::enum_member("file_state", "directory"));
  EXPECT_EQ(outs[0].delta.size(), 2u);
}

TEST(Interpret, ExistsForksOnInitial) {
  Program p{exists(file_e("/p"), {ret(lit(Value::boolean(true)))}, {ret(lit(Value::boolean(false)))})};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 2u);
  EXPECT_EQ(outs[0].initial.find_elem(file_p("/p")), Presence::Present);
  EXPECT_EQ(outs[0].result, Value::boolean(true));
  EXPECT_EQ(outs[1].initial.find_elem(file_p("/p")), Presence::Absent);
  EXPECT_EQ(outs[1].result, Value::boolean(false));
  EXPECT_TRUE(outs[0].delta.empty());
  EXPECT_TRUE(outs[1].delta.empty());
}

TEST(Interpret, ReadMintsInInitial) {
  AbstractState seed;
  seed.set_elem(file_p("/path"), Presence::Present);
  Program p{get("o", {file_e("/path"), "owner"}), ret(var("o"))};
  auto outs = interpret(p, {}, nullptr, SymbolSource::for_program(), {}, seed);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0].result, Value::symbolic(0));
  EXPECT_EQ(*outs[0].initial.find_attr({file_p("/path"), "owner"}), Value::symbolic(0));
}

TEST(Interpret, ReadOnCreatedElementMintsInDelta) {
  Program p{add_elem(file_e("/copy")), get("o", {file_e("/copy"), "owner"}), ret(var("o"))};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_NE(outs[0].delta.find_attr({file_p("/copy"), "owner"}), nullptr);
  EXPECT_EQ(outs[0].initial.find_attr({file_p("/copy"), "owner"}), nullptr);
}

TEST(Interpret, ReadWrittenValue) {
  Program p{add_elem(file_e("/p")), add_attr({file_e("/p"), "owner"}, lit(S("root"))), get("o", {file_e("/p"), "owner"}), ret(var("o"))};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0].result, S("root"));
  EXPECT_TRUE(outs[0].initial.empty());
}

TEST(Interpret, ReadThroughAbsentFails) {
  Program p{add_not_elem(file_e("/p")), get("o", {file_e("/p"), "owner"})};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_TRUE(outs[0].failed());
}

// a recreated file starts empty, whatever the initial state knew about its lines
TEST(Interpret, RecreatedElementLosesChildren) {
  auto line = file_e("/p").child("line", lit(S("1")));
  AbstractState seed;
  seed.set_elem(file_p("/p"), Presence::Present);
  seed.set_elem(file_p("/p").child("line", S("1")), Presence::Present);
  seed.set_attr({file_p("/p").child("line", S("1")), "owner"}, S("root"));
  Program p{add_not_elem(file_e("/p")), add_elem(file_e("/p")), get("o", {line, "owner"})};
  auto outs = interpret(p, {}, nullptr, SymbolSource::for_program(), {}, seed);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_TRUE(outs[0].failed());
}

TEST(Interpret, NegatedAddAndIdempotence) {
  Program once{add_elem(file_e("/p"))};
  Program twice{add_elem(file_e("/p")), add_elem(file_e("/p"))};
  EXPECT_EQ(interpret(once)[0].delta, interpret(twice)[0].delta);
  Program del{add_elem(file_e("/p")), add_attr({file_e("/p"), "mode"}, lit(S("0644"))), add_not_elem(file_e("/p"))};
  auto outs = interpret(del);
  EXPECT_EQ(outs[0].delta.size(), 1u);
  EXPECT_EQ(outs[0].delta.find_elem(file_p("/p")), Presence::Absent);
}

TEST(Interpret, BranchOnNegatedSymbolRecordsTrue) {
  Program p{get("b", {{}, "flag"}), if_(fn("not", {var("b")}), {ret(lit(S("then")))}, {ret(lit(S("else")))})};
  LabelTable labels;
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 2u);
  EXPECT_EQ(*outs[1].initial.find_attr({{}, "flag"}), Value::boolean(true));
  EXPECT_EQ(*outs[0].initial.find_attr({{}, "flag"}), Value::boolean(false));
}

TEST(Interpret, BranchOnEqSubstitutes) {
  Program p{get("os", {{}, "os_family"}), if_(fn("eq", {var("os"), lit(S("Debian"))}), {ret(var("os"))}, {ret(lit(S("other")))})};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 2u);
  EXPECT_EQ(*outs[0].initial.find_attr({{}, "os_family"}), S("Debian"));
  EXPECT_EQ(outs[0].result, S("Debian"));
  EXPECT_TRUE(outs[0].constraints.empty());
  // else branch keeps the symbol and records the negative constraint
  EXPECT_EQ(outs[1].constraints.size(), 1u);
}

TEST(Interpret, ConstraintReuse) {
  Program p{get("os", {{}, "os_family"}),
            if_(fn("eq", {var("os"), lit(S("Debian"))}), {}, {}),
            if_(fn("eq", {var("os"), lit(S("Debian"))}), {add_elem(file_e("/a"))}, {add_elem(file_e("/b"))})};
  auto outs = interpret(p);
  EXPECT_EQ(outs.size(), 2u);
}

TEST(Interpret, ConcreteConditionSingleBranch) {
  Program p{if_(lit(Value::boolean(true)), {ret(lit(S("t")))}, {ret(lit(S("e")))})};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0].result, S("t"));
  EXPECT_TRUE(outs[0].trace.empty());
}

TEST(Interpret, NonBooleanCondition) {
  Program p{if_(lit(S("x")), {}, {})};
  try {
    interpret(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonBooleanCondition);
  }
}

TEST(Interpret, ForeachConcrete) {
  Program p{foreach("x", lit(Value::list({S("a"), S("b")})), {add_elem(ElemPathExpr("item", var("x")))})};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0].delta.find_elem(ElementPath("item", S("a"))), Presence::Present);
  EXPECT_EQ(outs[0].delta.find_elem(ElementPath("item", S("b"))), Presence::Present);
  EXPECT_EQ(outs[0].delta.size(), 2u);
}

TEST(Interpret, ForeachSymbolicUsesUniversalMarker) {
  Program p{get("l", {{}, "items"}), foreach("x", var("l"), {add_elem(ElemPathExpr("item", var("x")))})};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 1u);
  ASSERT_EQ(outs[0].delta.size(), 1u);
  const auto& key = outs[0].delta.elems().begin()->first.segments[0].key;
  EXPECT_TRUE(key.is(ValueKind::Symbolic));
  EXPECT_TRUE(key.universal());
}

TEST(Interpret, ForeachEmptyList) {
  Program p{foreach("x", lit(Value::list({})), {add_elem(ElemPathExpr("item", var("x")))})};
  auto outs = interpret(p);
  EXPECT_TRUE(outs[0].delta.empty());
}

TEST(Interpret, ForeachNonList) {
  Program p{foreach("x", lit(S("a")), {})};
  EXPECT_THROW(interpret(p), Error);
}

TEST(Interpret, CaseOverSymbolForks) {
  Program p{get("v", {{}, "opt"}), case_(var("v"), "a", {ret(var("a"))}, "b", {ret(lit(S("none")))})};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 2u);
  EXPECT_TRUE(outs[0].initial.find_attr({{}, "opt"})->is(ValueKind::Left));
  EXPECT_TRUE(outs[1].initial.find_attr({{}, "opt"})->is(ValueKind::Right));
}

TEST(Interpret, StatefulCallAndFailure) {
  ModuleTable mods;
  mods.add({"touch", {"path"}, {exists(ElemPathExpr("file", var("path")), {add_elem(ElemPathExpr("file", var("path"))), ret(lit(Value::boolean(true)))}, {fail()})}});
  mods.add({"noop", {}, {ret(lit(Value::boolean(true)))}});
  Program p{call_fn("r", "touch", lit(make_record({{"path", P("/p")}}))), ret(var("r"))};
  auto outs = interpret(p, {}, &mods);
  ASSERT_EQ(outs.size(), 2u);
  EXPECT_EQ(outs[0].result, Value::boolean(true));
  EXPECT_TRUE(outs[1].failed());

  auto n = interpret({call_fn("r", "noop", lit(make_record({}))), ret(var("r"))}, {}, &mods);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0].result, Value::boolean(true));
  EXPECT_TRUE(n[0].delta.empty());
  EXPECT_THROW(interpret({call_fn("r", "noop", lit(make_record({{"x", S("y")}})))}, {}, &mods), Error);
}

TEST(Interpret, ChooseAlternativesRecordChoiceDecisions) {
  Program p{choose("n", lit(Value::list({S("a"), S("b"), S("c")}))), add_elem(ElemPathExpr("package", var("n")))};
  auto outs = interpret(p, {}, nullptr, SymbolSource::for_query());
  ASSERT_EQ(outs.size(), 3u);
  for (const auto& o : outs) {
    ASSERT_EQ(o.trace.size(), 1u);
    EXPECT_EQ(o.trace[0].kind, Decision::Kind::Choice);
  }
  auto ph = interpret({choose("x", std::nullopt), ret(var("x"))}, {}, nullptr, SymbolSource::for_query());
  EXPECT_TRUE(ph[0].result.existential());
  EXPECT_TRUE(is_query_symbol(ph[0].result.symbol_id()));
}

TEST(Interpret, BranchCapExceeded) {
  Program p;
  for (int i = 0; i < 14; ++i) p.push_back(exists(ElemPathExpr("file", lit(P(("/f" + std::to_string(i)).c_str()))), {}, {}));
  try {
    interpret(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ResourceBoundExceeded);
  }
  Limits tight{4096, 5};
  EXPECT_THROW(interpret(Program(6, add_elem(file_e("/a"))), {}, nullptr, SymbolSource::for_program(), tight), Error);
}

TEST(Interpret, ConjunctionSplitOnThenBranch) {
  Program p{get("a", {{}, "x"}), get("b", {{}, "y"}),
            if_(fn("and", {fn("eq", {var("a"), lit(S("1"))}), fn("eq", {var("b"), lit(S("2"))})}), {ret(lit(S("t")))}, {ret(lit(S("e")))})};
  auto outs = interpret(p);
  ASSERT_EQ(outs.size(), 2u);
  EXPECT_EQ(*outs[0].initial.find_attr({{}, "x"}), S("1"));
  EXPECT_EQ(*outs[0].initial.find_attr({{}, "y"}), S("2"));
}
