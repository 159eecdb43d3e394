#include <filesystem>

#include "doctest.h"
#include "vlam/error.hpp"
#include "vlam/theory.hpp"

using namespace vlam;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(VLAM_DATA_DIR) / name; }

TheoryErrorKind rejection(const std::string& text) {
  try {
    load_theory(text);
  } catch (const TheoryError& e) {
    return e.kind();
  }
  FAIL("expected a theory error for:\n" << text);
  return TheoryErrorKind::Parse;
}

bool has_axiom(const Theory& t, const char* ctx, const char* lhs, const char* rhs, const QuantaleValue& q) {
  ParseOptions o = t.parse_options();
  Context c = parse_context(ctx, o);
  Term l = parse_term(lhs, o), r = parse_term(rhs, o);
  for (const auto& ax : t.axioms) {
    const auto& e = ax.equation;
    if (e.context == c && alpha_eq(e.lhs, l) && alpha_eq(e.rhs, r) && e.label == q) return true;
  }
  return false;
}

const char* kHeader = "quantale metric\nground X\nop wait_n : X -> X for n in 0..4\nop merge : X, X -> X\n";

}  // namespace

TEST_CASE("wait theory") {
  Theory t = load_theory_file(data("waits.thy"));
  auto L = QuantaleSpec::lawvere();
  CHECK(t.quantale == L);
  CHECK(t.symmetric);
  CHECK(t.signature.operations.size() == 33);
  CHECK(has_axiom(t, "x:X", "wait_0(x)", "x", L.value(0)));
  CHECK(has_axiom(t, "x:X", "wait_2(wait_3(x))", "wait_5(x)", L.value(0)));
  CHECK(has_axiom(t, "x:X", "wait_2(x)", "wait_5(x)", L.value(3)));
  CHECK(has_axiom(t, "x:X", "wait_5(x)", "wait_2(x)", L.value(3)));
  CHECK_FALSE(has_axiom(t, "x:X", "wait_2(x)", "wait_5(x)", L.value(1)));
  // 1 + 33*34/2 composition instances within the bound + 33*32 distance instances.
  CHECK(t.axioms.size() == 1 + 561 + 33 * 32);
  for (const auto& ax : t.axioms) CHECK(ax.equation.type == Type::ground("X"));
}

TEST_CASE("ordered wait theory") {
  Theory t = load_theory_file(data("waits_ordered.thy"));
  auto B = QuantaleSpec::boolean();
  CHECK(t.quantale == B);
  CHECK_FALSE(t.symmetric);
  CHECK(has_axiom(t, "x:X", "wait_1(x)", "wait_2(x)", B.top()));
  CHECK_FALSE(has_axiom(t, "x:X", "wait_2(x)", "wait_1(x)", B.top()));
  // Classical equations give both directions.
  CHECK(has_axiom(t, "x:X", "wait_0(x)", "x", B.top()));
  CHECK(has_axiom(t, "x:X", "x", "wait_0(x)", B.top()));
}

TEST_CASE("probabilistic theory") {
  Theory t = load_theory_file(data("probwalk.thy"));
  CHECK(t.definitions.count("walk1"));
  CHECK(has_axiom(t, "x1:Real, x2:Real", "bernoulli(x1, x2, u_3(*))", "bernoulli(x1, x2, u_5(*))",
                  QuantaleSpec::lawvere().value(Rational(1, 5))));
  Goal g = parse_goal(t, "- |- walk1 ={1/5} walk2");
  CHECK(g.kind == GoalKind::Labelled);
  CHECK(g.type == parse_type("Real -o Real"));
  CHECK(g.lhs.free_vars().empty());
}

TEST_CASE("empty theory") {
  Theory t = load_theory("quantale godel\n");
  CHECK(t.axioms.empty());
  CHECK(t.quantale == QuantaleSpec::godel());
  Theory blank = load_theory("");
  CHECK(blank.quantale == QuantaleSpec::lawvere());
}

TEST_CASE("rejections") {
  std::string h = kHeader;
  CHECK(rejection(h + "axiom [x:X] wait_1(x) ={sqrt(2)} wait_2(x)\n") == TheoryErrorKind::NonBasisLabel);
  CHECK(rejection(h + "axiom [x:X] wait_1(x) ={-1} wait_2(x)\n") == TheoryErrorKind::NonBasisLabel);
  CHECK(rejection("quantale godel\nground X\nop f : X -> X\naxiom [x:X] f(x) ={2} x\n") ==
        TheoryErrorKind::NonBasisLabel);
  CHECK(rejection(h + "axiom [x:X] merge(x, x) ={0} x\n") == TheoryErrorKind::Linearity);
  CHECK(rejection(h + "axiom [x:X, y:X] x ={0} x\n") == TheoryErrorKind::Linearity);
  CHECK(rejection(h + "op merge : X, X -> X\n") == TheoryErrorKind::DuplicateOperation);
  CHECK(rejection(h + "op wait_n : X -> X for n in 3..5\n") == TheoryErrorKind::DuplicateOperation);
  CHECK(rejection(h + "axiom [x:X] x ={0} \\y:X. merge(x, y)\n") == TheoryErrorKind::Sort);
  CHECK(rejection(h + "op bad : Y -> X\n") == TheoryErrorKind::Sort);
  CHECK(rejection(h + "axiom [x:X] nope(x) ={0} x\n") == TheoryErrorKind::UnknownSymbol);
  CHECK(rejection(h + "axiom [x:X] wait_1(x) ={0 wait_2(x)\n") == TheoryErrorKind::Parse);
  CHECK(rejection(h + "frobnicate\n") == TheoryErrorKind::Parse);
  try {
    load_theory(h + "\n\naxiom [x:X] merge(x, x) ={0} x\n");
  } catch (const TheoryError& e) {
    CHECK(e.line() == 7);
  }
}

TEST_CASE("labels") {
  auto L = QuantaleSpec::lawvere();
  CHECK(eval_label(L, "|3-5|/10") == L.value(Rational(1, 5)));
  CHECK(eval_label(L, "0.25") == L.value(Rational(1, 4)));
  CHECK(eval_label(L, "n*2+1", {{"n", 3}}) == L.value(7));
  CHECK(eval_label(L, "inf") == L.infinity());
  CHECK(eval_label(L, "top") == L.top());
  CHECK_THROWS_AS(eval_label(QuantaleSpec::boolean(), "inf"), TheoryError);
  CHECK_THROWS_AS(eval_label(L, "1/0"), TheoryError);
}

TEST_CASE("save and load round trip") {
  for (const char* name : {"waits.thy", "waits_ordered.thy", "probwalk.thy"}) {
    Theory t = load_theory_file(data(name));
    Theory u = load_theory(save_theory(t));
    CHECK(u.quantale == t.quantale);
    CHECK(u.symmetric == t.symmetric);
    CHECK(u.signature.ground_types == t.signature.ground_types);
    CHECK(u.signature.operations.size() == t.signature.operations.size());
    for (const auto& [k, s] : t.signature.operations) {
      const OpSig* o = u.signature.find(k);
      REQUIRE(o);
      CHECK(o->args == s.args);
      CHECK(o->result == s.result);
    }
    REQUIRE(u.axioms.size() == t.axioms.size());
    for (std::size_t i = 0; i < t.axioms.size(); ++i) {
      const auto& a = t.axioms[i].equation;
      const auto& b = u.axioms[i].equation;
      CHECK(a.context == b.context);
      CHECK(alpha_eq(a.lhs, b.lhs));
      CHECK(alpha_eq(a.rhs, b.rhs));
      CHECK(a.label == b.label);
    }
    CHECK(save_theory(u) == save_theory(t));
  }
}

TEST_CASE("classical equations") {
  Theory b = load_theory("quantale bool\nground X\nop f : X -> X\n");
  Context c = parse_context("x:X");
  auto [e1, e2] = classical_equation(b, c, parse_term("f(x)"), parse_term("x"));
  CHECK(e1.label == QuantaleSpec::boolean().value(1));
  CHECK(alpha_eq(e2.lhs, e1.rhs));
  CHECK(alpha_eq(e2.rhs, e1.lhs));

  Theory l = load_theory("quantale metric\nground X\nop f : X -> X\n");
  auto [m1, m2] = classical_equation(l, c, parse_term("x"), parse_term("x"));
  CHECK(m1.label == QuantaleSpec::lawvere().value(0));
  CHECK(alpha_eq(m1.lhs, m2.lhs));
  CHECK_THROWS_AS(classical_equation(l, c, parse_term("x"), parse_term("\\y:X. y")), TypeError);
}

TEST_CASE("goals") {
  Theory t = load_theory_file(data("waits.thy"));
  CHECK(parse_goal(t, "x:X |- wait_2(x) ~ wait_5(x)").kind == GoalKind::Pair);
  CHECK(parse_goal(t, "x:X |- wait_2(x) <= wait_5(x)").kind == GoalKind::Ordered);
  Goal g = parse_goal(t, "x:X |- wait_2(x) ={3} wait_5(x)");
  CHECK(g.equation().label == QuantaleSpec::lawvere().value(3));
  CHECK_THROWS_AS(parse_goal(t, "x:X |- wait_2(x) ={3} *"), TypeError);
}
