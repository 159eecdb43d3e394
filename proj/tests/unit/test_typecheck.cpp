#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "vlam/error.hpp"
#include "vlam/typecheck.hpp"

using namespace vlam;

namespace {

const Signature& sig() {
  static const Signature s = testing::test_signature(3);
  return s;
}

Derivation infer_text(const char* judgement) {
  auto j = parse_judgement(judgement);
  return infer(sig(), j.context, j.term);
}

TypeErrorKind error_kind(const char* judgement) {
  try {
    infer_text(judgement);
  } catch (const TypeError& e) {
    return e.kind();
  }
  FAIL("expected a type error for " << judgement);
  return TypeErrorKind::BadContext;
}

}  // namespace

TEST_CASE("axiom-free rules") {
  auto hyp = infer_text("x:X |- x");
  CHECK(hyp.rule == TypingRule::Hyp);
  CHECK(hyp.type == Type::ground("X"));
  auto unit = infer_text("- |- *");
  CHECK(unit.rule == TypingRule::UnitIntro);
  CHECK(unit.type == Type::unit());
}

TEST_CASE("nested operations") {
  auto d = infer_text("x:X |- wait_1(wait_1(x))");
  // Built by hand from the ax and hyp rules.
  Context c = parse_context("x:X");
  Type X = Type::ground("X");
  Term inner = parse_term("wait_1(x)");
  Derivation h{c, Term::var("x"), X, TypingRule::Hyp, {}, {}};
  Derivation a1{c, inner, X, TypingRule::Ax, {h}, {c}};
  Derivation a2{c, parse_term("wait_1(wait_1(x))"), X, TypingRule::Ax, {a1}, {c}};
  CHECK(d == a2);
  CHECK_FALSE(derivation_violation(sig(), d));
}

TEST_CASE("split is a projection") {
  auto d = infer_text("z:X, x:X, y:X |- merge(x, merge(z, y))");
  CHECK(d.parts[0] == parse_context("x:X"));
  CHECK(d.parts[1] == parse_context("z:X, y:X"));
  CHECK(is_shuffle(d.context, d.parts));
  auto p = infer_text("a:X * X |- pm a to x*y. merge(y, x)");
  CHECK(p.rule == TypingRule::TensorElim);
  CHECK(p.premises[1].context == parse_context("x:X, y:X"));
  CHECK_FALSE(derivation_violation(sig(), p));
}

TEST_CASE("linearity and typing errors") {
  CHECK(error_kind("- |- x") == TypeErrorKind::UnboundVariable);
  CHECK(error_kind("x:X |- merge(x, x)") == TypeErrorKind::DuplicateUse);
  CHECK(error_kind("x:X, y:X |- x") == TypeErrorKind::UnusedVariable);
  CHECK(error_kind("- |- \\x:X. unit_x(*)") == TypeErrorKind::UnusedVariable);
  CHECK(error_kind("x:X |- x (*)") == TypeErrorKind::TypeMismatch);
  CHECK(error_kind("x:X |- wait_1(erase(x))") == TypeErrorKind::TypeMismatch);
  CHECK(error_kind("x:X |- x to _. *") == TypeErrorKind::TypeMismatch);
  CHECK(error_kind("x:X |- wait_1(x, *)") == TypeErrorKind::ArityMismatch);
  CHECK(error_kind("x:X |- foo(x)") == TypeErrorKind::UnknownSymbol);
  CHECK(error_kind("x:X |- pm x to a*b. merge(a, b)") == TypeErrorKind::TypeMismatch);
  CHECK_THROWS_AS(check(sig(), parse_context("x:X"), Term::var("x"), Type::unit()), TypeError);
}

TEST_CASE("binder clashing with the context is renamed") {
  auto d = infer_text("x:X |- merge(x, (\\x:X. x) unit_x(*))");
  CHECK_FALSE(derivation_violation(sig(), d));
  CHECK(d.term.has_free("x"));
}

TEST_CASE("determinism") {
  testing::Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    auto j = testing::random_judgement(rng, 4);
    auto d1 = infer(sig(), j.context, j.term);
    auto d2 = infer(sig(), j.context, j.term);
    CHECK(d1 == d2);
    CHECK(d1.type == j.type);
    CHECK_FALSE(derivation_violation(sig(), d1));
  }
}

TEST_CASE("unique derivation against exhaustive search") {
  testing::Rng rng(99);
  testing::TermGenOptions opts;
  opts.fuel = 3;
  for (int i = 0; i < 40; ++i) {
    auto j = testing::random_judgement(rng, 4, opts);
    auto all = testing::all_derivations(sig(), j.context, j.term);
    REQUIRE(all.size() == 1);
    CHECK(all[0] == infer(sig(), j.context, j.term));
  }
}

TEST_CASE("exchange") {
  auto d = infer_text("x:X, y:X |- x * y");
  auto e = exchange(d, 0);
  CHECK(e.context == parse_context("y:X, x:X"));
  CHECK(e.parts == d.parts);
  CHECK(alpha_eq(e.term, d.term));
  CHECK_FALSE(derivation_violation(sig(), e));
  CHECK(exchange(e, 0) == d);
  CHECK_THROWS_AS(exchange(d, 1), DerivationError);

  // Exchange under a lambda leaves the bound variable in place.
  auto l = infer_text("x:X, y:X |- \\z:X. merge(merge(x, y), z)");
  auto le = exchange(l, 0);
  CHECK(le.premises[0].context == parse_context("y:X, x:X, z:X"));

  testing::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    auto j = testing::random_judgement(rng, 5);
    if (j.context.size() < 2) continue;
    auto base = infer(sig(), j.context, j.term);
    std::size_t pos = std::uniform_int_distribution<std::size_t>(0, j.context.size() - 2)(rng);
    auto ex = exchange(base, pos);
    CHECK_FALSE(derivation_violation(sig(), ex));
    CHECK(ex == infer(sig(), j.context.exchanged(pos), j.term));
  }
}

TEST_CASE("substitution on derivations") {
  auto w = infer_text("y:X |- wait_2(y)");
  auto h = infer_text("x:X |- x");
  CHECK(subst_derivation(h, "x", w) == w);

  auto ul = infer_text("u:I, x:X |- u to _. wait_1(x)");
  auto star = infer_text("- |- *");
  auto s = subst_derivation(ul, "u", star);
  CHECK(s.context == parse_context("x:X"));
  CHECK(s == infer_text("x:X |- * to _. wait_1(x)"));

  CHECK_THROWS_AS(subst_derivation(infer_text("x:X, y:X |- merge(x, y)"), "x", w), DerivationError);
  CHECK_THROWS_AS(subst_derivation(infer_text("x:X |- (\\y:X. merge(x, y)) unit_x(*)"), "x", w), DerivationError);

  testing::Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    auto j1 = testing::random_judgement(rng, 3);
    if (j1.context.empty()) continue;
    std::size_t pos = std::uniform_int_distribution<std::size_t>(0, j1.context.size() - 1)(rng);
    const auto& [x, a] = j1.context[pos];
    Context delta({{"d1", Type::ground("X")}, {"d2", Type::unit()}});
    Term arg = testing::random_term(delta, a, rng);
    auto d1 = infer(sig(), j1.context, j1.term);
    auto d2 = infer(sig(), delta, arg);
    auto s2 = subst_derivation(d1, x, d2);
    CHECK_FALSE(derivation_violation(sig(), s2));
    CHECK(s2 == infer(sig(), s2.context, substitute(j1.term, x, arg)));
  }
}
