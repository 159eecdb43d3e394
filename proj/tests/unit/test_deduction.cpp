#include <chrono>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "vlam/deduction.hpp"
#include "vlam/error.hpp"
#include "vlam/typecheck.hpp"

using namespace vlam;
using namespace vlam::testing;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(VLAM_DATA_DIR) / name; }

const Theory& waits() {
  static const Theory t = load_theory_file(data("waits.thy"));
  return t;
}

const Prover& wait_prover() {
  static const Prover p(waits());
  return p;
}

VEquation goal(const Theory& t, const std::string& text) { return parse_goal(t, text).equation(); }

SearchBudget depth(int d) {
  SearchBudget b;
  b.max_depth = d;
  return b;
}

QuantaleValue bound(const Theory& t, const std::string& pair, int d = 3) {
  Goal g = parse_goal(t, pair);
  return best_bound(t, g.context, g.lhs, g.rhs, depth(d)).label;
}

Term wait_term(const WaitStack& s) {
  Term t = Term::var("x");
  for (auto it = s.rbegin(); it != s.rend(); ++it) t = Term::op("wait_" + std::to_string(*it), {t});
  return t;
}

ReplayErrorKind replay_failure(const Theory& t, const ProofTrace& p) {
  try {
    replay(t, p);
  } catch (const ReplayError& e) {
    return e.kind();
  }
  FAIL("replay accepted a bad trace");
  return ReplayErrorKind::LabelMismatch;
}

TracePtr node(VEquation e, ProofRule r, std::vector<TracePtr> premises = {}) {
  return std::make_shared<ProofTrace>(ProofTrace{std::move(e), r, std::move(premises), std::nullopt, false, {}, -1});
}

TracePtr axiom(const Theory& t, const std::string& ctx, const std::string& l, const std::string& r, long q) {
  auto o = t.parse_options();
  Context c = parse_context(ctx, o);
  Term lt = parse_term(l, o), rt = parse_term(r, o);
  for (std::size_t i = 0; i < t.axioms.size(); ++i) {
    const auto& e = t.axioms[i].equation;
    if (e.context == c && alpha_eq(e.lhs, lt) && alpha_eq(e.rhs, rt) && e.label == t.quantale.value(q)) {
      auto p = node(e, ProofRule::Axiom);
      std::const_pointer_cast<ProofTrace>(p)->axiom_index = static_cast<long>(i);
      return p;
    }
  }
  FAIL("no such axiom");
  return nullptr;
}

}  // namespace

TEST_CASE("wait bounds") {
  const Theory& t = waits();
  auto L = t.quantale;
  CHECK(bound(t, "x:X |- wait_2(x) ~ wait_5(x)") == L.value(3));
  CHECK(bound(t, "x:X |- wait_1(wait_1(x)) ~ wait_3(x)") == L.value(1));
  CHECK(bound(t, "x:X |- wait_4(x) ~ wait_4(x)") == L.value(0));
}

TEST_CASE("check and unknown") {
  const Theory& t = waits();
  auto r = check_eq(t, goal(t, "x:X |- wait_2(x) ={3} wait_5(x)"), depth(3));
  CHECK(r.proved);
  REQUIRE(r.trace);
  VEquation e = replay(t, *r.trace);
  CHECK(e.label == t.quantale.value(3));
  CHECK_FALSE(check_eq(t, goal(t, "x:X |- wait_2(x) ={1} wait_5(x)"), depth(3)).proved);
  // A looser goal is proved by weakening.
  auto loose = check_eq(t, goal(t, "x:X |- wait_2(x) ={7} wait_5(x)"), depth(3));
  REQUIRE(loose.proved);
  CHECK(loose.trace->rule == ProofRule::Weak);
  CHECK(replay(t, *loose.trace).label == t.quantale.value(7));
  // Bottom is always provable.
  auto bot = check_eq(t, goal(t, "x:X |- wait_2(x) ={inf} wait_5(x)"), depth(1));
  CHECK(bot.proved);
}

TEST_CASE("bounds agree with the chain oracle") {
  const Theory& t = waits();
  Context c = parse_context("x:X");
  std::vector<WaitStack> stacks;
  for (int a = 0; a <= 4; ++a) {
    stacks.push_back({a});
    for (int b = 0; b <= 3; ++b) stacks.push_back({a, b});
  }
  for (int d = 1; d <= 3; ++d) {
    for (std::size_t i = 0; i < stacks.size(); i += 3) {
      auto costs = wait_chain_costs(stacks[i], d, 32);
      for (std::size_t j = 0; j < stacks.size(); j += 2) {
        auto it = costs.find(stacks[j]);
        long want = it == costs.end() ? -1 : it->second;
        BoundResult r = wait_prover().best_bound(c, wait_term(stacks[i]), wait_term(stacks[j]), depth(d));
        CAPTURE(d);
        CAPTURE(print_term(wait_term(stacks[i])));
        CAPTURE(print_term(wait_term(stacks[j])));
        if (want < 0) {
          CHECK(r.label.is_bottom());
        } else {
          CHECK(r.label == t.quantale.value(want));
        }
        CHECK(replay(t, *r.trace).label == r.label);
      }
    }
  }
}

TEST_CASE("random walk") {
  Theory t = load_theory_file(data("probwalk.thy"));
  auto fifth = t.quantale.value(Rational(1, 5));
  auto r = check_eq(t, goal(t, "- |- walk1 ={1/5} walk2"), depth(10));
  REQUIRE(r.proved);
  CHECK(replay(t, *r.trace).label == fifth);
  CHECK(bound(t, "- |- walk1 ~ walk2", 10) == fifth);
  CHECK_FALSE(check_eq(t, goal(t, "- |- walk1 ={1/10} walk2"), depth(4)).proved);
}

TEST_CASE("ordered example") {
  Theory t = load_theory_file(data("waits_ordered.thy"));
  const char* g =
      "x:X |- (\\f:X -o X. \\g:X -o X. g (f x)) (\\y:X. wait_1(y)) <= "
      "(\\f:X -o X. \\g:X -o X. g (f x)) (\\y:X. wait_1(wait_1(y)))";
  auto r = check_eq(t, goal(t, g), depth(12));
  REQUIRE(r.proved);
  CHECK(replay(t, *r.trace).label.is_top());
  // Not symmetric: the converse has no proof.
  const char* converse = "x:X |- wait_2(x) <= wait_1(x)";
  CHECK_FALSE(check_eq(t, goal(t, converse), depth(3)).proved);
}

TEST_CASE("fig3 equations are provable in one step") {
  Theory t = load_theory("quantale metric\nground X\nop f : X -> X\nop g : X, X -> X\n");
  for (const char* text : {"y:X |- (\\x:X. f(x)) y ={0} f(y)", "v:X*X |- pm v to a*b. a * b ={0} v",
                           "u:I, y:X |- u to *. f(y) ={0} u to *. f(y)",
                           "u:I, y:X, z:X |- g(u to *. y, z) ={0} u to *. g(y, z)"}) {
    auto r = check_eq(t, goal(t, text), depth(1));
    CAPTURE(text);
    REQUIRE(r.proved);
    CHECK(replay(t, *r.trace).label.is_top());
  }
}

TEST_CASE("replay checks labels") {
  const Theory& t = waits();
  auto L = t.quantale;
  TracePtr a = axiom(t, "x:X", "wait_1(x)", "wait_2(x)", 1);
  TracePtr b = axiom(t, "x:X", "wait_2(x)", "wait_4(x)", 2);
  Context c = parse_context("x:X");
  auto o = t.parse_options();
  Term w1 = parse_term("wait_1(x)", o), w4 = parse_term("wait_4(x)", o);
  Type X = Type::ground("X");
  CHECK(replay(t, *node({c, w1, w4, X, L.value(3)}, ProofRule::Trans, {a, b})).label == L.value(3));
  CHECK(replay_failure(t, *node({c, w1, w4, X, L.value(2)}, ProofRule::Trans, {a, b})) ==
        ReplayErrorKind::LabelMismatch);
  CHECK(replay_failure(t, *node({c, w1, w4, X, L.value(3)}, ProofRule::Trans, {b, a})) ==
        ReplayErrorKind::RuleMisapplication);

  // Weakening only moves down.
  Term w2 = parse_term("wait_2(x)", o);
  CHECK(replay(t, *node({c, w1, w2, X, L.value(5)}, ProofRule::Weak, {a})).label == L.value(5));
  CHECK(replay_failure(t, *node({c, w1, w2, X, L.value(0)}, ProofRule::Weak, {a})) ==
        ReplayErrorKind::RuleMisapplication);

  // Congruence multiplies the component labels.
  Term lhs = parse_term("wait_3(wait_1(x))", o), rhs = parse_term("wait_3(wait_2(x))", o);
  CHECK(replay(t, *node({c, lhs, rhs, X, L.value(1)}, ProofRule::CongOp, {a})).label == L.value(1));
  CHECK(replay_failure(t, *node({c, lhs, rhs, X, L.value(0)}, ProofRule::CongOp, {a})) ==
        ReplayErrorKind::LabelMismatch);

  // Symmetry needs a symmetric theory.
  Theory ordered = load_theory_file(data("waits_ordered.thy"));
  TracePtr up = axiom(ordered, "x:X", "wait_1(x)", "wait_2(x)", 1);
  Term o1 = parse_term("wait_1(x)", ordered.parse_options()), o2 = parse_term("wait_2(x)", ordered.parse_options());
  CHECK(replay_failure(ordered, *node({c, o2, o1, X, ordered.quantale.top()}, ProofRule::Symmetry, {up})) ==
        ReplayErrorKind::RuleMisapplication);
  CHECK(replay(t, *node({c, w2, w1, X, L.value(1)}, ProofRule::Symmetry, {a})).label == L.value(1));

  // The infinitary rule cannot be replayed.
  CHECK(replay_failure(t, *node({c, w1, w2, X, L.value(1)}, ProofRule::Arch, {a})) ==
        ReplayErrorKind::RuleMisapplication);
  // Empty join gives bottom.
  CHECK(replay(t, *node({c, w1, w4, X, L.bottom()}, ProofRule::Join)).label.is_bottom());
}

TEST_CASE("search properties") {
  const Theory& t = waits();
  Context c = parse_context("x:X");
  Rng rng(5);
  std::uniform_int_distribution<int> idx(0, 6), len(1, 2);
  auto stack = [&] {
    WaitStack s(static_cast<std::size_t>(len(rng)));
    for (auto& n : s) n = idx(rng);
    return s;
  };
  for (int i = 0; i < 40; ++i) {
    Term v = wait_term(stack()), w = wait_term(stack());
    const Prover& p = wait_prover();
    auto b1 = p.best_bound(c, v, w, depth(1));
    auto b2 = p.best_bound(c, v, w, depth(2));
    auto b3 = p.best_bound(c, v, w, depth(3));
    // More depth never hurts.
    CHECK(leq(b1.label, b2.label));
    CHECK(leq(b2.label, b3.label));
    // Symmetric theory: symmetric bounds.
    CHECK(p.best_bound(c, w, v, depth(3)).label == b3.label);
    CHECK(replay(t, *b3.trace).label == b3.label);
  }
}

TEST_CASE("arch closure") {
  const Theory& t = waits();
  Context c = parse_context("x:X");
  auto o = t.parse_options();
  Term v = parse_term("wait_2(x)", o), w = parse_term("wait_5(x)", o);
  CHECK(arch_closure_check(t, c, v, w, t.quantale.value(3), depth(2)));
  CHECK_FALSE(arch_closure_check(t, c, v, w, t.quantale.value(2), depth(2)));
}
