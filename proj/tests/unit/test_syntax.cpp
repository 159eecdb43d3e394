#include <cctype>

#include "doctest.h"
#include "generators.hpp"
#include "vlam/error.hpp"
#include "vlam/syntax.hpp"

using namespace vlam;

namespace {

Context ctx(std::initializer_list<std::pair<const char*, const char*>> entries) {
  std::vector<Context::Entry> e;
  for (auto [x, a] : entries) e.emplace_back(x, parse_type(a));
  return Context(std::move(e));
}

std::string squash(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("parse lambda and operations") {
  Term t = parse_term("\\x:X. wait1(x)");
  REQUIRE(t.kind() == Term::Kind::Lam);
  CHECK(t.name() == "x");
  CHECK(t.binder_type() == Type::ground("X"));
  REQUIRE(t.child(0).kind() == Term::Kind::Op);
  CHECK(t.child(0).name() == "wait1");
  CHECK(t.child(0).child(0).kind() == Term::Kind::Var);
  CHECK(t.free_vars().empty());
}

TEST_CASE("surface forms") {
  Term pm = parse_term("pm a * b to x*y. y * x");
  CHECK(pm.kind() == Term::Kind::TensorLet);
  CHECK(pm.name() == "x");
  CHECK(pm.name2() == "y");
  CHECK(pm.free_vars() == std::vector<std::string>{"a", "b"});

  Term ul = parse_term("u to _. v");
  CHECK(ul.kind() == Term::Kind::UnitLet);
  CHECK(alpha_eq(parse_term("u to *. v"), ul));

  Term app = parse_term("f g h");
  CHECK(app.kind() == Term::Kind::App);
  CHECK(app.child(0).kind() == Term::Kind::App);

  Term tens = parse_term("a * b * c");
  CHECK(tens.child(0).kind() == Term::Kind::Tensor);

  Term star_app = parse_term("p (*)");
  CHECK(star_app.child(1).kind() == Term::Kind::Star);
  CHECK(print_term(star_app) == "p (*)");

  CHECK(parse_term("p(*)").kind() == Term::Kind::Op);

  CHECK(parse_type("X -o Y -o Z") == parse_type("X -o (Y -o Z)"));
  CHECK(parse_type("X * Y -o I") == Type::lolli(Type::tensor(Type::ground("X"), Type::ground("Y")), Type::unit()));
  CHECK(parse_type("(X -o Y) -o Z").to_string() == "(X -o Y) -o Z");
  CHECK(alpha_eq(parse_term("λx:X. x ⊗ y"), parse_term("\\x:X. x * y")));
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_term("pm v to x (x) y. w"), SyntaxError);
  CHECK_THROWS_AS(parse_term("\\x X. x"), SyntaxError);
  CHECK_THROWS_AS(parse_term("f(a,"), SyntaxError);
  CHECK_THROWS_AS(parse_term("pm v to x*x. x"), SyntaxError);
  CHECK_THROWS_AS(parse_type("X -o"), SyntaxError);
  try {
    parse_term("a\n  to )");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 6);
  }

  Signature sig;
  sig.ground_types = {"X"};
  sig.operations.emplace("wait_1", OpSig{{Type::ground("X")}, Type::ground("X")});
  ParseOptions opts;
  opts.signature = &sig;
  CHECK_THROWS_AS(parse_term("foo(x)", opts), UnknownSymbolError);
  CHECK_THROWS_AS(parse_term("wait_1(x, y)", opts), SyntaxError);
  CHECK_THROWS_AS(parse_term("\\x:Y. x", opts), SyntaxError);
  CHECK_NOTHROW(parse_term("\\x:X. wait_1(x)", opts));
}

TEST_CASE("walk term round trip") {
  const char* walk1 = "\\x:Real. bernoulli(zero(*), plus(x, normal(zero(*), one(*))), p(*))";
  Term t = parse_term(walk1);
  CHECK(alpha_eq(parse_term(print_term(t)), t));
  CHECK(squash(print_term(t)) == squash(walk1));
}

TEST_CASE("definitions expand unless shadowed") {
  std::map<std::string, Term> defs{{"c", parse_term("k(*)")}};
  ParseOptions opts;
  opts.definitions = &defs;
  CHECK(alpha_eq(parse_term("f(c)", opts), parse_term("f(k(*))")));
  CHECK(alpha_eq(parse_term("\\c:X. c", opts), parse_term("\\c:X. c")));
}

TEST_CASE("contexts and judgements") {
  Context c = parse_context("x:X, f:X -o I");
  CHECK(c.size() == 2);
  CHECK(c[1].second == parse_type("X -o I"));
  CHECK(parse_context("-").empty());
  CHECK_THROWS_AS(parse_context("x:X, x:X"), SyntaxError);
  auto j = parse_judgement("x:X |- \\y:X. merge(x, y) : X -o X");
  CHECK(j.context.size() == 1);
  REQUIRE(j.type);
  CHECK(*j.type == parse_type("X -o X"));
  auto j2 = parse_judgement("- |- *");
  CHECK(j2.context.empty());
  CHECK_FALSE(j2.type);
}

TEST_CASE("substitution") {
  CHECK(substitute(Term::var("x"), "x", Term::star()).kind() == Term::Kind::Star);

  // Capture avoidance renames the binder.
  Term lam = Term::lam("y", Type::ground("A"), Term::var("x"));
  Term r = substitute(lam, "x", Term::var("y"));
  REQUIRE(r.kind() == Term::Kind::Lam);
  CHECK(r.name() != "y");
  CHECK(r.child(0).kind() == Term::Kind::Var);
  CHECK(r.child(0).name() == "y");
  CHECK(r.free_vars() == std::vector<std::string>{"y"});

  // Beta as used by Fig. 3.
  Term body = parse_term("wait1(x)");
  CHECK(alpha_eq(substitute(body, "x", parse_term("y")), parse_term("wait1(y)")));

  // Bound occurrences are untouched.
  Term shadow = parse_term("\\x:X. x");
  CHECK(substitute(shadow, "x", Term::var("z")).same_node(shadow));

  // Simultaneous substitution swaps.
  Term sw = substitute_all(parse_term("x * y"), {{"x", Term::var("y")}, {"y", Term::var("x")}});
  CHECK(alpha_eq(sw, parse_term("y * x")));

  // Free-variable law: FV(v[w/x]) = FV(v) \ {x} u FV(w).
  testing::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    auto j = testing::random_judgement(rng, 3);
    if (j.context.empty()) continue;
    const std::string& x = j.context[0].first;
    Term w = parse_term("b1 * q");
    Term s = substitute(j.term, x, w);
    std::set<std::string> expected(j.term.free_vars().begin(), j.term.free_vars().end());
    expected.erase(x);
    expected.insert({"b1", "q"});
    CHECK(std::set<std::string>(s.free_vars().begin(), s.free_vars().end()) == expected);
  }
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(parse_term("\\x:A. x"), parse_term("\\y:A. y")));
  CHECK(alpha_eq(parse_term("\\x:A. \\y:B. x * y"), parse_term("\\y:A. \\x:B. y * x")));
  CHECK_FALSE(alpha_eq(parse_term("x"), parse_term("y")));
  CHECK_FALSE(alpha_eq(parse_term("\\x:A. x"), parse_term("\\x:B. x")));
  CHECK_FALSE(alpha_eq(parse_term("\\x:A. \\y:A. x * y"), parse_term("\\x:A. \\y:A. y * x")));
  CHECK(alpha_eq(parse_term("pm a to x*y. y * x"), parse_term("pm a to p*q. q * p")));
}

TEST_CASE("positions") {
  Term t = parse_term("f(a, g(b))");
  CHECK(subterm_at(t, {1, 0})->name() == "b");
  CHECK_FALSE(subterm_at(t, {2}));
  Term r = replace_at(t, {1, 0}, Term::star());
  CHECK(alpha_eq(r, parse_term("f(a, g(*))")));
  // Rewriting in context: the replacement may mention the binder.
  Term lam = parse_term("\\x:X. f(x)");
  CHECK(alpha_eq(replace_at(lam, {0}, parse_term("g(x)")), parse_term("\\x:X. g(x)")));
}

TEST_CASE("shuffles") {
  Context g1 = ctx({{"x", "A"}, {"y", "B"}});
  Context g2 = ctx({{"z", "C"}});
  CHECK(is_shuffle(ctx({{"z", "C"}, {"x", "A"}, {"y", "B"}}), {g1, g2}));
  CHECK_FALSE(is_shuffle(ctx({{"y", "B"}, {"x", "A"}, {"z", "C"}}), {g1, g2}));
  CHECK(is_shuffle(ctx({{"x", "A"}}), {ctx({{"x", "A"}})}));
  CHECK_FALSE(is_shuffle(ctx({{"x", "A"}}), {ctx({{"x", "B"}})}));

  auto two = enumerate_shuffles({ctx({{"x", "A"}}), ctx({{"y", "B"}})});
  CHECK(two == std::vector<Context>{ctx({{"x", "A"}, {"y", "B"}}), ctx({{"y", "B"}, {"x", "A"}})});
  CHECK(enumerate_shuffles({g1, g2}).size() == 3);
  CHECK(enumerate_shuffles({Context()}) == std::vector<Context>{Context()});

  // Count equals the multinomial coefficient; no duplicates; each passes is_shuffle.
  for (std::size_t a = 0; a <= 4; ++a) {
    for (std::size_t b = 0; b <= 3; ++b) {
      for (std::size_t c = 0; c <= 2; ++c) {
        std::vector<Context> parts;
        std::size_t id = 0;
        for (std::size_t size : {a, b, c}) {
          std::vector<Context::Entry> e;
          for (std::size_t i = 0; i < size; ++i) e.emplace_back("v" + std::to_string(id++), Type::unit());
          parts.emplace_back(std::move(e));
        }
        auto all = enumerate_shuffles(parts);
        CHECK(all.size() == binomial(a + b + c, a) * binomial(b + c, b));
        std::set<std::string> seen;
        for (const auto& s : all) {
          CHECK(is_shuffle(s, parts));
          seen.insert(s.to_string());
        }
        CHECK(seen.size() == all.size());
      }
    }
  }
  std::vector<Context::Entry> many;
  for (int i = 0; i < 11; ++i) many.emplace_back("v" + std::to_string(i), Type::unit());
  CHECK_THROWS_AS(enumerate_shuffles({Context(many)}), LimitExceeded);
}

TEST_CASE("printer round trip on random terms") {
  testing::Rng rng(2024);
  testing::TermGenOptions opts;
  opts.fuel = 5;
  for (int i = 0; i < 10000; ++i) {
    auto j = testing::random_judgement(rng, 4, opts);
    std::string printed = print_term(j.term);
    Term back = parse_term(printed);
    REQUIRE_MESSAGE(alpha_eq(back, j.term), printed);
    CHECK(print_term(back) == printed);
  }
}
