// Acceptance run: one line per criterion, with the measured time against its limit.
// Exits non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "vlam/deduction.hpp"
#include "vlam/error.hpp"
#include "vlam/models.hpp"
#include "vlam/typecheck.hpp"

using namespace vlam;
using namespace vlam::testing;

namespace {

std::filesystem::path data(const char* name) { return std::filesystem::path(VLAM_DATA_DIR) / name; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

SearchBudget depth(int d) {
  SearchBudget b;
  b.max_depth = d;
  return b;
}

Term wait_term(const WaitStack& s) {
  Term t = Term::var("x");
  for (auto it = s.rbegin(); it != s.rend(); ++it) t = Term::op("wait_" + std::to_string(*it), {t});
  return t;
}

std::string show(const WaitStack& s) { return print_term(wait_term(s)); }

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Records the first few problems; any problem fails the criterion.
struct Failures {
  int count = 0;
  std::ostringstream first;

  void add(const std::string& what) {
    if (count++ < 3) first << (count > 1 ? "; " : "") << what;
  }
  Outcome outcome(const std::string& summary) const {
    if (count == 0) return {true, summary};
    return {false, summary + ", " + std::to_string(count) + " failure(s): " + first.str()};
  }
};

// ---------------------------------------------------------------------------

Outcome wait_epsilon_bounds() {
  Theory t = load_theory_file(data("waits.thy"));
  Prover p(t);
  Context c = parse_context("x:X");
  Failures f;
  for (int n = 0; n <= 8; ++n) {
    for (int m = 0; m <= 8; ++m) {
      BoundResult r = p.best_bound(c, wait_term({n}), wait_term({m}), depth(3));
      if (!(r.label == t.quantale.value(std::abs(n - m)))) {
        f.add("wait_" + std::to_string(n) + " ~ wait_" + std::to_string(m) + " gave " + r.label.to_string());
      }
      if (r.trace && !(replay(t, *r.trace).label == r.label)) f.add("trace does not replay");
    }
  }
  return f.outcome("81 pairs at depth 3");
}

Outcome composition_bound() {
  Theory t = load_theory_file(data("waits.thy"));
  Prover p(t);
  Context c = parse_context("x:X");
  BoundResult r = p.best_bound(c, wait_term({1, 1}), wait_term({3}), depth(3));
  // Least-cost rewrite chain of at most three steps.
  auto costs = wait_chain_costs({1, 1}, 3, 32);
  long want = costs.at({3});
  Failures f;
  if (want != 1) f.add("oracle gave " + std::to_string(want));
  if (!(r.label == t.quantale.value(want))) f.add("bound " + r.label.to_string());
  if (!r.trace || !(replay(t, *r.trace).label == r.label)) f.add("trace does not replay");
  return f.outcome("bound " + r.label.to_string() + ", oracle " + std::to_string(want));
}

Outcome random_walk() {
  Theory t = load_theory_file(data("probwalk.thy"));
  Prover p(t);
  auto fifth = t.quantale.value(Rational(1, 5));
  Failures f;
  auto r = p.check_eq(parse_goal(t, "- |- walk1 ={1/5} walk2").equation(), depth(10));
  if (!r.proved) f.add("check did not prove walk1 ={1/5} walk2");
  if (r.proved && !(replay(t, *r.trace).label == fifth)) f.add("trace does not replay at 1/5");
  Goal g = parse_goal(t, "- |- walk1 ~ walk2");
  auto b = p.best_bound(g.context, g.lhs, g.rhs, depth(10));
  if (!(b.label == fifth)) f.add("bound " + b.label.to_string());
  return f.outcome("check PROVED, bound " + b.label.to_string());
}

Outcome ordered_example() {
  Theory t = load_theory_file(data("waits_ordered.thy"));
  Prover p(t);
  const char* text =
      "x:X |- (\\f:X -o X. \\g:X -o X. g (f x)) (\\y:X. wait_1(y)) <= "
      "(\\f:X -o X. \\g:X -o X. g (f x)) (\\y:X. wait_1(wait_1(y)))";
  auto r = p.check_eq(parse_goal(t, text).equation(), depth(12));
  Failures f;
  if (!r.proved) f.add("not proved at depth 12");
  if (r.proved && !replay(t, *r.trace).label.is_top()) f.add("trace does not replay at top");
  return f.outcome(r.proved ? "PROVED, trace height " + std::to_string(trace_height(*r.trace)) : "UNKNOWN");
}

Outcome model_satisfaction() {
  Failures f;
  Theory waits = load_theory_file(data("waits.thy"));
  Model met = load_model_file(data("waits.model"), waits);
  if (met.carrier(Type::ground("X")).size() != 33) f.add("wait carrier is not {0..32}");
  ModelReport wr = check_model(met, waits);
  if (!wr.skipped.empty()) f.add("wait axioms skipped");
  if (wr.checks.size() != waits.axioms.size()) f.add("not every wait axiom checked");
  for (const auto& c : wr.checks) {
    if (!c.satisfied) f.add("wait axiom " + to_string(waits.axioms[c.axiom].equation) + " computed " + c.computed.to_string());
  }

  Theory walk = load_theory_file(data("probwalk.thy"));
  Model meas = load_model_file(data("probwalk.model"), walk);
  for (const auto& g : walk.signature.ground_types) {
    if (meas.dimension(Type::ground(g)) > 8) f.add("carrier " + g + " has more than 8 points");
  }
  ModelReport pr = check_model(meas, walk);
  // Every pair n != m of biases, each checked against its own label.
  if (pr.checks.size() != 110) f.add(std::to_string(pr.checks.size()) + " bias axioms checked, not 110");
  for (const auto& c : pr.checks) {
    const VEquation& e = walk.axioms[c.axiom].equation;
    if (!c.satisfied) f.add("bias axiom " + to_string(e) + " computed " + c.computed.to_string());
    // Two point masses at distinct points differ by |p - q| on one event.
    if (!(c.computed == e.label)) f.add("bias axiom " + to_string(e) + " not tight: " + c.computed.to_string());
  }
  return f.outcome(std::to_string(wr.checks.size()) + " metric and " + std::to_string(pr.checks.size()) +
                   " measure checks");
}

Outcome soundness() {
  Theory t = load_theory_file(data("waits.thy"));
  Model m = load_model_file(data("waits.model"), t);
  Prover p(t);
  Context c = parse_context("x:X");
  Rng rng(2024);
  std::uniform_int_distribution<int> idx(0, 8), len(1, 2), extra(0, 2);
  auto stack = [&] {
    WaitStack s(static_cast<std::size_t>(len(rng)));
    for (auto& n : s) n = idx(rng);
    return s;
  };
  Failures f;
  int proved = 0, attempts = 0;
  while (proved < 500 && attempts < 5000) {
    ++attempts;
    WaitStack a = stack(), b = stack();
    BoundResult r = p.best_bound(c, wait_term(a), wait_term(b), depth(3));
    // Ask for the bound itself, or a weaker label.
    QuantaleValue q = r.label.is_bottom() ? r.label : tensor(r.label, t.quantale.value(extra(rng)));
    auto res = p.check_eq(make_equation(t, c, wait_term(a), wait_term(b), q), depth(3));
    if (!res.proved) {
      f.add(show(a) + " ={" + q.to_string() + "} " + show(b) + " not proved");
      continue;
    }
    ++proved;
    if (!check_soundness(m, t, *res.trace)) f.add(show(a) + " ={" + q.to_string() + "} " + show(b) + " unsound");
  }
  if (proved < 500) f.add("only " + std::to_string(proved) + " goals proved");
  return f.outcome(std::to_string(proved) + " proved goals checked against the model");
}

Outcome unique_derivation() {
  const Signature sig = test_signature(3);
  Rng rng(77);
  TermGenOptions opts;
  opts.fuel = 3;
  Failures f;
  std::size_t most = 0, done = 0;
  for (int i = 0; i < 200; ++i) {
    Judgement j = random_judgement(rng, 6, opts);
    most = std::max(most, j.context.size());
    auto all = all_derivations(sig, j.context, j.term);
    if (all.size() != 1) {
      f.add(std::to_string(all.size()) + " derivations of " + j.context.to_string() + " |- " + print_term(j.term));
      continue;
    }
    if (!(all[0] == infer(sig, j.context, j.term))) f.add("search and infer disagree on " + print_term(j.term));
    ++done;
  }
  return f.outcome(std::to_string(done) + " judgements, up to " + std::to_string(most) + " variables");
}

const char* small_met_text = R"(
backend finmet
quantale metric
ground X = 0..2
distance X(a, b) = |a - b|
op wait_n(a) = min(a + n, 2) for n in 0..3
op merge(a, b) = min(a + b, 2)
op erase(a) = *
op unit_x() = 0
)";

Outcome semantic_substitution() {
  Theory t;
  t.signature = test_signature(3);
  Model m = load_model(small_met_text, t);
  Rng rng(31);
  TermGenOptions opt;
  opt.type_depth = 1;
  Failures f;
  int checked = 0, skipped = 0, attempts = 0;
  while (checked < 200 && attempts < 2000) {
    ++attempts;
    Judgement j = random_judgement(rng, 3, opt);
    if (j.context.empty()) continue;
    Derivation d1 = infer(t.signature, j.context, j.term);
    const Type& a = j.context[j.context.size() - 1].second;
    Context delta({{"d1", Type::ground("X")}, {"d2", Type::unit()}});
    Derivation d2 = infer(t.signature, delta, random_term(delta, a, rng, opt));
    bool substitution = false, exchange = true;
    try {
      substitution = semantic_substitution_check(m, t.signature, d1, d2);
      for (std::size_t k = 0; k + 1 < j.context.size(); ++k) exchange = exchange && semantic_exchange_check(m, d1, k);
    } catch (const LimitExceeded&) {
      ++skipped;
      continue;
    }
    ++checked;
    if (!substitution) f.add("substitution into " + print_term(j.term));
    if (!exchange) f.add("exchange on " + print_term(j.term));
  }
  if (checked < 200) f.add("only " + std::to_string(checked) + " pairs checked");
  return f.outcome(std::to_string(checked) + " pairs, " + std::to_string(skipped) + " over the carrier limit");
}

// Stacks of at most three waits over x, i.e. terms of size at most four.
std::vector<WaitStack> small_stacks(int n) {
  std::vector<WaitStack> out{{}};
  for (std::size_t len = 1; len <= 3; ++len) {
    std::vector<WaitStack> grown;
    for (const auto& s : out) {
      if (s.size() + 1 != len) continue;
      for (int i = 0; i <= n; ++i) {
        WaitStack t = s;
        t.push_back(i);
        grown.push_back(t);
      }
    }
    out.insert(out.end(), grown.begin(), grown.end());
  }
  return out;
}

Theory with_bound(const char* file, int n) {
  std::string text = std::regex_replace(read_file(data(file)), std::regex("param N = [0-9]+"),
                                        "param N = " + std::to_string(n));
  return load_theory(text);
}

struct JoinComparison {
  std::size_t goals = 0;
  std::size_t proved = 0;
  std::size_t differences = 0;
  std::string first;
};

JoinComparison compare_join_rules(const Theory& t, const std::vector<QuantaleValue>& labels, int n) {
  Prover p(t);
  Context c = parse_context("x:X");
  JoinComparison out;
  auto stacks = small_stacks(n);
  for (const auto& a : stacks) {
    for (const auto& b : stacks) {
      for (const auto& q : labels) {
        VEquation g = make_equation(t, c, wait_term(a), wait_term(b), q);
        bool full = p.check_eq(g, depth(4), JoinMode::Full).proved;
        bool bottom = p.check_eq(g, depth(4), JoinMode::BottomOnly).proved;
        ++out.goals;
        out.proved += full ? 1 : 0;
        if (full != bottom) {
          if (out.differences++ == 0) out.first = to_string(g) + (full ? " only with join" : " only without join");
        }
      }
    }
  }
  return out;
}

Outcome join_rule() {
  // Small index bounds keep the goal space enumerable at depth 4.
  const int metric_n = 1, bool_n = 2;
  Failures f;
  std::ostringstream summary;
  {
    Theory t = with_bound("waits.thy", metric_n);
    std::vector<QuantaleValue> labels;
    for (int q = 0; q <= 3 * metric_n + 1; ++q) labels.push_back(t.quantale.value(q));
    labels.push_back(t.quantale.value(Rational(1, 2)));
    labels.push_back(t.quantale.infinity());
    auto r = compare_join_rules(t, labels, metric_n);
    if (r.differences) f.add("metric: " + std::to_string(r.differences) + " differ, e.g. " + r.first);
    summary << "metric " << r.proved << "/" << r.goals;
  }
  {
    Theory t = with_bound("waits_ordered.thy", bool_n);
    auto r = compare_join_rules(t, {t.quantale.top(), t.quantale.bottom()}, bool_n);
    if (r.differences) f.add("bool: " + std::to_string(r.differences) + " differ, e.g. " + r.first);
    summary << ", bool " << r.proved << "/" << r.goals << " provable either way";
  }
  return f.outcome(summary.str());
}

Outcome quantale_laws() {
  Rng rng(10);
  Failures f;
  const QuantaleSpec all[] = {QuantaleSpec::boolean(), QuantaleSpec::godel(), QuantaleSpec::lawvere(),
                              QuantaleSpec::ultrametric()};
  for (QuantaleSpec s : all) {
    auto fail = [&](const std::string& law, const QuantaleValue& a, const QuantaleValue& b, const QuantaleValue& c) {
      f.add(s.name() + " " + law + " at " + a.to_string() + ", " + b.to_string() + ", " + c.to_string());
    };
    for (int i = 0; i < 1000; ++i) {
      QuantaleValue a = random_value(s, rng), b = random_value(s, rng), c = random_value(s, rng);
      if (!(tensor(a, tensor(b, c)) == tensor(tensor(a, b), c))) fail("associativity", a, b, c);
      if (!(tensor(a, b) == tensor(b, a))) fail("commutativity", a, b, c);
      if (!(tensor(a, s.unit()) == a)) fail("unit", a, b, c);
      if (!(s.unit() == s.top()) || !leq(a, s.unit()) || !leq(tensor(a, b), a)) fail("integrality", a, b, c);
      if (!(tensor(a, join(b, c)) == join(tensor(a, b), tensor(a, c)))) fail("distributivity", a, b, c);
      std::vector<QuantaleValue> none;
      if (!(tensor(a, join(s, none)) == s.bottom())) fail("distributivity over the empty join", a, b, c);
      if (way_below(a, b) && !leq(a, b)) fail("way-below implies leq", a, b, c);
      for (const auto& r : approximants(b, 4)) {
        if (!way_below(r, b) || !leq(r, b)) fail("approximant", r, b, c);
      }
    }
  }
  return f.outcome("1000 cases per instance, 4 instances");
}

Outcome quotients() {
  Rng rng(3);
  Failures f;
  const QuantaleSpec all[] = {QuantaleSpec::boolean(), QuantaleSpec::godel(), QuantaleSpec::lawvere(),
                              QuantaleSpec::ultrametric()};
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::bernoulli_distribution symmetric(0.5);
  std::size_t collapsed = 0;
  for (int i = 0; i < 200; ++i) {
    QuantaleSpec s = all[i % 4];
    bool sym = symmetric(rng);
    auto c = std::make_shared<const FinVCat>(random_vcat(s, size(rng), rng, sym));
    Quotient q = separated_quotient(c);
    const FinVCat& qc = *q.category;
    std::string tag = s.name() + " #" + std::to_string(i);
    if (qc.violation()) f.add(tag + ": quotient is not a V-category");
    if (!is_separated(qc)) f.add(tag + ": not separated");
    if (sym && !is_symmetric(qc)) f.add(tag + ": symmetry lost");
    if (!q.projection.is_nonexpansive()) f.add(tag + ": projection expands");
    // Distances are inherited from any representatives.
    for (std::size_t x = 0; x < c->size(); ++x) {
      for (std::size_t y = 0; y < c->size(); ++y) {
        if (!(c->at(x, y) == qc.at(q.projection.mapping[x], q.projection.mapping[y]))) f.add(tag + ": distance changed");
      }
    }
    collapsed += c->size() - qc.size();
    // Idempotence: quotienting again is a bijection preserving every distance.
    Quotient again = separated_quotient(q.category);
    const auto& map = again.projection.mapping;
    if (again.category->size() != qc.size() || std::set<std::size_t>(map.begin(), map.end()).size() != qc.size()) {
      f.add(tag + ": second quotient is not a bijection");
      continue;
    }
    for (std::size_t x = 0; x < qc.size(); ++x) {
      for (std::size_t y = 0; y < qc.size(); ++y) {
        if (!(qc.at(x, y) == again.category->at(map[x], map[y]))) f.add(tag + ": second quotient changes distances");
      }
    }
  }
  return f.outcome("200 V-categories, " + std::to_string(collapsed) + " points collapsed in total");
}

struct Criterion {
  int number;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "wait epsilon bounds", 1, wait_epsilon_bounds},
      {2, "composition through trans", 1, composition_bound},
      {3, "random walk bound", 1, random_walk},
      {4, "ordered example", 2, ordered_example},
      {5, "model satisfaction", 5, model_satisfaction},
      {6, "end-to-end soundness", 30, soundness},
      {7, "unique derivation", 60, unique_derivation},
      {8, "semantic substitution and exchange", 30, semantic_substitution},
      {9, "join rule reduces to bottom", 120, join_rule},
      {10, "quantale laws", 10, quantale_laws},
      {11, "quotient properties", 10, quotients},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.number)) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < c.limit_seconds;
    bool pass = o.ok && in_time;
    failed += pass ? 0 : 1;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs / %.0fs", secs, c.limit_seconds);
    std::cout << "criterion " << c.number << " [" << (pass ? "PASS" : "FAIL") << "] " << c.name << " (" << timing
              << ")" << (in_time ? "" : " over time") << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
