#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vlam/quantale.hpp"
#include "vlam/syntax.hpp"
#include "vlam/theory.hpp"

namespace vlam {

// ---------------------------------------------------------------------------
// Normalization modulo the equations of autonomous categories.

enum class Fig3Rule {
  BetaPm,       // pm v * w to x*y. u  ->  u[v/x, w/y]
  EtaPm,        // pm v to x*y. u[x*y/z]  ->  u[v/z]
  BetaUnit,     // * to *. v  ->  v
  EtaUnit,      // v to *. w[*/z]  ->  w[v/z]
  BetaLam,      // (\x:A. v) w  ->  v[w/x]
  EtaLam,       // \x:A. v x  ->  v
  CommuteUnit,  // u[v to *. w/z]  ->  v to *. u[w/z]
  CommutePm,    // u[pm v to x*y. w/z]  ->  pm v to x*y. u[w/z]
};

std::string fig3_name(Fig3Rule r);

/// One oriented step. For the commuting conversions `position` points at the
/// eliminator; the step rewrites its parent.
struct RewriteStep {
  Fig3Rule rule;
  Position position;
};

/// Applies `rule` at `pos` if the subterm there is a redex of that rule.
std::optional<Term> apply_rewrite(const Term& t, Fig3Rule rule, const Position& pos);

struct NormalForm {
  Term term;
  std::vector<RewriteStep> steps;
  /// True when the step budget ran out; `term` is then the last form reached.
  bool exhausted = false;
};

/// Leftmost-outermost rewriting with the oriented rule set.
NormalForm normalize(const Term& v, std::size_t max_steps = 10000);

// ---------------------------------------------------------------------------
// Proof traces.

enum class ProofRule {
  Refl,
  Trans,
  Weak,
  Arch,
  Join,
  CongOp,
  CongTensor,
  CongPm,
  CongTo,
  CongLam,
  CongApp,
  Perm,
  Subst,
  Axiom,
  Fig3Rewrite,
  Symmetry,
};

std::string rule_name(ProofRule r);

struct ProofTrace;
using TracePtr = std::shared_ptr<const ProofTrace>;

struct ProofTrace {
  VEquation conclusion;
  ProofRule rule;
  std::vector<TracePtr> premises;
  /// Fig3Rewrite: the step, applied to the rhs instead of the lhs when reversed.
  std::optional<RewriteStep> rewrite;
  bool reversed = false;
  /// Subst: the variables of premise 0's context replaced by premises 1..n.
  std::vector<std::string> subst_vars;
  /// Axiom: index into Theory::axioms.
  long axiom_index = -1;
};

std::string trace_to_string(const ProofTrace& t);
std::size_t trace_size(const ProofTrace& t);
std::size_t trace_height(const ProofTrace& t);

/// Recomputes every label bottom-up and checks each rule's side conditions.
/// Throws ReplayError on a stored label that disagrees or a malformed step.
VEquation replay(const Theory& t, const ProofTrace& trace);

// ---------------------------------------------------------------------------
// Search.

struct SearchBudget {
  /// Nesting depth of congruence and axiom steps.
  int max_depth = 6;
  std::size_t max_rewrite_steps = 10000;
  int arch_approximants = 8;
  /// Backstop on search nodes visited per query.
  std::size_t max_nodes = 5'000'000;
};

/// Full combines every candidate proof at every node with (join); BottomOnly
/// keeps the single best candidate and uses only the nullary join v =_bot w.
enum class JoinMode { Full, BottomOnly };

struct BoundResult {
  QuantaleValue label;
  TracePtr trace;
  std::size_t nodes = 0;
  bool truncated = false;
};

/// Join of the labels of all proofs found within the budget.
BoundResult best_bound(const Theory& t, const Context& ctx, const Term& v, const Term& w, const SearchBudget& budget,
                       JoinMode mode = JoinMode::BottomOnly);

struct CheckResult {
  bool proved = false;
  /// Present when proved; its conclusion is the goal.
  TracePtr trace;
  std::size_t nodes = 0;
};

CheckResult check_eq(const Theory& t, const VEquation& goal, const SearchBudget& budget,
                     JoinMode mode = JoinMode::BottomOnly);

/// A theory with its axioms preprocessed for search. Reuse one for many queries.
class Prover {
 public:
  explicit Prover(Theory t, std::size_t max_rewrite_steps = 10000);

  const Theory& theory() const { return *theory_; }
  /// Axiom instances available as rewrite steps (mirror images included).
  std::size_t instance_count() const;

  BoundResult best_bound(const Context& ctx, const Term& v, const Term& w, const SearchBudget& budget,
                         JoinMode mode = JoinMode::BottomOnly) const;
  CheckResult check_eq(const VEquation& goal, const SearchBudget& budget, JoinMode mode = JoinMode::BottomOnly) const;
  bool arch_closure_check(const Context& ctx, const Term& v, const Term& w, const QuantaleValue& q,
                          const SearchBudget& budget) const;

 private:
  struct Index;
  std::shared_ptr<const Theory> theory_;
  std::shared_ptr<const Index> index_;
};

/// check_eq at each of budget.arch_approximants approximants of q.
bool arch_closure_check(const Theory& t, const Context& ctx, const Term& v, const Term& w, const QuantaleValue& q,
                        const SearchBudget& budget);

}  // namespace vlam
