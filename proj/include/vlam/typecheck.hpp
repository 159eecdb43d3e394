#pragma once

#include <string>
#include <vector>

#include "vlam/syntax.hpp"

namespace vlam {

enum class TypingRule { Ax, Hyp, UnitIntro, UnitElim, TensorIntro, TensorElim, LolliIntro, LolliElim };

std::string rule_name(TypingRule r);

/// A typing derivation. For the rules with a shuffle side condition
/// (ax, I_e, tensor intro/elim, lolli elim) `parts` holds Gamma_1; ...; Gamma_n
/// and the shuffle E is the conclusion context itself.
///
/// For tensor elimination the second premise is typed in Delta, x:A, y:B while
/// parts[1] is Delta. For the other rules parts[i] is the context of premise i.
struct Derivation {
  Context context;
  Term term;
  Type type;
  TypingRule rule;
  std::vector<Derivation> premises;
  std::vector<Context> parts;

  /// Structural equality: same rule, contexts, types, parts and alpha-equal terms at every node.
  friend bool operator==(const Derivation& a, const Derivation& b);
};

/// The unique derivation of ctx |- v. Premise contexts are the projections of
/// ctx onto the free variables of each subterm. A lambda or pattern binder that
/// clashes with a context variable is renamed in the derived term.
Derivation infer(const Signature& sig, const Context& ctx, const Term& v);
/// infer, then compare the type with `expected`.
Derivation check(const Signature& sig, const Context& ctx, const Term& v, const Type& expected);

/// Type of v in ctx, or nullopt when it does not typecheck.
std::optional<Type> type_of(const Signature& sig, const Context& ctx, const Term& v);

/// Validates every node of d against its rule (including the shuffle conditions).
/// Returns a description of the first problem, or nullopt.
std::optional<std::string> derivation_violation(const Signature& sig, const Derivation& d);

/// The derivation of the same judgement with context positions i and i + 1 swapped.
Derivation exchange(const Derivation& d, std::size_t i);

/// From d1 of ..., x:A, ... |- v : B and d2 of Delta |- w : A, the derivation of
/// v[w/x] in the context of d1 with x replaced in place by Delta. With x last
/// this is Gamma, Delta |- v[w/x] : B. Throws DerivationError on a variable clash.
Derivation subst_derivation(const Derivation& d1, const std::string& x, const Derivation& d2);

/// Indented rendering, one node per line.
std::string derivation_to_string(const Derivation& d);

}  // namespace vlam
