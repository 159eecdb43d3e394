#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vlam/quantale.hpp"
#include "vlam/syntax.hpp"

namespace vlam {

/// ctx |- lhs ={label} rhs : type
struct VEquation {
  Context context;
  Term lhs;
  Term rhs;
  Type type;
  QuantaleValue label;
};

std::string to_string(const VEquation& e);

struct Axiom {
  VEquation equation;
  /// Source line of the declaration the instance came from (0 when built in code).
  int line = 0;
};

struct Theory {
  QuantaleSpec quantale = QuantaleSpec::lawvere();
  bool symmetric = false;
  Signature signature;
  std::vector<Axiom> axioms;
  /// Closed terms introduced with `def`; already expanded inside axioms.
  std::map<std::string, Term> definitions;
  std::map<std::string, long> params;

  ParseOptions parse_options() const;
};

Theory load_theory(std::string_view text);
/// As above, with the quantale used when the text has no 'quantale' line.
Theory load_theory(std::string_view text, QuantaleSpec default_quantale);
Theory load_theory_file(const std::filesystem::path& path);
/// Flattened form: every schema instance written out. load_theory(save_theory(t)) == t.
std::string save_theory(const Theory& t);

/// Evaluates a label expression (rationals, decimals, + - * /, |x|, parentheses,
/// inf/top/bot and the given integer variables) to a basis element.
/// Throws TheoryError(NonBasisLabel) if the text is not a basis element.
QuantaleValue eval_label(QuantaleSpec spec, std::string_view text, const std::map<std::string, long>& vars = {});

/// The two top-labelled directed equations for ctx |- v = w.
std::pair<VEquation, VEquation> classical_equation(const Theory& t, const Context& ctx, const Term& v, const Term& w);

/// Builds and validates a V-equation; throws TypeError if the sides do not
/// typecheck at a common type.
VEquation make_equation(const Theory& t, const Context& ctx, const Term& v, const Term& w, const QuantaleValue& q);

enum class GoalKind {
  Labelled,   // v ={q} w
  Ordered,    // v <= w, label top
  Classical,  // v = w, both directions at top
  Pair,       // v ~ w, a pair for best_bound
};

struct Goal {
  GoalKind kind;
  Context context;
  Term lhs;
  Term rhs;
  Type type;
  /// Absent for Pair goals.
  std::optional<QuantaleValue> label;

  VEquation equation() const;
};

/// "ctx |- v ={q} w", "ctx |- v <= w", "ctx |- v = w" or "ctx |- v ~ w".
Goal parse_goal(const Theory& t, std::string_view text);

}  // namespace vlam
