#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vlam {

/// A ::= X | I | A * B | A -o B
class Type {
 public:
  enum class Kind { Ground, Unit, Tensor, Lolli };

  static Type ground(std::string name);
  static Type unit();
  static Type tensor(Type left, Type right);
  static Type lolli(Type domain, Type codomain);

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const Type& left() const { return *node_->left; }
  const Type& right() const { return *node_->right; }

  std::string to_string() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator<(const Type& a, const Type& b) { return a.to_string() < b.to_string(); }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::unique_ptr<Type> left;
    std::unique_ptr<Type> right;
  };
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Terms of the linear lambda calculus. Immutable and cheaply copyable.
///
/// Children are addressed by slot:
///   Op        args 0..n-1
///   UnitLet   0 = scrutinee, 1 = body         (v to _. w)
///   Tensor    0 = left, 1 = right             (v * w)
///   TensorLet 0 = scrutinee, 1 = body         (pm v to x * y. w)
///   Lam       0 = body                        (\x:A. v)
///   App       0 = function, 1 = argument      (v w)
class Term {
 public:
  enum class Kind { Var, Op, Star, UnitLet, Tensor, TensorLet, Lam, App };

  static Term var(std::string name);
  static Term op(std::string symbol, std::vector<Term> args);
  static Term star();
  static Term unit_let(Term scrutinee, Term body);
  static Term tensor(Term left, Term right);
  static Term tensor_let(Term scrutinee, std::string x, std::string y, Term body);
  static Term lam(std::string x, Type type, Term body);
  static Term app(Term fun, Term arg);

  Kind kind() const { return node_->kind; }
  /// Variable name, operation symbol, or first binder (TensorLet, Lam).
  const std::string& name() const { return node_->name; }
  /// Second binder of TensorLet.
  const std::string& name2() const { return node_->name2; }
  /// Binder annotation of Lam.
  const Type& binder_type() const { return *node_->type; }
  const std::vector<Term>& children() const { return node_->children; }
  const Term& child(std::size_t slot) const { return node_->children[slot]; }
  std::size_t size() const { return node_->size; }

  /// Free variables, sorted, without duplicates.
  const std::vector<std::string>& free_vars() const { return node_->free; }
  bool has_free(const std::string& x) const;

  /// Variables bound by this node in the given child slot.
  std::vector<std::string> binders_at(std::size_t slot) const;

  /// Same node but with different children (binders and annotations kept).
  Term with_children(std::vector<Term> children) const;

  bool same_node(const Term& other) const { return node_ == other.node_; }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::string name2;
    std::unique_ptr<Type> type;
    std::vector<Term> children;
    std::vector<std::string> free;
    std::size_t size = 1;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Term make(Kind kind, std::string name, std::string name2, std::optional<Type> type, std::vector<Term> children);
  std::shared_ptr<const Node> node_;
};

/// Ordered, duplicate-free list of typed variables.
class Context {
 public:
  using Entry = std::pair<std::string, Type>;

  Context() = default;
  /// Throws TypeError(BadContext) on a repeated variable.
  explicit Context(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }

  bool contains(const std::string& x) const;
  std::optional<Type> type_of(const std::string& x) const;
  std::optional<std::size_t> position(const std::string& x) const;
  std::vector<std::string> names() const;

  /// Entries whose names are in `keep`, in this context's order.
  Context restrict_to(const std::vector<std::string>& keep) const;
  Context without(const std::string& x) const;
  Context extended(const std::string& x, const Type& type) const;
  Context concat(const Context& other) const;
  /// Transposes positions i and i + 1.
  Context exchanged(std::size_t i) const;

  std::string to_string() const;

  friend bool operator==(const Context& a, const Context& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Sorted operation symbols f : A1, ..., An -> A with n >= 1, over declared ground types.
struct OpSig {
  std::vector<Type> args;
  Type result;
};

struct Signature {
  std::vector<std::string> ground_types;
  std::map<std::string, OpSig> operations;

  bool has_ground(const std::string& name) const;
  const OpSig* find(const std::string& symbol) const;
};

// ---------------------------------------------------------------------------
// Printing and parsing

/// Canonical ASCII form; parse_term(print_term(t)) is alpha-equivalent to t.
std::string print_term(const Term& t);

struct ParseOptions {
  /// When set, operation symbols are checked against it (existence and arity),
  /// and ground type names must be declared.
  const Signature* signature = nullptr;
  /// Closed terms substituted for identifiers with these names.
  const std::map<std::string, Term>* definitions = nullptr;
  /// Position reported for the first character of the text.
  int first_line = 1;
  int first_column = 1;
};

Term parse_term(std::string_view text, const ParseOptions& options = {});
/// Parses the longest term prefix of `text` and stores in `consumed` the offset
/// of the first unconsumed character (after skipping whitespace).
Term parse_term_prefix(std::string_view text, std::size_t& consumed, const ParseOptions& options = {});
Type parse_type(std::string_view text, const ParseOptions& options = {});
/// "-" or empty for the empty context, otherwise "x:A, y:B".
Context parse_context(std::string_view text, const ParseOptions& options = {});

struct ParsedJudgement {
  Context context;
  Term term;
  std::optional<Type> type;
};
/// "ctx |- term" or "ctx |- term : A".
ParsedJudgement parse_judgement(std::string_view text, const ParseOptions& options = {});

/// True for identifiers usable as variables (not keywords).
bool is_identifier(std::string_view s);

// ---------------------------------------------------------------------------
// Binding operations

/// The first of base'1, base'2, ... not in `avoid` (a trailing 'N on base is dropped first).
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

/// Capture-avoiding v[w/x]. Binders are renamed only when they would capture.
Term substitute(const Term& v, const std::string& x, const Term& w);
/// Simultaneous capture-avoiding substitution.
Term substitute_all(const Term& v, const std::map<std::string, Term>& sigma);

bool alpha_eq(const Term& a, const Term& b);
/// A string that is equal for two terms iff they are alpha-equivalent.
std::string canonical_key(const Term& t);

/// Number of free occurrences of x (linearity diagnostics).
std::size_t count_free(const Term& t, const std::string& x);
/// All variables bound anywhere inside t.
std::vector<std::string> bound_vars(const Term& t);

// Positions are child-slot paths from the root.
using Position = std::vector<std::size_t>;
std::optional<Term> subterm_at(const Term& t, const Position& p);
/// Replaces the subterm at p. Binders on the path scope over `replacement`
/// (this is rewriting in context, not substitution).
Term replace_at(const Term& t, const Position& p, const Term& replacement);

// ---------------------------------------------------------------------------
// Shuffles

bool is_shuffle(const Context& candidate, const std::vector<Context>& parts);
/// Every interleaving of the parts preserving each part's order. Throws
/// LimitExceeded when the total number of variables exceeds `limit`.
std::vector<Context> enumerate_shuffles(const std::vector<Context>& parts, std::size_t limit = 10);

}  // namespace vlam
