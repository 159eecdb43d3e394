#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlam/deduction.hpp"
#include "vlam/quantale.hpp"
#include "vlam/syntax.hpp"
#include "vlam/theory.hpp"
#include "vlam/typecheck.hpp"
#include "vlam/vcat.hpp"

namespace vlam {

enum class Backend {
  FinMet,   // finite V-categories and non-expansive maps
  FinMeas,  // finite-dimensional measure spaces and short linear maps
};

std::string backend_name(Backend b);

// ---------------------------------------------------------------------------
// FinMet points. Elements of the denotation of a type, built structurally.

struct MetPoint;
using Point = std::shared_ptr<const MetPoint>;
using PointMap = std::function<Point(const Point&)>;

struct MetPoint {
  enum class Kind { Ground, Unit, Pair, Fun };
  Kind kind;
  /// Ground: index into the carrier. Fun with `enumerated`: position in the
  /// carrier of its function type.
  std::size_t index = 0;
  Point left;
  Point right;
  /// Fun: the map itself (a non-expansive function between denotations).
  PointMap fn;
  bool enumerated = false;

  static Point ground(std::size_t i);
  static Point unit();
  static Point pair(Point a, Point b);
  static Point fun(PointMap f);
};

// ---------------------------------------------------------------------------
// FinMeas matrices.

/// Matrix of exact rationals, stored by column; column j is the image of the
/// j-th basis measure. Only nonzero entries take space.
class RatMatrix {
 public:
  using Column = std::map<std::size_t, Rational>;

  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols);
  static RatMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  /// Creates the entry when absent.
  Rational& at(std::size_t r, std::size_t c);
  const Rational& at(std::size_t r, std::size_t c) const;
  /// Stored entries of column c by row; may include explicit zeros.
  const Column& column(std::size_t c) const { return data_[c]; }

  friend bool operator==(const RatMatrix& a, const RatMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Column> data_;
};

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
/// Kronecker product; index (i, j) of the product space is i * dim2 + j.
RatMatrix kronecker(const RatMatrix& a, const RatMatrix& b);
/// Operator norm for l1 norms on both sides: the largest column absolute sum.
Rational l1_operator_norm(const RatMatrix& m);
/// Largest over columns of sup over events |mu(A)|, i.e. max(positive part, negative part).
Rational event_sup_norm(const RatMatrix& m);

// ---------------------------------------------------------------------------
// Morphisms and models.

/// An arrow between the denotations of two types.
struct Morphism {
  Type source;
  Type target;
  /// FinMet backend.
  PointMap map;
  /// FinMeas backend: dim(target) x dim(source).
  std::shared_ptr<const RatMatrix> matrix;
};

/// Object-level structure used to name the canonical isomorphisms: a tensor
/// tree whose leaves are labelled (variables or placeholders) or units.
struct Shape {
  enum class Kind { Unit, Leaf, Tensor };
  Kind kind = Kind::Unit;
  std::string label;
  std::optional<Type> type;
  std::vector<Shape> children;

  static Shape unit();
  static Shape leaf(std::string label, Type type);
  static Shape tensor(Shape a, Shape b);
  /// Left-nested tensor; empty gives the unit and one shape gives itself.
  static Shape tensor_all(std::vector<Shape> parts);
  /// The context object (((A1 (x) A2) (x) ...) (x) An), I when empty.
  static Shape context(const Context& ctx);

  Type object() const;
};

/// ((A1 (x) A2) (x) ...) (x) An, or I for the empty context.
Type context_object(const Context& ctx);

/// How distances between FinMeas maps are measured.
enum class Distance {
  /// l1 operator norm of the difference.
  Operator,
  /// Per column, the event supremum of the difference (half the l1 norm for
  /// probability columns); axiom checking uses this one.
  EventSup,
};

class Model {
 public:
  /// FinMet over any of the four quantales.
  static Model finmet(QuantaleSpec spec);
  /// FinMeas; distances are Lawvere values.
  static Model finmeas();

  Backend backend() const;
  QuantaleSpec quantale() const;

  /// FinMet ground type.
  void set_ground(const std::string& name, std::shared_ptr<const FinVCat> carrier);
  /// FinMeas ground type: a basis indexed by these point values.
  void set_ground(const std::string& name, std::vector<Rational> points);
  /// FinMet operation: a non-expansive map from the argument object (left-nested tensor).
  void set_operation(const std::string& name, const OpSig& sig, PointMap map);
  /// FinMeas operation: a short matrix from the argument object.
  void set_operation(const std::string& name, const OpSig& sig, RatMatrix matrix);

  bool interprets_ground(const std::string& name) const;
  bool interprets(const std::string& op) const;
  /// Operation symbols of a term that this model does not interpret.
  std::vector<std::string> uninterpreted(const Term& t) const;

  /// FinMet: the carrier point values (or names) of a ground type.
  std::shared_ptr<const FinVCat> ground_vcat(const std::string& name) const;
  /// FinMeas: the basis point values of a ground type.
  const std::vector<Rational>& ground_points(const std::string& name) const;

  // Objects. --------------------------------------------------------------

  /// FinMet: all points of the denotation of `a`. Function types enumerate
  /// the non-expansive maps and throw LimitExceeded beyond `limit`.
  const std::vector<Point>& carrier(const Type& a, std::size_t limit = 4096) const;
  /// FinMet: the denotation of `a` as a finite V-category.
  std::shared_ptr<const FinVCat> object_vcat(const Type& a, std::size_t limit = 4096) const;
  /// FinMet: position of p in carrier(a).
  std::size_t index_of(const Type& a, const Point& p) const;
  QuantaleValue point_distance(const Type& a, const Point& p, const Point& q) const;
  bool point_equal(const Type& a, const Point& p, const Point& q) const;
  std::string point_to_string(const Type& a, const Point& p) const;
  /// FinMeas: dimension of the denotation of `a`.
  std::size_t dimension(const Type& a) const;

  // Autonomous structure. -------------------------------------------------

  Morphism identity(const Type& a) const;
  /// g . f
  Morphism compose(const Morphism& g, const Morphism& f) const;
  Morphism tensor(const Morphism& f, const Morphism& g) const;
  /// Left-nested tensor of morphisms; the identity on I when empty.
  Morphism tensor_all(const std::vector<Morphism>& fs) const;
  /// f : G (x) A -> B  gives  G -> (A -o B).
  Morphism curry(const Morphism& f) const;
  /// app : (A -o B) (x) A -> B
  Morphism eval(const Type& a, const Type& b) const;
  /// The interpretation of an operation, from its left-nested argument object.
  Morphism operation(const std::string& name) const;
  /// The canonical isomorphism between two shapes with the same labelled leaves.
  Morphism rearrange(const Shape& from, const Shape& to) const;

  /// FinMet: the same map, evaluated once on the whole source carrier and
  /// then answered by lookup. FinMeas: f itself.
  Morphism tabulate(const Morphism& f) const;

  /// Exact equality of parallel morphisms (tables or matrices).
  bool equal(const Morphism& f, const Morphism& g) const;

 private:
  struct Impl;
  explicit Model(std::shared_ptr<Impl> impl);
  std::shared_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Housekeeping isomorphisms.

/// spl : [G1, ..., Gn] -> [G1] (x) ... (x) [Gn]
Morphism split(const Model& m, const std::vector<Context>& parts);
/// The inverse of split.
Morphism join(const Model& m, const std::vector<Context>& parts);
/// sh_E : [E] -> [G1, ..., Gn] for a shuffle E of the parts.
Morphism shuffle(const Model& m, const Context& e, const std::vector<Context>& parts);
/// [G] -> [G with positions i and i+1 swapped]
Morphism exchange(const Model& m, const Context& g, std::size_t i);
/// I (x) A -> A
Morphism left_unitor(const Model& m, const Type& a);
/// (A (x) B) (x) C -> A (x) (B (x) C)
Morphism associator(const Model& m, const Type& a, const Type& b, const Type& c);
Morphism associator_inverse(const Model& m, const Type& a, const Type& b, const Type& c);
/// A (x) B -> B (x) A
Morphism swap(const Model& m, const Type& a, const Type& b);

// ---------------------------------------------------------------------------
// Semantics.

/// The denotation of a typing derivation, by structural recursion on its rules.
/// Throws ModelError on an uninterpreted symbol.
Morphism denote(const Model& m, const Derivation& d);
/// Convenience: denote(m, infer(sig, ctx, v)).
Morphism denote(const Model& m, const Signature& sig, const Context& ctx, const Term& v);

/// FinMet: meet over the source carrier of the target distances.
/// FinMeas: the chosen norm of the difference. Throws on non-parallel arrows.
QuantaleValue semantic_distance(const Model& m, const Morphism& f, const Morphism& g,
                                Distance convention = Distance::Operator);

/// FinMet: every pair of source points moves no further apart.
/// FinMeas: every column has absolute sum at most 1.
bool is_nonexpansive(const Model& m, const Morphism& f);

struct AxiomCheck {
  std::size_t axiom;
  QuantaleValue computed;
  bool satisfied;
};

struct ModelReport {
  std::vector<AxiomCheck> checks;
  /// Axioms using an uninterpreted operation, by index.
  std::vector<std::size_t> skipped;
  std::vector<std::string> uninterpreted;

  bool satisfied() const;
  std::size_t failures() const;
};

/// Checks every axiom with interpreted symbols; FinMeas uses the event-supremum distance.
ModelReport check_model(const Model& m, const Theory& t);

/// Replays the trace, then checks its label against the distance of the denotations.
bool check_soundness(const Model& m, const Theory& t, const ProofTrace& trace);

/// [G, D |- v[w/x]] = [G, x:A |- v] . join . (id (x) [D |- w]) . spl, where d1
/// types v in G, x:A with x last and d2 types w : A in D.
bool semantic_substitution_check(const Model& m, const Signature& sig, const Derivation& d1, const Derivation& d2);

/// The exchange form: [G' |- v] . exch_i = [G |- v] where G' swaps i and i+1.
bool semantic_exchange_check(const Model& m, const Derivation& d, std::size_t i);

/// FinMet: the V-category of non-expansive maps a -> b.
std::shared_ptr<const FinVCat> enumerate_hom_object(const Model& m, const Type& a, const Type& b,
                                                    std::size_t limit = 4096);

/// Printable table (FinMet) or matrix (FinMeas).
std::string morphism_to_string(const Model& m, const Morphism& f);

// ---------------------------------------------------------------------------
// Model files.

/// Parses a model file against the theory it interprets. Throws ModelError
/// with the line number on malformed input.
Model load_model(std::string_view text, const Theory& t);
Model load_model_file(const std::filesystem::path& path, const Theory& t);

}  // namespace vlam
