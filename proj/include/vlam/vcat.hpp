#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vlam/quantale.hpp"

namespace vlam {

/// A finite V-category: a carrier of named points with a dense table
/// a(x, y) satisfying k <= a(x, x) and a(x, y) (x) a(y, z) <= a(x, z).
class FinVCat {
 public:
  /// Validates both V-category laws; throws Error naming the first violation.
  FinVCat(QuantaleSpec spec, std::vector<std::string> carrier, std::vector<QuantaleValue> table);

  /// Skips validation. Only for constructions that preserve the laws.
  static FinVCat unchecked(QuantaleSpec spec, std::vector<std::string> carrier, std::vector<QuantaleValue> table);

  /// The tensor unit: one point at distance k from itself.
  static FinVCat unit(QuantaleSpec spec);
  /// k on the diagonal and bottom elsewhere.
  static FinVCat discrete(QuantaleSpec spec, std::vector<std::string> carrier);

  QuantaleSpec spec() const { return spec_; }
  std::size_t size() const { return carrier_.size(); }
  const std::vector<std::string>& carrier() const { return carrier_; }
  const QuantaleValue& at(std::size_t x, std::size_t y) const { return table_[x * carrier_.size() + y]; }
  std::optional<std::size_t> index_of(const std::string& point) const;

  /// Description of the first violated law, or nullopt when the table is a V-category.
  std::optional<std::string> violation() const;

 private:
  FinVCat(QuantaleSpec spec, std::vector<std::string> carrier, std::vector<QuantaleValue> table, bool check);

  QuantaleSpec spec_;
  std::vector<std::string> carrier_;
  std::vector<QuantaleValue> table_;
};

/// A function between carriers; a V-functor when non-expansive.
struct VFunctorTable {
  std::shared_ptr<const FinVCat> source;
  std::shared_ptr<const FinVCat> target;
  std::vector<std::size_t> mapping;

  bool is_nonexpansive() const;
};

VFunctorTable identity_functor(std::shared_ptr<const FinVCat> c);
/// g . f
VFunctorTable compose(const VFunctorTable& g, const VFunctorTable& f);

/// Cartesian product carrier, pointwise tensor distance. Index of (x, y) is x * |c2| + y.
FinVCat tensor_vcat(const FinVCat& c1, const FinVCat& c2);

/// Meet over the source carrier of b(f(x), g(x)).
QuantaleValue hom_distance(const VFunctorTable& f, const VFunctorTable& g);

bool natural_leq(const FinVCat& c, std::size_t x, std::size_t y);
bool is_separated(const FinVCat& c);
bool is_symmetric(const FinVCat& c);

struct Quotient {
  std::shared_ptr<const FinVCat> category;
  VFunctorTable projection;
  /// Members of each class, in carrier order; the first one names the class.
  std::vector<std::vector<std::size_t>> classes;
};

/// Collapses x ~ y (x <= y and y <= x). Classes are ordered by their least
/// member. Throws if the induced table is not representative-independent.
Quotient separated_quotient(std::shared_ptr<const FinVCat> c);

/// All non-expansive maps a -> b, with the pointwise-meet distance. Throws
/// LimitExceeded when |b|^|a| exceeds `limit`.
struct HomCarrier {
  std::shared_ptr<const FinVCat> category;
  std::vector<std::vector<std::size_t>> tables;
  std::map<std::vector<std::size_t>, std::size_t> index;
};

HomCarrier enumerate_hom(const FinVCat& a, const FinVCat& b, std::size_t limit = 4096);

}  // namespace vlam
