#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlam/rational.hpp"

namespace vlam {

/// The four commutative integral quantales supported by the workbench.
///
///   Boolean      ({0 <= 1}, or, and)
///   Godel        ([0,1], max, min)
///   Lawvere      ([0,inf] with reversed order, inf, +)
///   Ultrametric  ([0,inf] with reversed order, inf, max)
///
/// In every case the tensor unit k is the top element. Every representable
/// element is a basis element: the carriers are restricted to exact rationals
/// (plus infinity for the metric ones).
enum class QuantaleKind { Boolean, Godel, Lawvere, Ultrametric };

class QuantaleValue;

class QuantaleSpec {
 public:
  constexpr explicit QuantaleSpec(QuantaleKind kind) : kind_(kind) {}

  static constexpr QuantaleSpec boolean() { return QuantaleSpec(QuantaleKind::Boolean); }
  static constexpr QuantaleSpec godel() { return QuantaleSpec(QuantaleKind::Godel); }
  static constexpr QuantaleSpec lawvere() { return QuantaleSpec(QuantaleKind::Lawvere); }
  static constexpr QuantaleSpec ultrametric() { return QuantaleSpec(QuantaleKind::Ultrametric); }

  /// Accepts the CLI/theory-file names: bool, godel, metric, ultrametric.
  static QuantaleSpec from_name(std::string_view name);

  constexpr QuantaleKind kind() const { return kind_; }
  std::string name() const;
  /// True for the metric-style instances whose order is the reverse of the numeric one.
  constexpr bool reversed() const {
    return kind_ == QuantaleKind::Lawvere || kind_ == QuantaleKind::Ultrametric;
  }

  QuantaleValue top() const;
  QuantaleValue bottom() const;
  QuantaleValue unit() const;
  QuantaleValue infinity() const;

  /// Throws CarrierError if `r` is outside the carrier.
  QuantaleValue value(const Rational& r) const;
  bool in_carrier(const Rational& r) const;

  /// Parses "inf", "top", "bot" or an exact rational / finite decimal.
  QuantaleValue parse(std::string_view text) const;

  friend constexpr bool operator==(QuantaleSpec a, QuantaleSpec b) { return a.kind_ == b.kind_; }

 private:
  QuantaleKind kind_;
};

class QuantaleValue {
 public:
  QuantaleSpec spec() const { return spec_; }
  bool is_infinite() const { return infinite_; }
  /// The numeric value; only meaningful when !is_infinite().
  const Rational& number() const { return number_; }

  bool is_top() const;
  bool is_bottom() const;

  std::string to_string() const;

  friend bool operator==(const QuantaleValue& a, const QuantaleValue& b) {
    return a.spec_ == b.spec_ && a.infinite_ == b.infinite_ && (a.infinite_ || a.number_ == b.number_);
  }

 private:
  friend class QuantaleSpec;
  QuantaleValue(QuantaleSpec spec, bool infinite, Rational number)
      : spec_(spec), infinite_(infinite), number_(std::move(number)) {
    number_.canonicalize();
  }

  QuantaleSpec spec_;
  bool infinite_;
  Rational number_;
};

std::ostream& operator<<(std::ostream& os, const QuantaleValue& q);

QuantaleValue tensor(const QuantaleValue& q, const QuantaleValue& r);
/// Residuation: the largest s with tensor(q, s) <= r.
QuantaleValue implies(const QuantaleValue& q, const QuantaleValue& r);
/// Tensor of a finite family; the empty tensor is the unit k.
QuantaleValue tensor_all(QuantaleSpec spec, std::span<const QuantaleValue> values);
/// Least upper bound in the quantale order; the empty join is bottom.
QuantaleValue join(QuantaleSpec spec, std::span<const QuantaleValue> values);
/// Greatest lower bound; the empty meet is top.
QuantaleValue meet(QuantaleSpec spec, std::span<const QuantaleValue> values);
QuantaleValue join(const QuantaleValue& q, const QuantaleValue& r);
QuantaleValue meet(const QuantaleValue& q, const QuantaleValue& r);

bool leq(const QuantaleValue& q, const QuantaleValue& r);
bool way_below(const QuantaleValue& q, const QuantaleValue& r);
bool in_basis(const QuantaleValue& q);

/// `count` basis elements way-below `q` forming a chain whose join tends to `q`.
///   Boolean: q repeated.
///   Godel: q(1 - 1/2^i) for i = 1..count (0 repeated when q = 0).
///   Lawvere/ultrametric: q + 1/2^i for i = 0..count-1 (inf repeated when q = inf).
std::vector<QuantaleValue> approximants(const QuantaleValue& q, int count);

}  // namespace vlam
