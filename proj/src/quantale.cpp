#include "vlam/quantale.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

#include "vlam/error.hpp"

namespace vlam {

std::optional<Rational> parse_rational(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) return std::nullopt;
  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    pos = 1;
  }
  auto digits = [](std::string_view d) {
    return !d.empty() && std::all_of(d.begin(), d.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  std::string_view body(s);
  body.remove_prefix(pos);
  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!digits(num) || !digits(den)) return std::nullopt;
    mpz_class d{std::string(den)};
    if (d == 0) return std::nullopt;
    result = Rational(mpz_class(std::string(num)), d);
    result.canonicalize();
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((!whole.empty() && !digits(whole)) || !digits(frac)) return std::nullopt;
    mpz_class scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    mpz_class numerator(std::string(whole.empty() ? "0" : whole));
    numerator = numerator * scale + mpz_class(std::string(frac));
    result = Rational(numerator, scale);
    result.canonicalize();
  } else {
    if (!digits(body)) return std::nullopt;
    result = Rational(mpz_class(std::string(body)));
  }
  if (negative) result = -result;
  return result;
}

std::string to_string(const Rational& r) { return r.get_str(); }

QuantaleSpec QuantaleSpec::from_name(std::string_view name) {
  if (name == "bool" || name == "boolean") return boolean();
  if (name == "godel") return godel();
  if (name == "metric" || name == "lawvere") return lawvere();
  if (name == "ultrametric") return ultrametric();
  throw Error("unknown quantale '" + std::string(name) + "' (expected bool, godel, metric or ultrametric)");
}

std::string QuantaleSpec::name() const {
  switch (kind_) {
    case QuantaleKind::Boolean: return "bool";
    case QuantaleKind::Godel: return "godel";
    case QuantaleKind::Lawvere: return "metric";
    case QuantaleKind::Ultrametric: return "ultrametric";
  }
  return "?";
}

QuantaleValue QuantaleSpec::top() const {
  return QuantaleValue(*this, false, reversed() ? Rational(0) : Rational(1));
}

QuantaleValue QuantaleSpec::unit() const { return top(); }

QuantaleValue QuantaleSpec::bottom() const {
  if (reversed()) return QuantaleValue(*this, true, Rational(0));
  return QuantaleValue(*this, false, Rational(0));
}

QuantaleValue QuantaleSpec::infinity() const {
  if (!reversed()) throw CarrierError("quantale " + name() + " has no infinite element");
  return QuantaleValue(*this, true, Rational(0));
}

bool QuantaleSpec::in_carrier(const Rational& r) const {
  switch (kind_) {
    case QuantaleKind::Boolean: return r == 0 || r == 1;
    case QuantaleKind::Godel: return r >= 0 && r <= 1;
    case QuantaleKind::Lawvere:
    case QuantaleKind::Ultrametric: return r >= 0;
  }
  return false;
}

QuantaleValue QuantaleSpec::value(const Rational& r) const {
  if (!in_carrier(r)) throw CarrierError(to_string(r) + " is not an element of the " + name() + " quantale");
  return QuantaleValue(*this, false, r);
}

QuantaleValue QuantaleSpec::parse(std::string_view text) const {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  }
  if (t == "inf" || t == "∞") return infinity();
  if (t == "top") return top();
  if (t == "bot") return bottom();
  auto r = parse_rational(t);
  if (!r) throw CarrierError("'" + t + "' is not a basis element (expected an exact rational, inf, top or bot)");
  return value(*r);
}

bool QuantaleValue::is_top() const { return *this == spec_.top(); }
bool QuantaleValue::is_bottom() const { return *this == spec_.bottom(); }

std::string QuantaleValue::to_string() const { return infinite_ ? "inf" : vlam::to_string(number_); }

std::ostream& operator<<(std::ostream& os, const QuantaleValue& q) { return os << q.to_string(); }

namespace {

void require_same(const QuantaleValue& q, const QuantaleValue& r) {
  if (!(q.spec() == r.spec())) {
    throw SpecMismatch("cannot combine " + q.spec().name() + " and " + r.spec().name() + " values");
  }
}

// Numeric comparison treating infinity as the largest number.
int compare_numeric(const QuantaleValue& q, const QuantaleValue& r) {
  if (q.is_infinite() || r.is_infinite()) {
    if (q.is_infinite() && r.is_infinite()) return 0;
    return q.is_infinite() ? 1 : -1;
  }
  return cmp(q.number(), r.number());
}

}  // namespace

bool leq(const QuantaleValue& q, const QuantaleValue& r) {
  require_same(q, r);
  int c = compare_numeric(q, r);
  return q.spec().reversed() ? c >= 0 : c <= 0;
}

QuantaleValue join(const QuantaleValue& q, const QuantaleValue& r) { return leq(q, r) ? r : q; }
QuantaleValue meet(const QuantaleValue& q, const QuantaleValue& r) { return leq(q, r) ? q : r; }

QuantaleValue join(QuantaleSpec spec, std::span<const QuantaleValue> values) {
  QuantaleValue acc = spec.bottom();
  for (const auto& v : values) acc = join(acc, v);
  return acc;
}

QuantaleValue meet(QuantaleSpec spec, std::span<const QuantaleValue> values) {
  QuantaleValue acc = spec.top();
  for (const auto& v : values) acc = meet(acc, v);
  return acc;
}

QuantaleValue tensor(const QuantaleValue& q, const QuantaleValue& r) {
  require_same(q, r);
  const QuantaleSpec spec = q.spec();
  switch (spec.kind()) {
    case QuantaleKind::Boolean:
    case QuantaleKind::Godel: return meet(q, r);
    case QuantaleKind::Ultrametric: return compare_numeric(q, r) >= 0 ? q : r;
    case QuantaleKind::Lawvere:
      if (q.is_infinite() || r.is_infinite()) return spec.infinity();
      return spec.value(q.number() + r.number());
  }
  return q;
}

QuantaleValue implies(const QuantaleValue& q, const QuantaleValue& r) {
  require_same(q, r);
  const QuantaleSpec spec = q.spec();
  if (spec.kind() != QuantaleKind::Lawvere) return leq(q, r) ? spec.top() : r;
  if (q.is_infinite()) return spec.top();
  if (r.is_infinite()) return spec.infinity();
  Rational d = r.number() - q.number();
  return spec.value(d < 0 ? Rational(0) : d);
}

QuantaleValue tensor_all(QuantaleSpec spec, std::span<const QuantaleValue> values) {
  QuantaleValue acc = spec.unit();
  for (const auto& v : values) acc = tensor(acc, v);
  return acc;
}

bool way_below(const QuantaleValue& q, const QuantaleValue& r) {
  require_same(q, r);
  switch (q.spec().kind()) {
    case QuantaleKind::Boolean: return leq(q, r);
    case QuantaleKind::Godel: return q.number() == 0 || q.number() < r.number();
    case QuantaleKind::Lawvere:
    case QuantaleKind::Ultrametric:
      // Strictly greater numerically, with inf > inf.
      if (q.is_infinite()) return true;
      if (r.is_infinite()) return false;
      return q.number() > r.number();
  }
  return false;
}

bool in_basis(const QuantaleValue& q) {
  // Exact rationals (and inf) are the basis of every supported instance.
  return q.is_infinite() ? q.spec().reversed() : q.spec().in_carrier(q.number());
}

std::vector<QuantaleValue> approximants(const QuantaleValue& q, int count) {
  if (count < 1) throw Error("approximants: count must be positive");
  const QuantaleSpec spec = q.spec();
  std::vector<QuantaleValue> out;
  out.reserve(static_cast<std::size_t>(count));
  Rational step(1);
  for (int i = 0; i < count; ++i) {
    switch (spec.kind()) {
      case QuantaleKind::Boolean: out.push_back(q); break;
      case QuantaleKind::Godel:
        step /= 2;
        out.push_back(spec.value(q.number() - q.number() * step));
        break;
      case QuantaleKind::Lawvere:
      case QuantaleKind::Ultrametric:
        if (q.is_infinite()) {
          out.push_back(q);
        } else {
          out.push_back(spec.value(q.number() + step));
          step /= 2;
        }
        break;
    }
  }
  return out;
}

}  // namespace vlam
