#include "vlam/vcat.hpp"

#include <numeric>

#include "vlam/error.hpp"

namespace vlam {

FinVCat::FinVCat(QuantaleSpec spec, std::vector<std::string> carrier, std::vector<QuantaleValue> table)
    : FinVCat(spec, std::move(carrier), std::move(table), true) {}

FinVCat::FinVCat(QuantaleSpec spec, std::vector<std::string> carrier, std::vector<QuantaleValue> table, bool check)
    : spec_(spec), carrier_(std::move(carrier)), table_(std::move(table)) {
  if (table_.size() != carrier_.size() * carrier_.size()) {
    throw Error("V-category table has " + std::to_string(table_.size()) + " entries, expected " +
                std::to_string(carrier_.size() * carrier_.size()));
  }
  for (const auto& v : table_) {
    if (!(v.spec() == spec_)) throw SpecMismatch("V-category table mixes quantales");
  }
  if (check) {
    if (auto bad = violation()) throw Error("not a V-category: " + *bad);
  }
}

FinVCat FinVCat::unchecked(QuantaleSpec spec, std::vector<std::string> carrier, std::vector<QuantaleValue> table) {
  return FinVCat(spec, std::move(carrier), std::move(table), false);
}

FinVCat FinVCat::unit(QuantaleSpec spec) { return FinVCat(spec, {"*"}, {spec.unit()}, false); }

FinVCat FinVCat::discrete(QuantaleSpec spec, std::vector<std::string> carrier) {
  const std::size_t n = carrier.size();
  std::vector<QuantaleValue> table(n * n, spec.bottom());
  for (std::size_t i = 0; i < n; ++i) table[i * n + i] = spec.unit();
  return FinVCat(spec, std::move(carrier), std::move(table), false);
}

std::optional<std::size_t> FinVCat::index_of(const std::string& point) const {
  for (std::size_t i = 0; i < carrier_.size(); ++i) {
    if (carrier_[i] == point) return i;
  }
  return std::nullopt;
}

std::optional<std::string> FinVCat::violation() const {
  const std::size_t n = size();
  const QuantaleValue k = spec_.unit();
  for (std::size_t x = 0; x < n; ++x) {
    if (!leq(k, at(x, x))) return "reflexivity fails at " + carrier_[x];
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        if (!leq(tensor(at(x, y), at(y, z)), at(x, z))) {
          return "transitivity fails at (" + carrier_[x] + ", " + carrier_[y] + ", " + carrier_[z] + ")";
        }
      }
    }
  }
  return std::nullopt;
}

bool VFunctorTable::is_nonexpansive() const {
  const std::size_t n = source->size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (!leq(source->at(x, y), target->at(mapping[x], mapping[y]))) return false;
    }
  }
  return true;
}

VFunctorTable identity_functor(std::shared_ptr<const FinVCat> c) {
  std::vector<std::size_t> m(c->size());
  std::iota(m.begin(), m.end(), std::size_t{0});
  return {c, c, std::move(m)};
}

VFunctorTable compose(const VFunctorTable& g, const VFunctorTable& f) {
  if (f.target->size() != g.source->size()) throw Error("compose: carrier mismatch");
  std::vector<std::size_t> m(f.mapping.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = g.mapping[f.mapping[i]];
  return {f.source, g.target, std::move(m)};
}

FinVCat tensor_vcat(const FinVCat& c1, const FinVCat& c2) {
  if (!(c1.spec() == c2.spec())) throw SpecMismatch("tensor of V-categories over different quantales");
  const std::size_t n1 = c1.size(), n2 = c2.size(), n = n1 * n2;
  std::vector<std::string> carrier;
  carrier.reserve(n);
  for (std::size_t x = 0; x < n1; ++x) {
    for (std::size_t y = 0; y < n2; ++y) carrier.push_back("(" + c1.carrier()[x] + "," + c2.carrier()[y] + ")");
  }
  std::vector<QuantaleValue> table;
  table.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      table.push_back(tensor(c1.at(i / n2, j / n2), c2.at(i % n2, j % n2)));
    }
  }
  return FinVCat::unchecked(c1.spec(), std::move(carrier), std::move(table));
}

QuantaleValue hom_distance(const VFunctorTable& f, const VFunctorTable& g) {
  if (f.source->size() != g.source->size() || f.target->size() != g.target->size()) {
    throw Error("hom_distance: functors are not parallel");
  }
  QuantaleValue acc = f.target->spec().top();
  for (std::size_t x = 0; x < f.mapping.size(); ++x) acc = meet(acc, f.target->at(f.mapping[x], g.mapping[x]));
  return acc;
}

bool natural_leq(const FinVCat& c, std::size_t x, std::size_t y) { return leq(c.spec().unit(), c.at(x, y)); }

bool is_separated(const FinVCat& c) {
  for (std::size_t x = 0; x < c.size(); ++x) {
    for (std::size_t y = x + 1; y < c.size(); ++y) {
      if (natural_leq(c, x, y) && natural_leq(c, y, x)) return false;
    }
  }
  return true;
}

bool is_symmetric(const FinVCat& c) {
  for (std::size_t x = 0; x < c.size(); ++x) {
    for (std::size_t y = x + 1; y < c.size(); ++y) {
      if (!(c.at(x, y) == c.at(y, x))) return false;
    }
  }
  return true;
}

Quotient separated_quotient(std::shared_ptr<const FinVCat> c) {
  const std::size_t n = c->size();
  std::vector<std::size_t> class_of(n, n);
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t x = 0; x < n; ++x) {
    if (class_of[x] != n) continue;
    class_of[x] = classes.size();
    classes.push_back({x});
    for (std::size_t y = x + 1; y < n; ++y) {
      if (class_of[y] == n && natural_leq(*c, x, y) && natural_leq(*c, y, x)) {
        class_of[y] = class_of[x];
        classes.back().push_back(y);
      }
    }
  }
  const std::size_t m = classes.size();
  std::vector<std::string> carrier;
  std::vector<QuantaleValue> table;
  table.reserve(m * m);
  for (const auto& cls : classes) carrier.push_back(c->carrier()[cls.front()]);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const QuantaleValue& v = c->at(classes[i].front(), classes[j].front());
      for (std::size_t x : classes[i]) {
        for (std::size_t y : classes[j]) {
          if (!(c->at(x, y) == v)) {
            throw Error("separated_quotient: distance depends on the representative of [" + carrier[i] + "], [" +
                        carrier[j] + "]");
          }
        }
      }
      table.push_back(v);
    }
  }
  auto q = std::make_shared<const FinVCat>(FinVCat::unchecked(c->spec(), std::move(carrier), std::move(table)));
  return {q, VFunctorTable{c, q, class_of}, std::move(classes)};
}

HomCarrier enumerate_hom(const FinVCat& a, const FinVCat& b, std::size_t limit) {
  if (!(a.spec() == b.spec())) throw SpecMismatch("hom object over different quantales");
  const std::size_t na = a.size(), nb = b.size();
  // |b|^|a| candidates, checked before enumerating.
  std::size_t candidates = 1;
  for (std::size_t i = 0; i < na; ++i) {
    if (nb != 0 && candidates > limit / nb) throw LimitExceeded("hom object enumeration exceeds the limit of " + std::to_string(limit));
    candidates *= nb;
  }
  if (candidates > limit) throw LimitExceeded("hom object enumeration exceeds the limit of " + std::to_string(limit));

  HomCarrier out;
  std::vector<std::size_t> table(na, 0);
  // Depth-first with pruning: extend a partial table only while it stays non-expansive.
  auto consistent = [&](std::size_t upto) {
    const std::size_t x = upto;
    for (std::size_t y = 0; y <= x; ++y) {
      if (!leq(a.at(x, y), b.at(table[x], table[y])) || !leq(a.at(y, x), b.at(table[y], table[x]))) return false;
    }
    return true;
  };
  auto recurse = [&](auto&& self, std::size_t pos) -> void {
    if (pos == na) {
      out.index.emplace(table, out.tables.size());
      out.tables.push_back(table);
      return;
    }
    for (std::size_t v = 0; v < nb; ++v) {
      table[pos] = v;
      if (consistent(pos)) self(self, pos + 1);
    }
  };
  if (na == 0 || nb > 0) recurse(recurse, 0);

  const std::size_t m = out.tables.size();
  std::vector<std::string> carrier;
  carrier.reserve(m);
  for (const auto& t : out.tables) {
    std::string name = "[";
    for (std::size_t i = 0; i < t.size(); ++i) name += (i ? " " : "") + b.carrier()[t[i]];
    carrier.push_back(name + "]");
  }
  std::vector<QuantaleValue> dist;
  dist.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      QuantaleValue acc = a.spec().top();
      for (std::size_t x = 0; x < na; ++x) acc = meet(acc, b.at(out.tables[i][x], out.tables[j][x]));
      dist.push_back(acc);
    }
  }
  out.category = std::make_shared<const FinVCat>(FinVCat::unchecked(a.spec(), std::move(carrier), std::move(dist)));
  return out;
}

}  // namespace vlam
