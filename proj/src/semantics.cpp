#include <set>
#include <sstream>

#include "vlam/error.hpp"
#include "vlam/models.hpp"

namespace vlam {

namespace {

Morphism denote_rec(const Model& m, const Derivation& d) {
  auto den = [&](std::size_t i) { return denote_rec(m, d.premises[i]); };
  switch (d.rule) {
    case TypingRule::Hyp: return m.identity(d.type);
    case TypingRule::UnitIntro: return m.identity(Type::unit());
    case TypingRule::Ax: {
      std::vector<Morphism> args;
      for (std::size_t i = 0; i < d.premises.size(); ++i) args.push_back(den(i));
      Morphism f = m.operation(d.term.name());
      return m.compose(m.compose(f, m.tensor_all(args)),
                       m.compose(split(m, d.parts), shuffle(m, d.context, d.parts)));
    }
    case TypingRule::UnitElim: {
      // n . lambda . (m (x) id) . spl . sh
      Morphism v = den(0), w = den(1);
      Type delta = context_object(d.parts[1]);
      Morphism body = m.compose(w, m.compose(left_unitor(m, delta), m.tensor(v, m.identity(delta))));
      return m.compose(body, m.compose(split(m, d.parts), shuffle(m, d.context, d.parts)));
    }
    case TypingRule::TensorIntro: {
      Morphism pair = m.tensor(den(0), den(1));
      return m.compose(pair, m.compose(split(m, d.parts), shuffle(m, d.context, d.parts)));
    }
    case TypingRule::TensorElim: {
      // n . join_{D;A;B} . alpha . sw . (m (x) id) . spl . sh
      Morphism v = den(0), w = den(1);
      const Type& ab = d.premises[0].type;
      const Context& body_ctx = d.premises[1].context;
      std::size_t k = body_ctx.size();
      Context x(std::vector<Context::Entry>{body_ctx[k - 2]});
      Context y(std::vector<Context::Entry>{body_ctx[k - 1]});
      Type delta = context_object(d.parts[1]);
      Morphism step = m.tensor(v, m.identity(delta));
      step = m.compose(swap(m, ab, delta), step);
      step = m.compose(associator_inverse(m, delta, ab.left(), ab.right()), step);
      step = m.compose(join(m, {d.parts[1], x, y}), step);
      step = m.compose(w, step);
      return m.compose(step, m.compose(split(m, d.parts), shuffle(m, d.context, d.parts)));
    }
    case TypingRule::LolliIntro: {
      // curry(m . join_{G;A})
      const Context& body_ctx = d.premises[0].context;
      Context x(std::vector<Context::Entry>{body_ctx[body_ctx.size() - 1]});
      return m.curry(m.compose(den(0), join(m, {d.context, x})));
    }
    case TypingRule::LolliElim: {
      Morphism f = den(0), a = den(1);
      const Type& fun = d.premises[0].type;
      Morphism body = m.compose(m.eval(fun.left(), fun.right()), m.tensor(f, a));
      return m.compose(body, m.compose(split(m, d.parts), shuffle(m, d.context, d.parts)));
    }
  }
  throw ModelError("unknown typing rule");
}

bool first_order(const Type& a) {
  switch (a.kind()) {
    case Type::Kind::Ground:
    case Type::Kind::Unit: return true;
    case Type::Kind::Tensor: return first_order(a.left()) && first_order(a.right());
    case Type::Kind::Lolli: return false;
  }
  return false;
}

void require_interpreted(const Model& m, const Term& t) {
  auto missing = m.uninterpreted(t);
  if (!missing.empty()) throw ModelError("operation '" + missing[0] + "' is not interpreted");
}

}  // namespace

Morphism denote(const Model& m, const Derivation& d) {
  require_interpreted(m, d.term);
  return denote_rec(m, d);
}

Morphism denote(const Model& m, const Signature& sig, const Context& ctx, const Term& v) {
  return denote(m, infer(sig, ctx, v));
}

QuantaleValue semantic_distance(const Model& m, const Morphism& f, const Morphism& g, Distance convention) {
  if (!(f.source == g.source) || !(f.target == g.target)) {
    throw ModelError("distance between non-parallel maps " + f.source.to_string() + " -> " + f.target.to_string() +
                     " and " + g.source.to_string() + " -> " + g.target.to_string());
  }
  if (m.backend() == Backend::FinMet) {
    QuantaleValue d = m.quantale().top();
    for (const auto& p : m.carrier(f.source)) {
      d = meet(d, m.point_distance(f.target, f.map(p), g.map(p)));
      if (d.is_bottom()) break;
    }
    return d;
  }
  if (!first_order(f.source) || !first_order(f.target)) {
    throw ModelError("measure distances are defined between first-order types only");
  }
  RatMatrix diff = *f.matrix - *g.matrix;
  Rational n = convention == Distance::Operator ? l1_operator_norm(diff) : event_sup_norm(diff);
  return m.quantale().value(n);
}

bool is_nonexpansive(const Model& m, const Morphism& f) {
  if (m.backend() == Backend::FinMeas) return l1_operator_norm(*f.matrix) <= 1;
  const auto& pts = m.carrier(f.source);
  std::vector<Point> images;
  for (const auto& p : pts) images.push_back(f.map(p));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (!leq(m.point_distance(f.source, pts[i], pts[j]), m.point_distance(f.target, images[i], images[j]))) {
        return false;
      }
    }
  }
  return true;
}

bool ModelReport::satisfied() const { return failures() == 0; }

std::size_t ModelReport::failures() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.satisfied ? 0 : 1;
  return n;
}

ModelReport check_model(const Model& m, const Theory& t) {
  if (!(m.quantale() == t.quantale)) throw SpecMismatch("model and theory use different quantales");
  for (const auto& g : t.signature.ground_types) {
    if (!m.interprets_ground(g)) throw ModelError("ground type '" + g + "' is not interpreted");
  }
  ModelReport report;
  std::set<std::string> missing;
  Distance convention = m.backend() == Backend::FinMeas ? Distance::EventSup : Distance::Operator;
  for (std::size_t i = 0; i < t.axioms.size(); ++i) {
    const VEquation& e = t.axioms[i].equation;
    auto a = m.uninterpreted(e.lhs), b = m.uninterpreted(e.rhs);
    if (!a.empty() || !b.empty()) {
      missing.insert(a.begin(), a.end());
      missing.insert(b.begin(), b.end());
      report.skipped.push_back(i);
      continue;
    }
    Morphism f = denote(m, t.signature, e.context, e.lhs);
    Morphism g = denote(m, t.signature, e.context, e.rhs);
    QuantaleValue d = semantic_distance(m, f, g, convention);
    report.checks.push_back({i, d, leq(e.label, d)});
  }
  report.uninterpreted.assign(missing.begin(), missing.end());
  return report;
}

bool check_soundness(const Model& m, const Theory& t, const ProofTrace& trace) {
  VEquation e = replay(t, trace);
  Morphism f = denote(m, t.signature, e.context, e.lhs);
  Morphism g = denote(m, t.signature, e.context, e.rhs);
  Distance convention = m.backend() == Backend::FinMeas ? Distance::EventSup : Distance::Operator;
  return leq(e.label, semantic_distance(m, f, g, convention));
}

bool semantic_substitution_check(const Model& m, const Signature& sig, const Derivation& d1, const Derivation& d2) {
  const Context& gx = d1.context;
  if (gx.empty()) throw ModelError("substitution needs a variable in the first context");
  const auto& [x, a] = gx[gx.size() - 1];
  if (!(a == d2.type)) throw ModelError("substituted term has type " + d2.type.to_string() + ", not " + a.to_string());
  Context g = gx.without(x);
  const Context& delta = d2.context;
  std::vector<Context::Entry> both = g.entries();
  both.insert(both.end(), delta.entries().begin(), delta.entries().end());
  Context gd(both);
  Term vw = substitute(d1.term, x, d2.term);
  Morphism lhs = denote(m, sig, gd, vw);
  Context only_x(std::vector<Context::Entry>{gx[gx.size() - 1]});
  Morphism rhs = m.compose(denote(m, d1),
                           m.compose(join(m, {g, only_x}),
                                     m.compose(m.tensor(m.identity(context_object(g)), denote(m, d2)),
                                               split(m, {g, delta}))));
  return m.equal(lhs, rhs);
}

bool semantic_exchange_check(const Model& m, const Derivation& d, std::size_t i) {
  Derivation swapped = exchange(d, i);
  Morphism lhs = m.compose(denote(m, swapped), exchange(m, d.context, i));
  return m.equal(lhs, denote(m, d));
}

std::shared_ptr<const FinVCat> enumerate_hom_object(const Model& m, const Type& a, const Type& b, std::size_t limit) {
  if (m.backend() != Backend::FinMet) throw ModelError("hom enumeration needs the finmet backend");
  auto ha = m.object_vcat(a, limit), hb = m.object_vcat(b, limit);
  return enumerate_hom(*ha, *hb, limit).category;
}

std::string morphism_to_string(const Model& m, const Morphism& f) {
  std::ostringstream out;
  out << f.source.to_string() << " -> " << f.target.to_string() << "\n";
  if (m.backend() == Backend::FinMet) {
    for (const auto& p : m.carrier(f.source)) {
      out << "  " << m.point_to_string(f.source, p) << " |-> " << m.point_to_string(f.target, f.map(p)) << "\n";
    }
    return out.str();
  }
  const RatMatrix& a = *f.matrix;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    out << " ";
    for (std::size_t j = 0; j < a.cols(); ++j) out << " " << to_string(a.at(i, j));
    out << "\n";
  }
  return out.str();
}

}  // namespace vlam
