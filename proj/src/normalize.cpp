#include <set>

#include "vlam/deduction.hpp"

namespace vlam {

std::string fig3_name(Fig3Rule r) {
  switch (r) {
    case Fig3Rule::BetaPm: return "beta-pm";
    case Fig3Rule::EtaPm: return "eta-pm";
    case Fig3Rule::BetaUnit: return "beta-unit";
    case Fig3Rule::EtaUnit: return "eta-unit";
    case Fig3Rule::BetaLam: return "beta-lam";
    case Fig3Rule::EtaLam: return "eta-lam";
    case Fig3Rule::CommuteUnit: return "commute-unit";
    case Fig3Rule::CommutePm: return "commute-pm";
  }
  return "?";
}

namespace {

using Kind = Term::Kind;

std::set<std::string> names_in(const Term& t) {
  std::set<std::string> s(t.free_vars().begin(), t.free_vars().end());
  for (auto& b : bound_vars(t)) s.insert(b);
  return s;
}

bool binds(const Term& t, std::size_t slot, const std::string& x) {
  for (const auto& b : t.binders_at(slot)) {
    if (b == x) return true;
  }
  return false;
}

// First position of x * y in `t` where x and y still refer to the outer binders.
std::optional<Position> find_pair(const Term& t, const std::string& x, const std::string& y) {
  if (t.kind() == Kind::Tensor && t.child(0).kind() == Kind::Var && t.child(0).name() == x &&
      t.child(1).kind() == Kind::Var && t.child(1).name() == y) {
    return Position{};
  }
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    if (binds(t, i, x) || binds(t, i, y)) continue;
    if (!t.child(i).has_free(x) && !t.child(i).has_free(y)) continue;
    if (auto p = find_pair(t.child(i), x, y)) {
      p->insert(p->begin(), i);
      return p;
    }
  }
  return std::nullopt;
}

std::optional<Position> find_star(const Term& t) {
  if (t.kind() == Kind::Star) return Position{};
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    if (auto p = find_star(t.child(i))) {
      p->insert(p->begin(), i);
      return p;
    }
  }
  return std::nullopt;
}

// u[v/z] where z is the hole at position p of u.
Term plug(const Term& u, const Position& p, const Term& v) {
  std::set<std::string> avoid = names_in(u);
  for (auto& n : names_in(v)) avoid.insert(n);
  std::string z = fresh_name("z", avoid);
  return substitute(replace_at(u, p, Term::var(z)), z, v);
}

std::optional<Term> root_step(const Term& t, Fig3Rule rule) {
  switch (rule) {
    case Fig3Rule::BetaLam:
      if (t.kind() == Kind::App && t.child(0).kind() == Kind::Lam) {
        const Term& lam = t.child(0);
        return substitute(lam.child(0), lam.name(), t.child(1));
      }
      return std::nullopt;
    case Fig3Rule::BetaPm:
      if (t.kind() == Kind::TensorLet && t.child(0).kind() == Kind::Tensor) {
        const Term& pair = t.child(0);
        return substitute_all(t.child(1), {{t.name(), pair.child(0)}, {t.name2(), pair.child(1)}});
      }
      return std::nullopt;
    case Fig3Rule::BetaUnit:
      if (t.kind() == Kind::UnitLet && t.child(0).kind() == Kind::Star) return t.child(1);
      return std::nullopt;
    case Fig3Rule::EtaLam:
      if (t.kind() == Kind::Lam && t.child(0).kind() == Kind::App) {
        const Term& body = t.child(0);
        if (body.child(1).kind() == Kind::Var && body.child(1).name() == t.name() && !body.child(0).has_free(t.name())) {
          return body.child(0);
        }
      }
      return std::nullopt;
    case Fig3Rule::EtaPm:
      if (t.kind() == Kind::TensorLet) {
        if (auto p = find_pair(t.child(1), t.name(), t.name2())) return plug(t.child(1), *p, t.child(0));
      }
      return std::nullopt;
    case Fig3Rule::EtaUnit:
      if (t.kind() == Kind::UnitLet) {
        if (auto p = find_star(t.child(1))) return plug(t.child(1), *p, t.child(0));
      }
      return std::nullopt;
    default: return std::nullopt;
  }
}

constexpr Fig3Rule kRootRules[] = {Fig3Rule::BetaLam, Fig3Rule::BetaPm, Fig3Rule::BetaUnit,
                                   Fig3Rule::EtaLam,  Fig3Rule::EtaPm,  Fig3Rule::EtaUnit};

bool root_redex(const Term& t) {
  for (auto r : kRootRules) {
    if (root_step(t, r)) return true;
  }
  return false;
}

// Pulls the eliminator at child `slot` of `parent` outward.
std::optional<Term> commute(const Term& parent, std::size_t slot, Fig3Rule rule) {
  if (slot >= parent.children().size()) return std::nullopt;
  const Term& e = parent.child(slot);
  Kind want = rule == Fig3Rule::CommuteUnit ? Kind::UnitLet : Kind::TensorLet;
  if (e.kind() != want) return std::nullopt;
  // Swapping two eliminators through each other's bodies would loop.
  if ((parent.kind() == Kind::UnitLet || parent.kind() == Kind::TensorLet) && slot == 1) return std::nullopt;
  if (root_redex(e.child(0))) return std::nullopt;
  auto inner = parent.binders_at(slot);
  for (const auto& b : inner) {
    if (e.child(0).has_free(b)) return std::nullopt;
  }
  auto rebuilt = [&](const Term& w) {
    std::vector<Term> kids = parent.children();
    kids[slot] = w;
    return parent.with_children(std::move(kids));
  };
  if (rule == Fig3Rule::CommuteUnit) return Term::unit_let(e.child(0), rebuilt(e.child(1)));
  std::string x = e.name(), y = e.name2();
  Term body = e.child(1);
  std::set<std::string> avoid(parent.free_vars().begin(), parent.free_vars().end());
  avoid.insert(inner.begin(), inner.end());
  if (avoid.count(x) || avoid.count(y)) {
    std::set<std::string> all = avoid;
    for (auto& n : names_in(e)) all.insert(n);
    std::string x2 = fresh_name(x, all);
    all.insert(x2);
    std::string y2 = fresh_name(y, all);
    body = substitute_all(body, {{x, Term::var(x2)}, {y, Term::var(y2)}});
    x = x2;
    y = y2;
  }
  return Term::tensor_let(e.child(0), x, y, rebuilt(body));
}

std::optional<RewriteStep> find_step(const Term& t, Position& here) {
  for (auto r : kRootRules) {
    if (root_step(t, r)) return RewriteStep{r, here};
  }
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    for (auto r : {Fig3Rule::CommuteUnit, Fig3Rule::CommutePm}) {
      if (commute(t, i, r)) {
        Position p = here;
        p.push_back(i);
        return RewriteStep{r, p};
      }
    }
  }
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    here.push_back(i);
    auto s = find_step(t.child(i), here);
    here.pop_back();
    if (s) return s;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Term> apply_rewrite(const Term& t, Fig3Rule rule, const Position& pos) {
  if (rule == Fig3Rule::CommuteUnit || rule == Fig3Rule::CommutePm) {
    if (pos.empty()) return std::nullopt;
    Position parent_pos(pos.begin(), pos.end() - 1);
    auto parent = subterm_at(t, parent_pos);
    if (!parent) return std::nullopt;
    auto r = commute(*parent, pos.back(), rule);
    if (!r) return std::nullopt;
    return replace_at(t, parent_pos, *r);
  }
  auto sub = subterm_at(t, pos);
  if (!sub) return std::nullopt;
  auto r = root_step(*sub, rule);
  if (!r) return std::nullopt;
  return replace_at(t, pos, *r);
}

NormalForm normalize(const Term& v, std::size_t max_steps) {
  NormalForm nf{v, {}, false};
  Position here;
  while (true) {
    auto step = find_step(nf.term, here);
    if (!step) break;
    if (nf.steps.size() >= max_steps) {
      nf.exhausted = true;
      break;
    }
    nf.term = *apply_rewrite(nf.term, step->rule, step->position);
    nf.steps.push_back(std::move(*step));
  }
  return nf;
}

}  // namespace vlam
