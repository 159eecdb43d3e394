#include "vlam/typecheck.hpp"

#include <algorithm>

#include "vlam/error.hpp"

namespace vlam {

std::string rule_name(TypingRule r) {
  switch (r) {
    case TypingRule::Ax: return "ax";
    case TypingRule::Hyp: return "hyp";
    case TypingRule::UnitIntro: return "I_i";
    case TypingRule::UnitElim: return "I_e";
    case TypingRule::TensorIntro: return "tensor_i";
    case TypingRule::TensorElim: return "tensor_e";
    case TypingRule::LolliIntro: return "lolli_i";
    case TypingRule::LolliElim: return "lolli_e";
  }
  return "?";
}

bool operator==(const Derivation& a, const Derivation& b) {
  return a.rule == b.rule && a.context == b.context && a.type == b.type && a.parts == b.parts &&
         alpha_eq(a.term, b.term) && a.premises == b.premises;
}

namespace {

[[noreturn]] void type_error(TypeErrorKind kind, const std::string& msg) { throw TypeError(kind, msg); }

// Variables free in the subterm at `slot`, minus the binders of that slot.
std::vector<std::string> slot_free(const Term& t, std::size_t slot) {
  std::vector<std::string> fv = t.child(slot).free_vars();
  auto b = t.binders_at(slot);
  std::erase_if(fv, [&](const std::string& s) { return std::find(b.begin(), b.end(), s) != b.end(); });
  return fv;
}

// Checks that the children's free variables partition the context.
void check_linear_split(const Context& ctx, const Term& t) {
  for (const auto& x : t.free_vars()) {
    if (!ctx.contains(x)) type_error(TypeErrorKind::UnboundVariable, "unbound variable '" + x + "' in " + print_term(t));
  }
  std::vector<std::string> seen;
  for (std::size_t s = 0; s < t.children().size(); ++s) {
    for (const auto& x : slot_free(t, s)) {
      if (std::find(seen.begin(), seen.end(), x) != seen.end()) {
        type_error(TypeErrorKind::DuplicateUse, "variable '" + x + "' is used more than once in " + print_term(t));
      }
      seen.push_back(x);
    }
  }
  for (const auto& [x, _] : ctx.entries()) {
    if (!t.has_free(x)) type_error(TypeErrorKind::UnusedVariable, "variable '" + x + "' is not used in " + print_term(t));
  }
}

std::set<std::string> avoid_set(const Context& ctx, const Term& t) {
  std::set<std::string> s;
  for (const auto& n : ctx.names()) s.insert(n);
  for (const auto& n : t.free_vars()) s.insert(n);
  for (const auto& n : bound_vars(t)) s.insert(n);
  return s;
}

Derivation infer_rec(const Signature& sig, const Context& ctx, const Term& t) {
  check_linear_split(ctx, t);
  auto part = [&](std::size_t slot) { return ctx.restrict_to(slot_free(t, slot)); };

  switch (t.kind()) {
    case Term::Kind::Var: return {ctx, t, ctx[0].second, TypingRule::Hyp, {}, {}};
    case Term::Kind::Star: return {ctx, t, Type::unit(), TypingRule::UnitIntro, {}, {}};
    case Term::Kind::Op: {
      const OpSig* s = sig.find(t.name());
      if (!s) type_error(TypeErrorKind::UnknownSymbol, "unknown operation symbol '" + t.name() + "'");
      if (s->args.size() != t.children().size()) {
        type_error(TypeErrorKind::ArityMismatch, "operation '" + t.name() + "' expects " +
                                                     std::to_string(s->args.size()) + " argument(s), got " +
                                                     std::to_string(t.children().size()));
      }
      Derivation d{ctx, t, s->result, TypingRule::Ax, {}, {}};
      std::vector<Term> args;
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        d.parts.push_back(part(i));
        d.premises.push_back(infer_rec(sig, d.parts.back(), t.child(i)));
        if (!(d.premises.back().type == s->args[i])) {
          type_error(TypeErrorKind::TypeMismatch, "argument " + std::to_string(i + 1) + " of '" + t.name() +
                                                      "' has type " + d.premises.back().type.to_string() +
                                                      ", expected " + s->args[i].to_string());
        }
        args.push_back(d.premises.back().term);
      }
      d.term = t.with_children(std::move(args));
      return d;
    }
    case Term::Kind::UnitLet: {
      Derivation d{ctx, t, Type::unit(), TypingRule::UnitElim, {}, {part(0), part(1)}};
      d.premises.push_back(infer_rec(sig, d.parts[0], t.child(0)));
      if (!(d.premises[0].type == Type::unit())) {
        type_error(TypeErrorKind::TypeMismatch,
                   "'to _' eliminates I, but the scrutinee has type " + d.premises[0].type.to_string());
      }
      d.premises.push_back(infer_rec(sig, d.parts[1], t.child(1)));
      d.type = d.premises[1].type;
      d.term = Term::unit_let(d.premises[0].term, d.premises[1].term);
      return d;
    }
    case Term::Kind::Tensor: {
      Derivation d{ctx, t, Type::unit(), TypingRule::TensorIntro, {}, {part(0), part(1)}};
      d.premises.push_back(infer_rec(sig, d.parts[0], t.child(0)));
      d.premises.push_back(infer_rec(sig, d.parts[1], t.child(1)));
      d.type = Type::tensor(d.premises[0].type, d.premises[1].type);
      d.term = Term::tensor(d.premises[0].term, d.premises[1].term);
      return d;
    }
    case Term::Kind::TensorLet: {
      std::string x = t.name(), y = t.name2();
      Term body = t.child(1);
      Context delta = part(1);
      auto avoid = avoid_set(ctx, t);
      for (std::string* b : {&x, &y}) {
        if (ctx.contains(*b)) {
          std::string fresh = fresh_name(*b, avoid);
          avoid.insert(fresh);
          body = substitute(body, *b, Term::var(fresh));
          *b = fresh;
        }
      }
      Derivation d{ctx, t, Type::unit(), TypingRule::TensorElim, {}, {part(0), delta}};
      d.premises.push_back(infer_rec(sig, d.parts[0], t.child(0)));
      const Type& st = d.premises[0].type;
      if (st.kind() != Type::Kind::Tensor) {
        type_error(TypeErrorKind::TypeMismatch, "'pm' eliminates a tensor, but the scrutinee has type " + st.to_string());
      }
      for (const std::string* b : {&x, &y}) {
        if (!body.has_free(*b)) type_error(TypeErrorKind::UnusedVariable, "variable '" + *b + "' is not used in " + print_term(t));
      }
      d.premises.push_back(infer_rec(sig, delta.extended(x, st.left()).extended(y, st.right()), body));
      d.type = d.premises[1].type;
      d.term = Term::tensor_let(d.premises[0].term, x, y, d.premises[1].term);
      return d;
    }
    case Term::Kind::Lam: {
      std::string x = t.name();
      Term body = t.child(0);
      if (ctx.contains(x)) {
        std::string fresh = fresh_name(x, avoid_set(ctx, t));
        body = substitute(body, x, Term::var(fresh));
        x = fresh;
      }
      if (!body.has_free(x)) type_error(TypeErrorKind::UnusedVariable, "variable '" + x + "' is not used in " + print_term(t));
      if (sig.ground_types.size() || !sig.operations.empty()) {
        // Annotations must only mention declared ground types.
        std::vector<const Type*> stack{&t.binder_type()};
        while (!stack.empty()) {
          const Type* a = stack.back();
          stack.pop_back();
          if (a->kind() == Type::Kind::Ground && !sig.has_ground(a->name())) {
            type_error(TypeErrorKind::UnknownSymbol, "undeclared ground type '" + a->name() + "'");
          }
          if (a->kind() == Type::Kind::Tensor || a->kind() == Type::Kind::Lolli) {
            stack.push_back(&a->left());
            stack.push_back(&a->right());
          }
        }
      }
      Derivation d{ctx, t, Type::unit(), TypingRule::LolliIntro, {}, {}};
      d.premises.push_back(infer_rec(sig, ctx.extended(x, t.binder_type()), body));
      d.type = Type::lolli(t.binder_type(), d.premises[0].type);
      d.term = Term::lam(x, t.binder_type(), d.premises[0].term);
      return d;
    }
    case Term::Kind::App: {
      Derivation d{ctx, t, Type::unit(), TypingRule::LolliElim, {}, {part(0), part(1)}};
      d.premises.push_back(infer_rec(sig, d.parts[0], t.child(0)));
      d.premises.push_back(infer_rec(sig, d.parts[1], t.child(1)));
      const Type& ft = d.premises[0].type;
      if (ft.kind() != Type::Kind::Lolli) {
        type_error(TypeErrorKind::TypeMismatch,
                   "applied term " + print_term(t.child(0)) + " has type " + ft.to_string() + ", not a function type");
      }
      if (!(ft.left() == d.premises[1].type)) {
        type_error(TypeErrorKind::TypeMismatch, "argument " + print_term(t.child(1)) + " has type " +
                                                    d.premises[1].type.to_string() + ", expected " +
                                                    ft.left().to_string());
      }
      d.type = ft.right();
      d.term = Term::app(d.premises[0].term, d.premises[1].term);
      return d;
    }
  }
  throw Error("infer: unknown term kind");
}

}  // namespace

Derivation infer(const Signature& sig, const Context& ctx, const Term& v) { return infer_rec(sig, ctx, v); }

Derivation check(const Signature& sig, const Context& ctx, const Term& v, const Type& expected) {
  Derivation d = infer(sig, ctx, v);
  if (!(d.type == expected)) {
    throw TypeError(TypeErrorKind::TypeMismatch,
                    print_term(v) + " has type " + d.type.to_string() + ", expected " + expected.to_string());
  }
  return d;
}

std::optional<Type> type_of(const Signature& sig, const Context& ctx, const Term& v) {
  try {
    return infer(sig, ctx, v).type;
  } catch (const TypeError&) {
    return std::nullopt;
  }
}

std::optional<std::string> derivation_violation(const Signature& sig, const Derivation& d) {
  auto fail = [&](const std::string& why) -> std::optional<std::string> {
    return rule_name(d.rule) + " at " + d.context.to_string() + " |- " + print_term(d.term) + ": " + why;
  };
  const Term& t = d.term;
  auto premise_count = [&](std::size_t n) { return d.premises.size() == n; };
  auto premise_ok = [&](std::size_t i, const Context& c, const Term& sub) {
    return d.premises[i].context == c && alpha_eq(d.premises[i].term, sub);
  };

  switch (d.rule) {
    case TypingRule::Hyp:
      if (t.kind() != Term::Kind::Var || d.context.size() != 1 || d.context[0].first != t.name() ||
          !(d.context[0].second == d.type) || !premise_count(0)) {
        return fail("not an instance of hyp");
      }
      return std::nullopt;
    case TypingRule::UnitIntro:
      if (t.kind() != Term::Kind::Star || !d.context.empty() || !(d.type == Type::unit()) || !premise_count(0)) {
        return fail("not an instance of I_i");
      }
      return std::nullopt;
    case TypingRule::LolliIntro: {
      if (t.kind() != Term::Kind::Lam || !premise_count(1) || !d.parts.empty()) return fail("not an instance of lolli_i");
      if (d.context.contains(t.name())) return fail("binder occurs in the context");
      if (!premise_ok(0, d.context.extended(t.name(), t.binder_type()), t.child(0))) return fail("premise does not match");
      if (!(d.type == Type::lolli(t.binder_type(), d.premises[0].type))) return fail("type mismatch");
      break;
    }
    default: {
      if (!is_shuffle(d.context, d.parts)) return fail("conclusion context is not a shuffle of the parts");
      if (d.premises.size() != d.parts.size() || d.premises.size() != t.children().size()) {
        return fail("wrong number of premises");
      }
      switch (d.rule) {
        case TypingRule::Ax: {
          if (t.kind() != Term::Kind::Op) return fail("not an operation");
          const OpSig* s = sig.find(t.name());
          if (!s || s->args.size() != t.children().size()) return fail("signature mismatch");
          for (std::size_t i = 0; i < t.children().size(); ++i) {
            if (!premise_ok(i, d.parts[i], t.child(i)) || !(d.premises[i].type == s->args[i])) {
              return fail("premise " + std::to_string(i) + " does not match");
            }
          }
          if (!(d.type == s->result)) return fail("type mismatch");
          break;
        }
        case TypingRule::UnitElim:
          if (t.kind() != Term::Kind::UnitLet || !premise_ok(0, d.parts[0], t.child(0)) ||
              !premise_ok(1, d.parts[1], t.child(1)) || !(d.premises[0].type == Type::unit()) ||
              !(d.type == d.premises[1].type)) {
            return fail("not an instance of I_e");
          }
          break;
        case TypingRule::TensorIntro:
          if (t.kind() != Term::Kind::Tensor || !premise_ok(0, d.parts[0], t.child(0)) ||
              !premise_ok(1, d.parts[1], t.child(1)) ||
              !(d.type == Type::tensor(d.premises[0].type, d.premises[1].type))) {
            return fail("not an instance of tensor_i");
          }
          break;
        case TypingRule::TensorElim: {
          if (t.kind() != Term::Kind::TensorLet || !premise_ok(0, d.parts[0], t.child(0))) {
            return fail("not an instance of tensor_e");
          }
          const Type& st = d.premises[0].type;
          if (st.kind() != Type::Kind::Tensor) return fail("scrutinee is not a tensor");
          if (d.parts[1].contains(t.name()) || d.parts[1].contains(t.name2())) return fail("binder occurs in Delta");
          Context body_ctx = d.parts[1].extended(t.name(), st.left()).extended(t.name2(), st.right());
          if (!premise_ok(1, body_ctx, t.child(1)) || !(d.type == d.premises[1].type)) return fail("premise mismatch");
          break;
        }
        case TypingRule::LolliElim: {
          if (t.kind() != Term::Kind::App || !premise_ok(0, d.parts[0], t.child(0)) ||
              !premise_ok(1, d.parts[1], t.child(1))) {
            return fail("not an instance of lolli_e");
          }
          const Type& ft = d.premises[0].type;
          if (ft.kind() != Type::Kind::Lolli || !(ft.left() == d.premises[1].type) || !(ft.right() == d.type)) {
            return fail("type mismatch");
          }
          break;
        }
        default: return fail("unknown rule");
      }
    }
  }
  for (const auto& p : d.premises) {
    if (auto bad = derivation_violation(sig, p)) return bad;
  }
  return std::nullopt;
}

Derivation exchange(const Derivation& d, std::size_t i) {
  Derivation out = d;
  out.context = d.context.exchanged(i);
  const std::string& a = d.context[i].first;
  const std::string& b = d.context[i + 1].first;
  if (d.rule == TypingRule::LolliIntro) {
    out.premises[0] = exchange(d.premises[0], i);
    return out;
  }
  // With both variables in one part they are adjacent there too (parts keep the
  // conclusion's relative order), so the exchange moves into that premise.
  // Otherwise only the shuffle witness changes.
  for (std::size_t p = 0; p < d.parts.size(); ++p) {
    auto pa = d.parts[p].position(a);
    auto pb = d.parts[p].position(b);
    if (pa && pb) {
      out.parts[p] = d.parts[p].exchanged(*pa);
      out.premises[p] = exchange(d.premises[p], *pa);
    }
  }
  return out;
}

namespace {

Context replace_in_place(const Context& c, const std::string& x, const Context& delta) {
  std::vector<Context::Entry> e;
  for (const auto& entry : c.entries()) {
    if (entry.first == x) {
      e.insert(e.end(), delta.entries().begin(), delta.entries().end());
    } else {
      e.push_back(entry);
    }
  }
  return Context(std::move(e));
}

Derivation subst_rec(const Derivation& d1, const std::string& x, const Derivation& d2) {
  if (d1.rule == TypingRule::Hyp) return d2;
  Derivation out = d1;
  out.context = replace_in_place(d1.context, x, d2.context);
  for (std::size_t p = 0; p < d1.premises.size(); ++p) {
    if (!d1.premises[p].context.contains(x)) continue;
    out.premises[p] = subst_rec(d1.premises[p], x, d2);
    if (p < d1.parts.size()) out.parts[p] = replace_in_place(d1.parts[p], x, d2.context);
  }
  out.term = substitute(d1.term, x, d2.term);
  return out;
}

}  // namespace

Derivation subst_derivation(const Derivation& d1, const std::string& x, const Derivation& d2) {
  auto pos = d1.context.position(x);
  if (!pos) throw DerivationError("variable '" + x + "' is not in the context of the first derivation");
  if (!(d1.context[*pos].second == d2.type)) {
    throw DerivationError("substituted term has type " + d2.type.to_string() + ", expected " +
                          d1.context[*pos].second.to_string());
  }
  for (const auto& [y, _] : d2.context.entries()) {
    if (y != x && d1.context.contains(y)) throw DerivationError("variable clash: '" + y + "' occurs in both contexts");
  }
  auto bound = bound_vars(d1.term);
  for (const auto& y : bound) {
    if (d2.term.has_free(y) || d2.context.contains(y)) {
      throw DerivationError("variable clash: binder '" + y + "' would capture a variable of the substituted term");
    }
  }
  return subst_rec(d1, x, d2);
}

namespace {

void render(const Derivation& d, int depth, std::string& out) {
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
  out += "(" + rule_name(d.rule) + ") " + d.context.to_string() + " |- " + print_term(d.term) + " : " +
         d.type.to_string();
  if (!d.parts.empty()) {
    out += "   [split";
    for (std::size_t i = 0; i < d.parts.size(); ++i) out += (i ? "; " : " ") + d.parts[i].to_string();
    out += "]";
  }
  out += "\n";
  for (const auto& p : d.premises) render(p, depth + 1, out);
}

}  // namespace

std::string derivation_to_string(const Derivation& d) {
  std::string out;
  render(d, 0, out);
  return out;
}

}  // namespace vlam
