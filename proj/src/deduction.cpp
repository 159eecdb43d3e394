#include "vlam/deduction.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "vlam/error.hpp"
#include "vlam/typecheck.hpp"

namespace vlam {

std::string rule_name(ProofRule r) {
  switch (r) {
    case ProofRule::Refl: return "refl";
    case ProofRule::Trans: return "trans";
    case ProofRule::Weak: return "weak";
    case ProofRule::Arch: return "arch";
    case ProofRule::Join: return "join";
    case ProofRule::CongOp: return "cong-op";
    case ProofRule::CongTensor: return "cong-tensor";
    case ProofRule::CongPm: return "cong-pm";
    case ProofRule::CongTo: return "cong-to";
    case ProofRule::CongLam: return "cong-lam";
    case ProofRule::CongApp: return "cong-app";
    case ProofRule::Perm: return "perm";
    case ProofRule::Subst: return "subst";
    case ProofRule::Axiom: return "axiom";
    case ProofRule::Fig3Rewrite: return "fig3-rewrite";
    case ProofRule::Symmetry: return "symmetry";
  }
  return "?";
}

namespace {

using Kind = Term::Kind;

bool better(const QuantaleValue& a, const QuantaleValue& b) { return !leq(a, b); }

TracePtr make(VEquation eq, ProofRule rule, std::vector<TracePtr> premises = {}) {
  auto t = std::make_shared<ProofTrace>(ProofTrace{std::move(eq), rule, std::move(premises), std::nullopt, false, {}, -1});
  return t;
}

TracePtr refl(const Context& ctx, const Term& v, const Type& type, QuantaleSpec spec) {
  return make({ctx, v, v, type, spec.top()}, ProofRule::Refl);
}

TracePtr trans(const TracePtr& a, const TracePtr& b) {
  if (!a) return b;
  if (!b) return a;
  const auto& x = a->conclusion;
  const auto& y = b->conclusion;
  return make({x.context, x.lhs, y.rhs, x.type, tensor(x.label, y.label)}, ProofRule::Trans, {a, b});
}

// Proof of from =_top nf following `steps`; reversed gives nf =_top from.
TracePtr chain(const Context& ctx, const Type& type, const Term& from, const std::vector<RewriteStep>& steps,
               bool reversed, QuantaleSpec spec) {
  TracePtr acc;
  Term cur = from;
  std::vector<TracePtr> links;
  for (const auto& s : steps) {
    Term next = *apply_rewrite(cur, s.rule, s.position);
    auto eq = reversed ? VEquation{ctx, next, cur, type, spec.top()} : VEquation{ctx, cur, next, type, spec.top()};
    auto n = std::make_shared<ProofTrace>(ProofTrace{std::move(eq), ProofRule::Fig3Rewrite, {}, s, reversed, {}, -1});
    links.push_back(n);
    cur = next;
  }
  if (reversed) std::reverse(links.begin(), links.end());
  for (auto& l : links) acc = trans(acc, l);
  return acc;
}

std::string head_key(const Term& t) {
  if (t.kind() == Kind::Op) return "f:" + t.name();
  return std::to_string(static_cast<int>(t.kind()));
}

struct Instance {
  Context context;
  Term lhs;
  Term rhs;
  Type type;
  QuantaleValue label;
  std::set<std::string> vars;
  /// Schema variables whose type is not fixed by an enclosing operation argument.
  std::vector<std::string> unforced;
  TracePtr proof;
};

void unforced_vars(const Term& t, bool forced, std::vector<std::string>& out) {
  if (t.kind() == Kind::Var) {
    if (!forced) out.push_back(t.name());
    return;
  }
  for (const auto& c : t.children()) unforced_vars(c, t.kind() == Kind::Op, out);
}

using Sigma = std::map<std::string, Term>;
using Bound = std::vector<std::pair<std::string, std::string>>;

// First-order matching of a linear pattern; schema variables bind whole subterms.
bool match(const Term& p, const Term& t, const std::set<std::string>& schema, Sigma& sigma, Bound& bound) {
  if (p.kind() == Kind::Var) {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
      if (it->first == p.name()) return t.kind() == Kind::Var && t.name() == it->second;
    }
    for (const auto& [pb, tb] : bound) {
      if (t.has_free(tb)) return false;
    }
    if (schema.count(p.name())) {
      auto it = sigma.find(p.name());
      if (it != sigma.end()) return alpha_eq(it->second, t);
      sigma.emplace(p.name(), t);
      return true;
    }
    return t.kind() == Kind::Var && t.name() == p.name();
  }
  if (p.kind() != t.kind() || p.children().size() != t.children().size()) return false;
  if (p.kind() == Kind::Op && p.name() != t.name()) return false;
  if (p.kind() == Kind::Lam && !(p.binder_type() == t.binder_type())) return false;
  for (std::size_t i = 0; i < p.children().size(); ++i) {
    std::size_t pushed = 0;
    if ((p.kind() == Kind::Lam && i == 0) || (p.kind() == Kind::TensorLet && i == 1)) {
      bound.emplace_back(p.name(), t.name());
      ++pushed;
      if (p.kind() == Kind::TensorLet) {
        bound.emplace_back(p.name2(), t.name2());
        ++pushed;
      }
    }
    bool ok = match(p.child(i), t.child(i), schema, sigma, bound);
    bound.resize(bound.size() - pushed);
    if (!ok) return false;
  }
  return true;
}

struct Found {
  QuantaleValue label;
  TracePtr trace;
};

struct SearchIndex {
  std::vector<Instance> instances;
  std::unordered_map<std::string, std::vector<std::size_t>> by_head;
  std::vector<std::size_t> wildcard;
};

// Axioms (and their mirror images in a symmetric theory) with normalized
// sides, indexed by the head of the left-hand side.
SearchIndex build_index(const Theory& t, std::size_t max_rewrite_steps) {
  SearchIndex index;
    std::set<std::string> seen;
    auto add = [&](const VEquation& e, TracePtr proof) {
      if (e.label.is_bottom()) return;
      auto nl = normalize(e.lhs, max_rewrite_steps);
      auto nr = normalize(e.rhs, max_rewrite_steps);
      if (alpha_eq(nl.term, nr.term)) return;
      std::string key = e.context.to_string() + "|" + canonical_key(nl.term) + "|" + canonical_key(nr.term) + "|" +
                        e.label.to_string();
      if (!seen.insert(key).second) return;
      proof = trans(chain(e.context, e.type, e.lhs, nl.steps, true, t.quantale), proof);
      proof = trans(proof, chain(e.context, e.type, e.rhs, nr.steps, false, t.quantale));
      auto names = e.context.names();
      Instance inst{e.context, nl.term, nr.term, e.type, e.label, {names.begin(), names.end()}, {}, proof};
      unforced_vars(nl.term, false, inst.unforced);
      std::size_t idx = index.instances.size();
      if (nl.term.kind() == Kind::Var) {
        index.wildcard.push_back(idx);
      } else {
        index.by_head[head_key(nl.term)].push_back(idx);
      }
      index.instances.push_back(std::move(inst));
    };
    for (std::size_t k = 0; k < t.axioms.size(); ++k) {
      const VEquation& e = t.axioms[k].equation;
      auto ax = std::make_shared<ProofTrace>(ProofTrace{e, ProofRule::Axiom, {}, std::nullopt, false, {}, static_cast<long>(k)});
      add(e, ax);
    }
    if (t.symmetric) {
      for (std::size_t k = 0; k < t.axioms.size(); ++k) {
        const VEquation& e = t.axioms[k].equation;
        auto ax = std::make_shared<ProofTrace>(ProofTrace{e, ProofRule::Axiom, {}, std::nullopt, false, {}, static_cast<long>(k)});
        VEquation rev{e.context, e.rhs, e.lhs, e.type, e.label};
        add(rev, make(rev, ProofRule::Symmetry, {ax}));
      }
    }
    return index;
}

class Engine {
 public:
  Engine(const Theory& t, const SearchIndex& index, const SearchBudget& b, JoinMode mode)
      : t_(t), index_(index), budget_(b), mode_(mode), spec_(t.quantale) {}

  std::size_t nodes() const { return nodes_; }
  bool truncated() const { return truncated_; }

  /// Best proof of ctx |- v ={?} w at increasing depth; stops once `target` is reached.
  std::optional<Found> run(const Context& ctx, const Term& v, const Term& w, const Type& type,
                           const std::optional<QuantaleValue>& target) {
    std::optional<Found> best;
    auto done = [&] {
      return best && (best->label.is_top() || (target && leq(*target, best->label)));
    };
    int first = mode_ == JoinMode::Full ? budget_.max_depth : 0;
    for (int d = first; d <= budget_.max_depth && !done(); ++d) {
      QuantaleValue floor = best && mode_ == JoinMode::BottomOnly ? best->label : spec_.bottom();
      auto r = search(ctx, v, w, type, d, floor);
      if (r && (!best || better(r->label, best->label))) best = r;
      if (truncated_) break;
    }
    return best;
  }

 private:
  struct Memo {
    std::optional<Found> found;
    QuantaleValue floor;
  };

  struct Step {
    QuantaleValue label;
    Position position;
    std::size_t instance;
    Sigma sigma;
  };

  std::optional<Found> search(const Context& ctx, const Term& v, const Term& w, const Type& type, int depth,
                              const QuantaleValue& floor) {
    if (alpha_eq(v, w)) {
      if (!better(spec_.top(), floor)) return std::nullopt;
      return Found{spec_.top(), refl(ctx, v, type, spec_)};
    }
    if (depth <= 0) return std::nullopt;
    if (++nodes_ > budget_.max_nodes) {
      truncated_ = true;
      return std::nullopt;
    }
    std::string key = std::to_string(depth) + "|" + ctx.to_string() + "|" + canonical_key(v) + "|" + canonical_key(w);
    if (auto it = memo_.find(key); it != memo_.end()) {
      const Memo& m = it->second;
      if (m.found) {
        if (better(m.found->label, floor)) return m.found;
        return std::nullopt;
      }
      if (leq(m.floor, floor)) return std::nullopt;
    }
    auto result = compute(ctx, v, w, type, depth, floor);
    if (!truncated_) {
      memo_.insert_or_assign(key, Memo{result, floor});
    }
    return result;
  }

  bool full() const { return mode_ == JoinMode::Full; }

  std::optional<Found> compute(const Context& ctx, const Term& v, const Term& w, const Type& type, int depth,
                               const QuantaleValue& floor) {
    std::vector<Found> all;
    std::optional<Found> best;
    QuantaleValue cur = floor;
    auto offer = [&](Found f) {
      if (full()) {
        all.push_back(f);
        return;
      }
      if (better(f.label, cur)) {
        cur = f.label;
        best = std::move(f);
      }
    };

    Derivation dv = infer(t_.signature, ctx, v);
    if (auto c = congruence(dv, w, depth, cur)) offer(std::move(*c));

    if (!(best && best->label.is_top())) {
      std::vector<Step> steps = enumerate_steps(dv);
      std::stable_sort(steps.begin(), steps.end(),
                       [](const Step& a, const Step& b) { return better(a.label, b.label); });
      for (auto& s : steps) {
        if (!full() && !better(s.label, cur)) break;
        QuantaleValue sub_floor = full() ? spec_.bottom() : implies(s.label, cur);
        if (!full() && sub_floor.is_top()) break;
        auto [raw, u] = rewrite(dv, s);
        auto nu = normalize(u, budget_.max_rewrite_steps);
        auto r = search(ctx, nu.term, w, type, depth - 1, sub_floor);
        if (truncated_) break;
        if (!r) continue;
        QuantaleValue total = tensor(s.label, r->label);
        if (!full() && !better(total, cur)) continue;
        TracePtr step = trans(step_trace(dv, s, raw), chain(ctx, type, raw, nu.steps, false, spec_));
        offer(Found{total, trans(step, r->trace)});
        if (!full() && cur.is_top()) break;
      }
    }

    if (!full()) return best;
    if (all.empty()) return std::nullopt;
    if (all.size() == 1) return all[0];
    std::vector<QuantaleValue> labels;
    std::vector<TracePtr> premises;
    for (auto& f : all) {
      labels.push_back(f.label);
      premises.push_back(f.trace);
    }
    QuantaleValue j = join(spec_, labels);
    if (!better(j, floor)) return std::nullopt;
    return Found{j, make({ctx, v, w, type, j}, ProofRule::Join, std::move(premises))};
  }

  // Same head constructor on both sides: relate the components pairwise.
  std::optional<Found> congruence(const Derivation& dv, const Term& w0, int depth, const QuantaleValue& floor) {
    const Term& v = dv.term;
    if (v.kind() != w0.kind() || v.children().empty()) return std::nullopt;
    if (v.children().size() != w0.children().size()) return std::nullopt;
    Term w = w0;
    ProofRule rule;
    switch (v.kind()) {
      case Kind::Op:
        if (v.name() != w.name()) return std::nullopt;
        rule = ProofRule::CongOp;
        break;
      case Kind::Tensor: rule = ProofRule::CongTensor; break;
      case Kind::UnitLet: rule = ProofRule::CongTo; break;
      case Kind::App: rule = ProofRule::CongApp; break;
      case Kind::Lam:
        if (!(v.binder_type() == w.binder_type())) return std::nullopt;
        if (w.name() != v.name()) {
          w = Term::lam(v.name(), v.binder_type(), substitute(w.child(0), w.name(), Term::var(v.name())));
        }
        rule = ProofRule::CongLam;
        break;
      case Kind::TensorLet:
        if (w.name() != v.name() || w.name2() != v.name2()) {
          Term body = substitute_all(w.child(1), {{w.name(), Term::var(v.name())}, {w.name2(), Term::var(v.name2())}});
          w = Term::tensor_let(w.child(0), v.name(), v.name2(), body);
        }
        rule = ProofRule::CongPm;
        break;
      default: return std::nullopt;
    }
    // Components must live in the same parts of the context.
    for (std::size_t i = 0; i < v.children().size(); ++i) {
      if (v.child(i).free_vars() != w.child(i).free_vars()) return std::nullopt;
    }
    QuantaleValue product = spec_.top();
    std::vector<TracePtr> premises;
    Type scrutinee_type = Type::unit();
    for (std::size_t i = 0; i < v.children().size(); ++i) {
      const Derivation& p = dv.premises[i];
      Context pctx = p.context;
      if (rule == ProofRule::CongPm && i == 1) {
        // Scrutinee types must agree for the bodies to share a context.
        pctx = p.context;
      }
      Type ptype = p.type;
      if (rule == ProofRule::CongApp && i == 0) {
        // Both functions must have the same type; checked via the argument types below.
        try {
          Derivation dw = infer(t_.signature, p.context, w.child(0));
          if (!(dw.type == p.type)) return std::nullopt;
        } catch (const TypeError&) {
          return std::nullopt;
        }
      }
      if (rule == ProofRule::CongPm && i == 0) {
        try {
          Derivation dw = infer(t_.signature, p.context, w.child(0));
          if (!(dw.type == p.type)) return std::nullopt;
        } catch (const TypeError&) {
          return std::nullopt;
        }
        scrutinee_type = p.type;
      }
      QuantaleValue sub_floor = full() ? spec_.bottom() : implies(product, floor);
      if (!full() && sub_floor.is_top()) return std::nullopt;
      auto r = search(pctx, v.child(i), w.child(i), ptype, depth - 1, sub_floor);
      if (!r) return std::nullopt;
      product = tensor(product, r->label);
      premises.push_back(r->trace);
    }
    if (!full() && !better(product, floor)) return std::nullopt;
    if (full() && product.is_bottom()) return std::nullopt;
    (void)scrutinee_type;
    return Found{product, make({dv.context, v, w, dv.type, product}, rule, std::move(premises))};
  }

  void collect(const Derivation& d, Position& pos, std::vector<Step>& out) {
    const Term& t = d.term;
    auto try_list = [&](const std::vector<std::size_t>& list) {
      for (std::size_t idx : list) {
        const Instance& inst = index_.instances[idx];
        if (!(inst.type == d.type)) continue;
        Sigma sigma;
        Bound bound;
        if (!match(inst.lhs, t, inst.vars, sigma, bound)) continue;
        if (sigma.size() != inst.vars.size()) continue;
        bool typed = true;
        for (const auto& x : inst.unforced) {
          if (!inst.vars.count(x)) continue;
          const Type& a = *inst.context.type_of(x);
          const Term& s = sigma.at(x);
          try {
            if (!(infer(t_.signature, d.context.restrict_to(s.free_vars()), s).type == a)) typed = false;
          } catch (const TypeError&) {
            typed = false;
          }
          if (!typed) break;
        }
        if (!typed) continue;
        out.push_back(Step{inst.label, pos, idx, std::move(sigma)});
      }
    };
    if (t.kind() != Kind::Var) {
      if (auto it = index_.by_head.find(head_key(t)); it != index_.by_head.end()) try_list(it->second);
    }
    try_list(index_.wildcard);
    for (std::size_t i = 0; i < d.premises.size(); ++i) {
      pos.push_back(i);
      collect(d.premises[i], pos, out);
      pos.pop_back();
    }
  }

  std::vector<Step> enumerate_steps(const Derivation& dv) {
    std::vector<Step> out;
    Position pos;
    collect(dv, pos, out);
    return out;
  }

  // The rewritten subterm and the whole rewritten term.
  std::pair<Term, Term> rewrite(const Derivation& dv, const Step& s) {
    const Instance& inst = index_.instances[s.instance];
    Term sub = substitute_all(inst.rhs, s.sigma);
    return {sub, replace_at(dv.term, s.position, sub)};
  }

  static const Derivation& at(const Derivation& d, const Position& p, std::size_t len) {
    const Derivation* cur = &d;
    for (std::size_t k = 0; k < len; ++k) cur = &cur->premises[p[k]];
    return *cur;
  }

  // Proof of v ={q} v[p := r sigma], the raw result of the step.
  TracePtr step_trace(const Derivation& dv, const Step& s, Term& raw) {
    const Instance& inst = index_.instances[s.instance];
    const Derivation& local = at(dv, s.position, s.position.size());
    Term l = substitute_all(inst.lhs, s.sigma);
    Term r = substitute_all(inst.rhs, s.sigma);
    TracePtr cur = inst.proof;
    if (!inst.context.empty()) {
      std::vector<TracePtr> premises{inst.proof};
      std::vector<Context::Entry> entries;
      std::vector<std::string> vars;
      for (const auto& [x, a] : inst.context.entries()) {
        const Term& arg = s.sigma.at(x);
        Context c = local.context.restrict_to(arg.free_vars());
        premises.push_back(refl(c, arg, a, spec_));
        entries.insert(entries.end(), c.entries().begin(), c.entries().end());
        vars.push_back(x);
      }
      auto n = std::make_shared<ProofTrace>(ProofTrace{{Context(entries), l, r, inst.type, inst.label},
                                                       ProofRule::Subst,
                                                       std::move(premises),
                                                       std::nullopt,
                                                       false,
                                                       std::move(vars),
                                                       -1});
      cur = n;
    }
    if (!(cur->conclusion.context == local.context)) {
      cur = make({local.context, l, r, inst.type, inst.label}, ProofRule::Perm, {cur});
    }
    // Congruence path back up to the root.
    for (std::size_t k = s.position.size(); k-- > 0;) {
      const Derivation& parent = at(dv, s.position, k);
      std::size_t slot = s.position[k];
      std::vector<TracePtr> premises;
      std::vector<Term> kids = parent.term.children();
      for (std::size_t j = 0; j < kids.size(); ++j) {
        if (j == slot) {
          premises.push_back(cur);
          kids[j] = cur->conclusion.rhs;
        } else {
          premises.push_back(refl(parent.premises[j].context, kids[j], parent.premises[j].type, spec_));
        }
      }
      Term rhs = parent.term.with_children(std::move(kids));
      cur = make({parent.context, parent.term, rhs, parent.type, cur->conclusion.label}, cong_rule(parent.term.kind()),
                 std::move(premises));
    }
    raw = cur->conclusion.rhs;
    return cur;
  }

  static ProofRule cong_rule(Kind k) {
    switch (k) {
      case Kind::Op: return ProofRule::CongOp;
      case Kind::Tensor: return ProofRule::CongTensor;
      case Kind::TensorLet: return ProofRule::CongPm;
      case Kind::UnitLet: return ProofRule::CongTo;
      case Kind::Lam: return ProofRule::CongLam;
      case Kind::App: return ProofRule::CongApp;
      default: throw Error("no congruence rule for a leaf");
    }
  }

  const Theory& t_;
  const SearchIndex& index_;
  SearchBudget budget_;
  JoinMode mode_;
  QuantaleSpec spec_;
  std::unordered_map<std::string, Memo> memo_;
  std::size_t nodes_ = 0;
  bool truncated_ = false;
};

// ---------------------------------------------------------------------------
// Replay.

[[noreturn]] void misapplied(const ProofTrace& n, const std::string& why) {
  throw ReplayError(ReplayErrorKind::RuleMisapplication, rule_name(n.rule) + ": " + why);
}

void require(bool ok, const ProofTrace& n, const std::string& why) {
  if (!ok) misapplied(n, why);
}

std::vector<std::string> minus(const std::vector<std::string>& xs, const std::vector<std::string>& drop) {
  std::vector<std::string> out;
  for (const auto& x : xs) {
    if (std::find(drop.begin(), drop.end(), x) == drop.end()) out.push_back(x);
  }
  return out;
}

Kind cong_kind(ProofRule r) {
  switch (r) {
    case ProofRule::CongOp: return Kind::Op;
    case ProofRule::CongTensor: return Kind::Tensor;
    case ProofRule::CongPm: return Kind::TensorLet;
    case ProofRule::CongTo: return Kind::UnitLet;
    case ProofRule::CongLam: return Kind::Lam;
    default: return Kind::App;
  }
}

class Replayer {
 public:
  explicit Replayer(const Theory& t) : t_(t), spec_(t.quantale) {}

  VEquation run(const ProofTrace& n) {
    std::vector<VEquation> prem;
    for (const auto& p : n.premises) {
      require(p != nullptr, n, "missing premise");
      prem.push_back(run(*p));
    }
    const VEquation& c = n.conclusion;
    require(c.label.spec() == spec_, n, "label from another quantale");
    try {
      Type a = infer(t_.signature, c.context, c.lhs).type;
      Type b = infer(t_.signature, c.context, c.rhs).type;
      require(a == c.type && b == c.type, n, "sides do not have the stated type " + c.type.to_string());
    } catch (const TypeError& e) {
      misapplied(n, std::string("ill-typed conclusion: ") + e.what());
    }
    QuantaleValue label = compute(n, prem);
    if (!(label == c.label)) {
      throw ReplayError(ReplayErrorKind::LabelMismatch, rule_name(n.rule) + ": stored label " + c.label.to_string() +
                                                            " but the premises give " + label.to_string());
    }
    return c;
  }

 private:
  static bool same_sides(const VEquation& a, const VEquation& b) {
    return a.context == b.context && alpha_eq(a.lhs, b.lhs) && alpha_eq(a.rhs, b.rhs);
  }

  QuantaleValue compute(const ProofTrace& n, const std::vector<VEquation>& prem) {
    const VEquation& c = n.conclusion;
    switch (n.rule) {
      case ProofRule::Refl:
        require(prem.empty() && alpha_eq(c.lhs, c.rhs), n, "sides differ");
        return spec_.top();
      case ProofRule::Trans:
        require(prem.size() == 2, n, "needs two premises");
        require(prem[0].context == c.context && prem[1].context == c.context, n, "context changes");
        require(alpha_eq(prem[0].rhs, prem[1].lhs), n, "premises do not chain");
        require(alpha_eq(prem[0].lhs, c.lhs) && alpha_eq(prem[1].rhs, c.rhs), n, "conclusion does not match");
        return tensor(prem[0].label, prem[1].label);
      case ProofRule::Weak:
        require(prem.size() == 1 && same_sides(prem[0], c), n, "premise does not match");
        require(leq(c.label, prem[0].label), n, "label is not below the premise's");
        return c.label;
      case ProofRule::Join: {
        std::vector<QuantaleValue> labels;
        for (const auto& p : prem) {
          require(same_sides(p, c), n, "premise does not match");
          labels.push_back(p.label);
        }
        return join(spec_, labels);
      }
      case ProofRule::Arch: misapplied(n, "the premise ranges over all approximants and cannot be replayed");
      case ProofRule::Perm: {
        require(prem.size() == 1 && alpha_eq(prem[0].lhs, c.lhs) && alpha_eq(prem[0].rhs, c.rhs), n,
                "premise does not match");
        auto a = prem[0].context.entries();
        auto b = c.context.entries();
        auto by_name = [](const Context::Entry& x, const Context::Entry& y) { return x.first < y.first; };
        std::sort(a.begin(), a.end(), by_name);
        std::sort(b.begin(), b.end(), by_name);
        require(a == b, n, "not a permutation of the premise's context");
        return prem[0].label;
      }
      case ProofRule::Symmetry:
        require(t_.symmetric, n, "the theory is not symmetric");
        require(prem.size() == 1 && prem[0].context == c.context && alpha_eq(prem[0].lhs, c.rhs) &&
                    alpha_eq(prem[0].rhs, c.lhs),
                n, "premise is not the mirror image");
        return prem[0].label;
      case ProofRule::Axiom: {
        require(prem.empty() && n.axiom_index >= 0 && static_cast<std::size_t>(n.axiom_index) < t_.axioms.size(), n,
                "no such axiom");
        const VEquation& a = t_.axioms[n.axiom_index].equation;
        require(same_sides(a, c), n, "does not match axiom " + std::to_string(n.axiom_index));
        return a.label;
      }
      case ProofRule::Fig3Rewrite: {
        require(prem.empty() && n.rewrite.has_value(), n, "missing rewrite detail");
        const Term& from = n.reversed ? c.rhs : c.lhs;
        const Term& to = n.reversed ? c.lhs : c.rhs;
        auto r = apply_rewrite(from, n.rewrite->rule, n.rewrite->position);
        require(r && alpha_eq(*r, to), n, fig3_name(n.rewrite->rule) + " does not produce the other side");
        return spec_.top();
      }
      case ProofRule::Subst: return subst(n, prem);
      default: return congruence(n, prem);
    }
  }

  QuantaleValue subst(const ProofTrace& n, const std::vector<VEquation>& prem) {
    const VEquation& c = n.conclusion;
    require(!prem.empty() && prem.size() == n.subst_vars.size() + 1, n, "one premise per substituted variable");
    const VEquation& base = prem[0];
    Sigma left, right;
    QuantaleValue label = base.label;
    std::map<std::string, Context> parts;
    for (std::size_t i = 0; i < n.subst_vars.size(); ++i) {
      const std::string& x = n.subst_vars[i];
      auto a = base.context.type_of(x);
      require(a && *a == prem[i + 1].type, n, "'" + x + "' is not in the context at the premise's type");
      require(!left.count(x), n, "'" + x + "' substituted twice");
      left.emplace(x, prem[i + 1].lhs);
      right.emplace(x, prem[i + 1].rhs);
      parts.emplace(x, prem[i + 1].context);
      label = tensor(label, prem[i + 1].label);
    }
    std::vector<Context::Entry> entries;
    for (const auto& e : base.context.entries()) {
      auto it = parts.find(e.first);
      if (it == parts.end()) {
        entries.push_back(e);
      } else {
        entries.insert(entries.end(), it->second.entries().begin(), it->second.entries().end());
      }
    }
    try {
      require(Context(entries) == c.context, n, "context is not the premise's with the substituted parts");
    } catch (const TypeError&) {
      misapplied(n, "substituted contexts overlap");
    }
    require(alpha_eq(substitute_all(base.lhs, left), c.lhs), n, "lhs is not the substitution instance");
    require(alpha_eq(substitute_all(base.rhs, right), c.rhs), n, "rhs is not the substitution instance");
    return label;
  }

  QuantaleValue congruence(const ProofTrace& n, const std::vector<VEquation>& prem) {
    const VEquation& c = n.conclusion;
    Kind k = cong_kind(n.rule);
    const Term& l = c.lhs;
    const Term& r = c.rhs;
    require(l.kind() == k && r.kind() == k, n, "sides are not built with the rule's constructor");
    require(prem.size() == l.children().size() && prem.size() == r.children().size(), n, "premise count");
    if (k == Kind::Op) require(l.name() == r.name(), n, "different operations");
    if (k == Kind::Lam) require(l.name() == r.name() && l.binder_type() == r.binder_type(), n, "binders differ");
    if (k == Kind::TensorLet) require(l.name() == r.name() && l.name2() == r.name2(), n, "binders differ");
    QuantaleValue label = spec_.top();
    for (std::size_t i = 0; i < prem.size(); ++i) {
      require(alpha_eq(l.child(i), prem[i].lhs) && alpha_eq(r.child(i), prem[i].rhs), n,
              "component " + std::to_string(i) + " does not match its premise");
      auto binders = l.binders_at(i);
      Context expected = c.context.restrict_to(minus(l.child(i).free_vars(), binders));
      if (k == Kind::Lam) expected = expected.extended(l.name(), l.binder_type());
      if (k == Kind::TensorLet && i == 1) {
        const Type& s = prem[0].type;
        require(s.kind() == Type::Kind::Tensor, n, "scrutinee is not a tensor");
        expected = expected.extended(l.name(), s.left()).extended(l.name2(), s.right());
      }
      require(prem[i].context == expected, n, "premise " + std::to_string(i) + " has the wrong context");
      label = tensor(label, prem[i].label);
    }
    return label;
  }

  const Theory& t_;
  QuantaleSpec spec_;
};

void print(const ProofTrace& t, int indent, std::ostringstream& out) {
  const auto& c = t.conclusion;
  out << std::string(indent * 2, ' ') << rule_name(t.rule);
  if (t.rule == ProofRule::Fig3Rewrite && t.rewrite) {
    out << " [" << fig3_name(t.rewrite->rule) << " at ";
    if (t.rewrite->position.empty()) out << "root";
    for (std::size_t i = 0; i < t.rewrite->position.size(); ++i) out << (i ? "." : "") << t.rewrite->position[i];
    out << (t.reversed ? ", right to left" : "") << "]";
  }
  if (t.rule == ProofRule::Axiom) out << " #" << t.axiom_index;
  out << "  " << c.context.to_string() << " |- " << print_term(c.lhs) << " ={" << c.label.to_string() << "} "
      << print_term(c.rhs) << "\n";
  for (const auto& p : t.premises) print(*p, indent + 1, out);
}

}  // namespace

std::string trace_to_string(const ProofTrace& t) {
  std::ostringstream out;
  print(t, 0, out);
  return out.str();
}

std::size_t trace_size(const ProofTrace& t) {
  std::size_t n = 1;
  for (const auto& p : t.premises) n += trace_size(*p);
  return n;
}

std::size_t trace_height(const ProofTrace& t) {
  std::size_t h = 0;
  for (const auto& p : t.premises) h = std::max(h, trace_height(*p));
  return h + 1;
}

VEquation replay(const Theory& t, const ProofTrace& trace) { return Replayer(t).run(trace); }

namespace {

struct Prepared {
  NormalForm nv;
  NormalForm nw;
  Type type;
};

Prepared prepare(const Theory& t, const Context& ctx, const Term& v, const Term& w, const SearchBudget& budget) {
  Type a = infer(t.signature, ctx, v).type;
  Type b = infer(t.signature, ctx, w).type;
  if (!(a == b)) {
    throw TypeError(TypeErrorKind::TypeMismatch,
                    "sides have different types: " + a.to_string() + " and " + b.to_string());
  }
  return {normalize(v, budget.max_rewrite_steps), normalize(w, budget.max_rewrite_steps), a};
}

TracePtr assemble(const Theory& t, const Context& ctx, const Term& v, const Term& w, const Prepared& p,
                  const TracePtr& middle) {
  TracePtr left = chain(ctx, p.type, v, p.nv.steps, false, t.quantale);
  TracePtr right = chain(ctx, p.type, w, p.nw.steps, true, t.quantale);
  return trans(trans(left, middle), right);
}

TracePtr bottom_proof(const Theory& t, const Context& ctx, const Term& v, const Term& w, const Type& type) {
  return make({ctx, v, w, type, t.quantale.bottom()}, ProofRule::Join);
}

}  // namespace

struct Prover::Index {
  SearchIndex search;
};

Prover::Prover(Theory t, std::size_t max_rewrite_steps)
    : theory_(std::make_shared<const Theory>(std::move(t))),
      index_(std::make_shared<const Index>(Index{build_index(*theory_, max_rewrite_steps)})) {}

std::size_t Prover::instance_count() const { return index_->search.instances.size(); }

BoundResult Prover::best_bound(const Context& ctx, const Term& v, const Term& w, const SearchBudget& budget,
                               JoinMode mode) const {
  const Theory& t = *theory_;
  Prepared p = prepare(t, ctx, v, w, budget);
  Engine e(t, index_->search, budget, mode);
  auto found = e.run(ctx, p.nv.term, p.nw.term, p.type, std::nullopt);
  BoundResult r{t.quantale.bottom(), nullptr, e.nodes(), e.truncated()};
  if (found) {
    r.label = found->label;
    r.trace = assemble(t, ctx, v, w, p, found->trace);
  } else {
    r.trace = bottom_proof(t, ctx, v, w, p.type);
  }
  return r;
}

CheckResult Prover::check_eq(const VEquation& goal, const SearchBudget& budget, JoinMode mode) const {
  const Theory& t = *theory_;
  if (!(goal.label.spec() == t.quantale)) throw SpecMismatch("goal label from another quantale");
  Prepared p = prepare(t, goal.context, goal.lhs, goal.rhs, budget);
  if (!(p.type == goal.type)) {
    throw TypeError(TypeErrorKind::TypeMismatch, "goal sides have type " + p.type.to_string() + ", not " +
                                                     goal.type.to_string());
  }
  if (goal.label.is_bottom()) {
    return {true, bottom_proof(t, goal.context, goal.lhs, goal.rhs, p.type), 0};
  }
  Engine e(t, index_->search, budget, mode);
  auto found = e.run(goal.context, p.nv.term, p.nw.term, p.type, goal.label);
  CheckResult r{false, nullptr, e.nodes()};
  if (!found || !leq(goal.label, found->label)) return r;
  TracePtr proof = assemble(t, goal.context, goal.lhs, goal.rhs, p, found->trace);
  if (!(proof->conclusion.label == goal.label)) {
    proof = make({goal.context, goal.lhs, goal.rhs, p.type, goal.label}, ProofRule::Weak, {proof});
  }
  r.proved = true;
  r.trace = proof;
  return r;
}

bool Prover::arch_closure_check(const Context& ctx, const Term& v, const Term& w, const QuantaleValue& q,
                                const SearchBudget& budget) const {
  Type type = infer(theory_->signature, ctx, v).type;
  for (const auto& r : approximants(q, budget.arch_approximants)) {
    if (!check_eq(VEquation{ctx, v, w, type, r}, budget).proved) return false;
  }
  return true;
}

BoundResult best_bound(const Theory& t, const Context& ctx, const Term& v, const Term& w, const SearchBudget& budget,
                       JoinMode mode) {
  return Prover(t, budget.max_rewrite_steps).best_bound(ctx, v, w, budget, mode);
}

CheckResult check_eq(const Theory& t, const VEquation& goal, const SearchBudget& budget, JoinMode mode) {
  return Prover(t, budget.max_rewrite_steps).check_eq(goal, budget, mode);
}

bool arch_closure_check(const Theory& t, const Context& ctx, const Term& v, const Term& w, const QuantaleValue& q,
                        const SearchBudget& budget) {
  return Prover(t, budget.max_rewrite_steps).arch_closure_check(ctx, v, w, q, budget);
}

}  // namespace vlam
