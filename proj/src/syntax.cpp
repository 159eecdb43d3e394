#include "vlam/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "vlam/error.hpp"

namespace vlam {

// ---------------------------------------------------------------------------
// Types

Type Type::ground(std::string name) {
  return Type(std::make_shared<const Node>(Node{Kind::Ground, std::move(name), nullptr, nullptr}));
}

Type Type::unit() {
  static const Type u(std::make_shared<const Node>(Node{Kind::Unit, "I", nullptr, nullptr}));
  return u;
}

Type Type::tensor(Type left, Type right) {
  return Type(std::make_shared<const Node>(
      Node{Kind::Tensor, "", std::make_unique<Type>(std::move(left)), std::make_unique<Type>(std::move(right))}));
}

Type Type::lolli(Type domain, Type codomain) {
  return Type(std::make_shared<const Node>(
      Node{Kind::Lolli, "", std::make_unique<Type>(std::move(domain)), std::make_unique<Type>(std::move(codomain))}));
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Type::Kind::Ground: return a.name() == b.name();
    case Type::Kind::Unit: return true;
    default: return a.left() == b.left() && a.right() == b.right();
  }
}

std::string Type::to_string() const {
  switch (kind()) {
    case Kind::Ground: return name();
    case Kind::Unit: return "I";
    case Kind::Tensor: {
      std::string l = left().to_string();
      std::string r = right().to_string();
      if (left().kind() == Kind::Lolli) l = "(" + l + ")";
      if (right().kind() == Kind::Lolli || right().kind() == Kind::Tensor) r = "(" + r + ")";
      return l + " * " + r;
    }
    case Kind::Lolli: {
      std::string l = left().to_string();
      if (left().kind() == Kind::Lolli) l = "(" + l + ")";
      return l + " -o " + right().to_string();
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Terms

namespace {

std::vector<std::string> merge_sorted(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::string> remove_names(std::vector<std::string> v, const std::vector<std::string>& names) {
  std::erase_if(v, [&](const std::string& s) { return std::find(names.begin(), names.end(), s) != names.end(); });
  return v;
}

}  // namespace

Term Term::make(Kind kind, std::string name, std::string name2, std::optional<Type> type, std::vector<Term> children) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->name = std::move(name);
  node->name2 = std::move(name2);
  if (type) node->type = std::make_unique<Type>(std::move(*type));
  node->children = std::move(children);
  std::size_t size = 1;
  for (const auto& c : node->children) size += c.size();
  node->size = size;

  switch (kind) {
    case Kind::Var: node->free = {node->name}; break;
    case Kind::Star: break;
    case Kind::Lam: node->free = remove_names(node->children[0].free_vars(), {node->name}); break;
    case Kind::TensorLet:
      node->free = merge_sorted(node->children[0].free_vars(),
                                remove_names(node->children[1].free_vars(), {node->name, node->name2}));
      break;
    default:
      for (const auto& c : node->children) node->free = merge_sorted(node->free, c.free_vars());
      break;
  }
  return Term(std::move(node));
}

Term Term::var(std::string name) { return make(Kind::Var, std::move(name), "", std::nullopt, {}); }
Term Term::op(std::string symbol, std::vector<Term> args) {
  return make(Kind::Op, std::move(symbol), "", std::nullopt, std::move(args));
}
Term Term::star() {
  static const Term s = make(Kind::Star, "", "", std::nullopt, {});
  return s;
}
Term Term::unit_let(Term scrutinee, Term body) {
  return make(Kind::UnitLet, "", "", std::nullopt, {std::move(scrutinee), std::move(body)});
}
Term Term::tensor(Term left, Term right) {
  return make(Kind::Tensor, "", "", std::nullopt, {std::move(left), std::move(right)});
}
Term Term::tensor_let(Term scrutinee, std::string x, std::string y, Term body) {
  if (x == y) throw SyntaxError("pattern binds '" + x + "' twice", 0, 0);
  return make(Kind::TensorLet, std::move(x), std::move(y), std::nullopt, {std::move(scrutinee), std::move(body)});
}
Term Term::lam(std::string x, Type type, Term body) {
  return make(Kind::Lam, std::move(x), "", std::move(type), {std::move(body)});
}
Term Term::app(Term fun, Term arg) { return make(Kind::App, "", "", std::nullopt, {std::move(fun), std::move(arg)}); }

bool Term::has_free(const std::string& x) const { return std::binary_search(free_vars().begin(), free_vars().end(), x); }

std::vector<std::string> Term::binders_at(std::size_t slot) const {
  if (kind() == Kind::Lam && slot == 0) return {name()};
  if (kind() == Kind::TensorLet && slot == 1) return {name(), name2()};
  return {};
}

Term Term::with_children(std::vector<Term> children) const {
  if (children.size() != node_->children.size()) throw Error("with_children: wrong number of children");
  bool same = true;
  for (std::size_t i = 0; i < children.size(); ++i) same = same && children[i].same_node(node_->children[i]);
  if (same) return *this;
  std::optional<Type> type;
  if (node_->type) type = *node_->type;
  return make(kind(), name(), name2(), std::move(type), std::move(children));
}

// ---------------------------------------------------------------------------
// Contexts and signatures

Context::Context(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = i + 1; j < entries_.size(); ++j) {
      if (entries_[i].first == entries_[j].first) {
        throw TypeError(TypeErrorKind::BadContext, "variable '" + entries_[i].first + "' occurs twice in the context");
      }
    }
  }
}

bool Context::contains(const std::string& x) const { return position(x).has_value(); }

std::optional<Type> Context::type_of(const std::string& x) const {
  if (auto p = position(x)) return entries_[*p].second;
  return std::nullopt;
}

std::optional<std::size_t> Context::position(const std::string& x) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first == x) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Context::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

Context Context::restrict_to(const std::vector<std::string>& keep) const {
  Context out;
  for (const auto& e : entries_) {
    if (std::find(keep.begin(), keep.end(), e.first) != keep.end()) out.entries_.push_back(e);
  }
  return out;
}

Context Context::without(const std::string& x) const {
  Context out;
  for (const auto& e : entries_) {
    if (e.first != x) out.entries_.push_back(e);
  }
  return out;
}

Context Context::extended(const std::string& x, const Type& type) const {
  auto e = entries_;
  e.emplace_back(x, type);
  return Context(std::move(e));
}

Context Context::concat(const Context& other) const {
  auto e = entries_;
  e.insert(e.end(), other.entries_.begin(), other.entries_.end());
  return Context(std::move(e));
}

Context Context::exchanged(std::size_t i) const {
  if (i + 1 >= entries_.size()) {
    throw DerivationError("exchange position " + std::to_string(i) + " out of range for a context of size " +
                          std::to_string(entries_.size()));
  }
  Context out = *this;
  std::swap(out.entries_[i], out.entries_[i + 1]);
  return out;
}

std::string Context::to_string() const {
  if (entries_.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += ", ";
    out += entries_[i].first + ":" + entries_[i].second.to_string();
  }
  return out;
}

bool Signature::has_ground(const std::string& name) const {
  return std::find(ground_types.begin(), ground_types.end(), name) != ground_types.end();
}

const OpSig* Signature::find(const std::string& symbol) const {
  auto it = operations.find(symbol);
  return it == operations.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Binding operations

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string stem = base;
  if (auto q = stem.rfind('\''); q != std::string::npos && q + 1 < stem.size() &&
                                 std::all_of(stem.begin() + static_cast<long>(q) + 1, stem.end(),
                                             [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    stem.resize(q);
  }
  for (std::size_t n = 1;; ++n) {
    std::string candidate = stem + "'" + std::to_string(n);
    if (!avoid.count(candidate)) return candidate;
  }
}

Term substitute_all(const Term& v, const std::map<std::string, Term>& sigma) {
  if (sigma.empty()) return v;
  bool relevant = false;
  for (const auto& [x, _] : sigma) relevant = relevant || v.has_free(x);
  if (!relevant) return v;

  switch (v.kind()) {
    case Term::Kind::Var: return sigma.at(v.name());
    case Term::Kind::Lam:
    case Term::Kind::TensorLet: {
      std::vector<Term> children = v.children();
      std::string x = v.name(), y = v.name2();
      for (std::size_t slot = 0; slot < children.size(); ++slot) {
        auto binders = v.binders_at(slot);
        if (binders.empty()) {
          children[slot] = substitute_all(children[slot], sigma);
          continue;
        }
        std::map<std::string, Term> inner;
        for (const auto& [k, t] : sigma) {
          if (std::find(binders.begin(), binders.end(), k) == binders.end() && children[slot].has_free(k)) {
            inner.emplace(k, t);
          }
        }
        if (inner.empty()) continue;
        std::set<std::string> range_free;
        for (const auto& [k, t] : inner) range_free.insert(t.free_vars().begin(), t.free_vars().end());
        std::set<std::string> avoid = range_free;
        avoid.insert(children[slot].free_vars().begin(), children[slot].free_vars().end());
        for (const auto& [k, _] : inner) avoid.insert(k);
        for (const auto& b : binders) avoid.insert(b);
        for (auto& b : binders) {
          if (!range_free.count(b)) continue;
          std::string fresh = fresh_name(b, avoid);
          avoid.insert(fresh);
          inner.emplace(b, Term::var(fresh));
          (b == x ? x : y) = fresh;
        }
        children[slot] = substitute_all(children[slot], inner);
      }
      if (v.kind() == Term::Kind::Lam) return Term::lam(x, v.binder_type(), children[0]);
      return Term::tensor_let(children[0], x, y, children[1]);
    }
    default: {
      std::vector<Term> children;
      children.reserve(v.children().size());
      for (const auto& c : v.children()) children.push_back(substitute_all(c, sigma));
      return v.with_children(std::move(children));
    }
  }
}

Term substitute(const Term& v, const std::string& x, const Term& w) { return substitute_all(v, {{x, w}}); }

namespace {

// Writes a prefix form in which bound variables are replaced by their binding depth.
void write_key(const Term& t, std::vector<std::string>& env, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      for (std::size_t i = env.size(); i-- > 0;) {
        if (env[i] == t.name()) {
          out += "#" + std::to_string(i) + " ";
          return;
        }
      }
      out += "$" + t.name() + " ";
      return;
    }
    case Term::Kind::Star: out += "* "; return;
    case Term::Kind::Op: out += "op:" + t.name() + "/" + std::to_string(t.children().size()) + " "; break;
    case Term::Kind::UnitLet: out += "ul "; break;
    case Term::Kind::Tensor: out += "t "; break;
    case Term::Kind::App: out += "a "; break;
    case Term::Kind::Lam:
      out += "l[" + t.binder_type().to_string() + "] ";
      env.push_back(t.name());
      write_key(t.child(0), env, out);
      env.pop_back();
      return;
    case Term::Kind::TensorLet:
      out += "pm ";
      write_key(t.child(0), env, out);
      env.push_back(t.name());
      env.push_back(t.name2());
      write_key(t.child(1), env, out);
      env.pop_back();
      env.pop_back();
      return;
  }
  for (const auto& c : t.children()) write_key(c, env, out);
}

}  // namespace

std::string canonical_key(const Term& t) {
  std::vector<std::string> env;
  std::string out;
  write_key(t, env, out);
  return out;
}

bool alpha_eq(const Term& a, const Term& b) {
  if (a.same_node(b)) return true;
  if (a.size() != b.size() || a.free_vars() != b.free_vars()) return false;
  return canonical_key(a) == canonical_key(b);
}

std::size_t count_free(const Term& t, const std::string& x) {
  if (!t.has_free(x)) return 0;
  if (t.kind() == Term::Kind::Var) return 1;
  std::size_t n = 0;
  for (std::size_t slot = 0; slot < t.children().size(); ++slot) {
    auto b = t.binders_at(slot);
    if (std::find(b.begin(), b.end(), x) == b.end()) n += count_free(t.child(slot), x);
  }
  return n;
}

std::vector<std::string> bound_vars(const Term& t) {
  std::set<std::string> out;
  std::function<void(const Term&)> go = [&](const Term& u) {
    for (std::size_t slot = 0; slot < u.children().size(); ++slot) {
      for (auto& b : u.binders_at(slot)) out.insert(b);
      go(u.child(slot));
    }
  };
  go(t);
  return {out.begin(), out.end()};
}

std::optional<Term> subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::size_t slot : p) {
    if (slot >= cur->children().size()) return std::nullopt;
    cur = &cur->child(slot);
  }
  return *cur;
}

namespace {

Term replace_from(const Term& t, const Position& p, std::size_t depth, const Term& replacement) {
  if (depth == p.size()) return replacement;
  if (p[depth] >= t.children().size()) throw Error("replace_at: position out of range");
  std::vector<Term> children = t.children();
  children[p[depth]] = replace_from(children[p[depth]], p, depth + 1, replacement);
  return t.with_children(std::move(children));
}

}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& replacement) { return replace_from(t, p, 0, replacement); }

// ---------------------------------------------------------------------------
// Shuffles

bool is_shuffle(const Context& candidate, const std::vector<Context>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  if (total != candidate.size()) return false;
  // Each candidate entry must be the next unconsumed entry of some part. Parts
  // have pairwise distinct variables when the candidate is duplicate-free, so
  // the owning part is determined by the name.
  std::vector<std::size_t> next(parts.size(), 0);
  for (const auto& entry : candidate.entries()) {
    bool placed = false;
    for (std::size_t i = 0; i < parts.size() && !placed; ++i) {
      if (next[i] < parts[i].size() && parts[i][next[i]] == entry) {
        ++next[i];
        placed = true;
      }
    }
    if (!placed) return false;
  }
  return true;
}

std::vector<Context> enumerate_shuffles(const std::vector<Context>& parts, std::size_t limit) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  if (total > limit) {
    throw LimitExceeded("shuffle enumeration over " + std::to_string(total) + " variables exceeds the limit of " +
                        std::to_string(limit));
  }
  std::vector<Context> out;
  std::vector<std::size_t> next(parts.size(), 0);
  std::vector<Context::Entry> current;
  std::function<void()> go = [&]() {
    if (current.size() == total) {
      out.emplace_back(current);
      return;
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (next[i] == parts[i].size()) continue;
      current.push_back(parts[i][next[i]]);
      ++next[i];
      go();
      --next[i];
      current.pop_back();
    }
  };
  go();
  return out;
}

}  // namespace vlam
