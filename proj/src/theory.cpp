#include "vlam/theory.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "vlam/error.hpp"
#include "vlam/typecheck.hpp"
#include "schema.hpp"

namespace vlam {

std::string to_string(const VEquation& e) {
  return e.context.to_string() + " |- " + print_term(e.lhs) + " ={" + e.label.to_string() + "} " + print_term(e.rhs) +
         " : " + e.type.to_string();
}

ParseOptions Theory::parse_options() const {
  ParseOptions o;
  o.signature = &signature;
  o.definitions = &definitions;
  return o;
}

using namespace detail;

namespace {

// Splits at commas at bracket depth 0.
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(' || s[i] == '[' || s[i] == '{') ++depth;
    if (s[i] == ')' || s[i] == ']' || s[i] == '}') --depth;
    if (depth == 0 && s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

enum class Relation { Labelled, Leq, Eq, Pair };

struct Sides {
  std::string lhs;
  std::string rhs;
  Relation rel;
  std::string label;
};

// Finds the relation symbol at depth 0: ={q}, <=, ~ or =.
std::optional<Sides> split_relation(const std::string& s) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (depth != 0) continue;
    if (c == '=' && i + 1 < s.size() && s[i + 1] == '{') {
      auto close = s.find('}', i);
      if (close == std::string::npos) return std::nullopt;
      return Sides{trim(s.substr(0, i)), trim(s.substr(close + 1)), Relation::Labelled, s.substr(i + 2, close - i - 2)};
    }
    if (c == '<' && i + 1 < s.size() && s[i + 1] == '=') {
      return Sides{trim(s.substr(0, i)), trim(s.substr(i + 2)), Relation::Leq, ""};
    }
    if (c == '~') return Sides{trim(s.substr(0, i)), trim(s.substr(i + 1)), Relation::Pair, ""};
    if (c == '=') return Sides{trim(s.substr(0, i)), trim(s.substr(i + 1)), Relation::Eq, ""};
  }
  return std::nullopt;
}

TheoryError from_type_error(const TypeError& e, int line) {
  switch (e.kind()) {
    case TypeErrorKind::DuplicateUse:
    case TypeErrorKind::UnusedVariable: return TheoryError(TheoryErrorKind::Linearity, line, e.what());
    case TypeErrorKind::UnknownSymbol: return TheoryError(TheoryErrorKind::UnknownSymbol, line, e.what());
    default: return TheoryError(TheoryErrorKind::Sort, line, e.what());
  }
}

class Loader {
 public:
  explicit Loader(QuantaleSpec q) { t_.quantale = q; }

  Theory run(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    std::string pending;
    int pending_line = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
      std::string line = trim(raw);
      if (pending.empty()) pending_line = line_no;
      if (!line.empty() && line.back() == '\\') {
        line.pop_back();
        pending += line + " ";
        continue;
      }
      pending += line;
      if (!trim(pending).empty()) directive(trim(pending), pending_line);
      pending.clear();
    }
    if (!trim(pending).empty()) directive(trim(pending), pending_line);
    return std::move(t_);
  }

 private:
  void directive(const std::string& line, int n) {
    std::size_t sp = 0;
    while (sp < line.size() && !std::isspace(static_cast<unsigned char>(line[sp]))) ++sp;
    std::string head = line.substr(0, sp);
    std::string rest = trim(line.substr(sp));
    if (head == "quantale") {
      if (seen_axiom_) parse_error(n, "'quantale' must precede the axioms");
      try {
        t_.quantale = QuantaleSpec::from_name(rest);
      } catch (const Error& e) {
        parse_error(n, e.what());
      }
    } else if (head == "symmetric") {
      if (rest != "true" && rest != "false") parse_error(n, "'symmetric' expects true or false");
      t_.symmetric = rest == "true";
    } else if (head == "param") {
      auto eq = rest.find('=');
      if (eq == std::string::npos) parse_error(n, "'param' expects NAME = VALUE");
      std::string name = trim(rest.substr(0, eq));
      if (!is_identifier(name)) parse_error(n, "bad parameter name '" + name + "'");
      t_.params[name] = eval_int(trim(rest.substr(eq + 1)), t_.params, n);
    } else if (head == "ground") {
      std::istringstream words(rest);
      std::string g;
      bool any = false;
      while (words >> g) {
        if (!is_identifier(g) || g == "I") parse_error(n, "bad ground type name '" + g + "'");
        if (!t_.signature.has_ground(g)) t_.signature.ground_types.push_back(g);
        any = true;
      }
      if (!any) parse_error(n, "'ground' expects at least one name");
    } else if (head == "op") {
      op(rest, n);
    } else if (head == "def") {
      def(rest, n);
    } else if (head == "axiom") {
      seen_axiom_ = true;
      axiom(rest, n);
    } else {
      parse_error(n, "unknown directive '" + head + "'");
    }
  }

  Type parse_sort(const std::string& s, int n) {
    ParseOptions o;
    o.signature = &t_.signature;
    try {
      return parse_type(s, o);
    } catch (const SyntaxError& e) {
      throw TheoryError(TheoryErrorKind::Sort, n, std::string("in sort '") + s + "': " + e.what());
    }
  }

  void op(const std::string& rest, int n) {
    Clause clause;
    std::string body = split_clause(rest, clause, n);
    auto colon = body.find(':');
    if (colon == std::string::npos) parse_error(n, "'op' expects NAME : A1, ..., An -> A");
    std::string name = trim(body.substr(0, colon));
    std::string sorts = body.substr(colon + 1);
    auto arrow = sorts.rfind("->");
    if (arrow == std::string::npos) parse_error(n, "'op' expects NAME : A1, ..., An -> A");
    std::string args = trim(sorts.substr(0, arrow));
    std::string result = trim(sorts.substr(arrow + 2));
    if (args.empty()) parse_error(n, "operation '" + name + "' needs at least one argument sort");
    auto vars = clause_vars(clause);
    auto declare = [&](const std::map<std::string, long>& env) {
      std::string sym = instantiate(name, env, vars, n);
      if (!is_identifier(sym)) parse_error(n, "bad operation name '" + sym + "'");
      if (t_.signature.operations.count(sym)) {
        throw TheoryError(TheoryErrorKind::DuplicateOperation, n, "operation '" + sym + "' is declared twice");
      }
      OpSig sig{{}, parse_sort(instantiate(result, env, vars, n), n)};
      for (const auto& a : split_top(instantiate(args, env, vars, n), ',')) sig.args.push_back(parse_sort(a, n));
      t_.signature.operations.emplace(sym, std::move(sig));
    };
    if (clause.schematic() || !clause.condition.empty()) {
      for_each_instance(clause, t_.params, n, declare);
    } else {
      declare(t_.params);
    }
  }

  void def(const std::string& rest, int n) {
    auto eq = rest.find('=');
    if (eq == std::string::npos) parse_error(n, "'def' expects NAME = TERM");
    std::string name = trim(rest.substr(0, eq));
    if (!is_identifier(name)) parse_error(n, "bad definition name '" + name + "'");
    if (t_.signature.find(name)) parse_error(n, "definition '" + name + "' shadows an operation");
    Term body = parse_in_line(trim(rest.substr(eq + 1)), n);
    if (!body.free_vars().empty()) parse_error(n, "definition '" + name + "' has free variable '" + body.free_vars()[0] + "'");
    try {
      infer(t_.signature, Context(), body);
    } catch (const TypeError& e) {
      throw from_type_error(e, n);
    }
    t_.definitions.insert_or_assign(name, body);
  }

  Term parse_in_line(const std::string& text, int n) {
    try {
      return parse_term(text, t_.parse_options());
    } catch (const UnknownSymbolError&) {
      throw;
    } catch (const SyntaxError& e) {
      parse_error(n, std::string("in '") + text + "': " + e.what());
    }
  }

  void axiom(const std::string& rest, int n) {
    std::string ctx_text;
    std::string body = rest;
    if (!body.empty() && body[0] == '[') {
      auto close = body.find(']');
      if (close == std::string::npos) parse_error(n, "unterminated '[' in axiom context");
      ctx_text = body.substr(1, close - 1);
      body = body.substr(close + 1);
    }
    Clause clause;
    body = split_clause(body, clause, n);
    auto sides = split_relation(body);
    if (!sides || sides->rel == Relation::Pair) parse_error(n, "axiom expects LHS ={q} RHS, LHS <= RHS or LHS = RHS");
    auto vars = clause_vars(clause);
    const bool schematic = clause.schematic();

    auto add = [&](const std::map<std::string, long>& env) {
      Context ctx;
      Term lhs = Term::star(), rhs = Term::star();
      try {
        ParseOptions o = t_.parse_options();
        std::string c = trim(instantiate(ctx_text, env, vars, n));
        ctx = c.empty() ? Context() : parse_context(c, o);
        lhs = parse_in_line(instantiate(sides->lhs, env, vars, n), n);
        rhs = parse_in_line(instantiate(sides->rhs, env, vars, n), n);
      } catch (const UnknownSymbolError& e) {
        // Schema instances naming an undeclared operation are outside the finite signature.
        if (schematic) return;
        throw TheoryError(TheoryErrorKind::UnknownSymbol, n, e.what());
      } catch (const SyntaxError& e) {
        parse_error(n, e.what());
      } catch (const TypeError& e) {
        throw from_type_error(e, n);
      }
      try {
        if (sides->rel == Relation::Labelled) {
          QuantaleValue q = eval_label(t_.quantale, instantiate(sides->label, env, vars, n), env);
          push(make_equation(t_, ctx, lhs, rhs, q), n);
        } else if (sides->rel == Relation::Leq) {
          push(make_equation(t_, ctx, lhs, rhs, t_.quantale.top()), n);
        } else {
          auto [a, b] = classical_equation(t_, ctx, lhs, rhs);
          push(a, n);
          push(b, n);
        }
      } catch (const TypeError& e) {
        throw from_type_error(e, n);
      } catch (const TheoryError& e) {
        if (e.line() != 0) throw;
        throw TheoryError(e.kind(), n, e.what());
      }
    };
    if (schematic || !clause.condition.empty()) {
      for_each_instance(clause, t_.params, n, add);
    } else {
      add(t_.params);
    }
  }

  void push(VEquation e, int n) { t_.axioms.push_back({std::move(e), n}); }

  Theory t_;
  bool seen_axiom_ = false;
};

}  // namespace

QuantaleValue eval_label(QuantaleSpec spec, std::string_view text, const std::map<std::string, long>& vars) {
  std::string t = trim(text);
  if (t == "inf" || t == "∞" || t == "top" || t == "bot" || t == "⊤" || t == "⊥") {
    if (t == "top" || t == "⊤") return spec.top();
    if (t == "bot" || t == "⊥") return spec.bottom();
    if (!spec.reversed()) throw TheoryError(TheoryErrorKind::NonBasisLabel, 0, "label 'inf' is not in the " + spec.name() + " quantale");
    return spec.infinity();
  }
  auto r = Expr(t, vars).evaluate();
  if (!r) throw TheoryError(TheoryErrorKind::NonBasisLabel, 0, "label '" + t + "' is not an exact basis element");
  try {
    return spec.value(*r);
  } catch (const CarrierError& e) {
    throw TheoryError(TheoryErrorKind::NonBasisLabel, 0, e.what());
  }
}

VEquation make_equation(const Theory& t, const Context& ctx, const Term& v, const Term& w, const QuantaleValue& q) {
  if (!(q.spec() == t.quantale)) throw SpecMismatch("label from the " + q.spec().name() + " quantale in a " + t.quantale.name() + " theory");
  Derivation dv = infer(t.signature, ctx, v);
  Derivation dw = infer(t.signature, ctx, w);
  if (!(dv.type == dw.type)) {
    throw TypeError(TypeErrorKind::TypeMismatch, "sides have different types: " + dv.type.to_string() + " and " +
                                                     dw.type.to_string());
  }
  return {ctx, dv.term, dw.term, dv.type, q};
}

std::pair<VEquation, VEquation> classical_equation(const Theory& t, const Context& ctx, const Term& v, const Term& w) {
  VEquation a = make_equation(t, ctx, v, w, t.quantale.top());
  VEquation b{a.context, a.rhs, a.lhs, a.type, a.label};
  return {a, b};
}

Theory load_theory(std::string_view text) { return Loader(QuantaleSpec::lawvere()).run(text); }

Theory load_theory(std::string_view text, QuantaleSpec default_quantale) { return Loader(default_quantale).run(text); }

Theory load_theory_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read theory file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_theory(buf.str());
}

std::string save_theory(const Theory& t) {
  std::ostringstream out;
  out << "quantale " << t.quantale.name() << "\n";
  out << "symmetric " << (t.symmetric ? "true" : "false") << "\n";
  for (const auto& [k, v] : t.params) out << "param " << k << " = " << v << "\n";
  for (const auto& g : t.signature.ground_types) out << "ground " << g << "\n";
  for (const auto& [name, sig] : t.signature.operations) {
    out << "op " << name << " :";
    for (std::size_t i = 0; i < sig.args.size(); ++i) out << (i ? ", " : " ") << sig.args[i].to_string();
    out << " -> " << sig.result.to_string() << "\n";
  }
  for (const auto& [name, body] : t.definitions) out << "def " << name << " = " << print_term(body) << "\n";
  for (const auto& ax : t.axioms) {
    const auto& e = ax.equation;
    out << "axiom [" << (e.context.empty() ? "" : e.context.to_string()) << "] " << print_term(e.lhs) << " ={"
        << e.label.to_string() << "} " << print_term(e.rhs) << "\n";
  }
  return out.str();
}

VEquation Goal::equation() const {
  if (!label) throw Error("a '~' goal has no label");
  return {context, lhs, rhs, type, *label};
}

Goal parse_goal(const Theory& t, std::string_view text) {
  std::string s(text);
  auto turn = s.find("|-");
  if (turn == std::string::npos) throw SyntaxError("goal must have the form 'ctx |- lhs REL rhs'", 1, 1);
  ParseOptions o = t.parse_options();
  Context ctx = parse_context(s.substr(0, turn), o);
  std::string body = s.substr(turn + 2);
  auto sides = split_relation(body);
  if (!sides) throw SyntaxError("goal needs one of ={q}, <=, = or ~ between the two terms", 1, static_cast<int>(turn) + 3);
  Term lhs = parse_term(sides->lhs, o);
  Term rhs = parse_term(sides->rhs, o);
  Goal g{GoalKind::Pair, ctx, lhs, rhs, Type::unit(), std::nullopt};
  switch (sides->rel) {
    case Relation::Labelled:
      g.kind = GoalKind::Labelled;
      g.label = eval_label(t.quantale, sides->label);
      break;
    case Relation::Leq:
      g.kind = GoalKind::Ordered;
      g.label = t.quantale.top();
      break;
    case Relation::Eq:
      g.kind = GoalKind::Classical;
      g.label = t.quantale.top();
      break;
    case Relation::Pair: break;
  }
  VEquation e = make_equation(t, ctx, lhs, rhs, t.quantale.top());
  g.lhs = e.lhs;
  g.rhs = e.rhs;
  g.type = e.type;
  return g;
}

}  // namespace vlam
