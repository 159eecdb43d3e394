#include <fstream>
#include <sstream>

#include "schema.hpp"
#include "vlam/error.hpp"
#include "vlam/models.hpp"

namespace vlam {

using namespace detail;

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  if (line <= 0) throw ModelError(msg);
  throw ModelError("line " + std::to_string(line) + ": " + msg);
}

struct GroundDecl {
  int line;
  std::vector<Rational> points;
};

struct DistanceDecl {
  int line;
  std::string a, b;
  std::string expr;
};

struct OpDecl {
  int line;
  std::string symbol;
  std::vector<std::string> args;
  std::string expr;
  std::map<std::string, long> env;
};

std::vector<std::string> split_names(const std::string& s, int line) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    for (char c : item) {
      if (!ident_char(c)) fail(line, "bad variable name '" + item + "'");
    }
    out.push_back(item);
  }
  return out;
}

// Splits "NAME(args) = rhs". Parentheses are optional when there are no arguments.
void split_head(const std::string& text, std::string& name, std::vector<std::string>& args, std::string& rhs,
                int line) {
  auto eq = find_word(text, "=");
  if (eq == std::string::npos) eq = text.find('=');
  if (eq == std::string::npos) fail(line, "expected NAME(args) = EXPR");
  std::string head = trim(text.substr(0, eq));
  rhs = trim(text.substr(eq + 1));
  auto open = head.find('(');
  if (open == std::string::npos) {
    name = head;
  } else {
    if (head.back() != ')') fail(line, "unbalanced parentheses in '" + head + "'");
    name = trim(head.substr(0, open));
    args = split_names(head.substr(open + 1, head.size() - open - 2), line);
  }
  if (name.empty()) fail(line, "missing name");
}

class Loader {
 public:
  explicit Loader(const Theory& t) : t_(t), spec_(t.quantale), params_(t.params) {}

  Model load(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
      ++n;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
      std::string line = trim(raw);
      if (line.empty()) continue;
      try {
        directive(line, n);
      } catch (const ModelError&) {
        throw;
      } catch (const TheoryError& e) {
        throw ModelError(e.what());
      } catch (const Error& e) {
        fail(n, e.what());
      }
    }
    return build();
  }

 private:
  void directive(const std::string& line, int n) {
    auto sp = line.find_first_of(" \t");
    std::string word = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
    if (word == "backend") {
      if (rest == "finmet") {
        backend_ = Backend::FinMet;
      } else if (rest == "finmeas") {
        backend_ = Backend::FinMeas;
      } else {
        fail(n, "unknown backend '" + rest + "'");
      }
    } else if (word == "quantale") {
      spec_ = QuantaleSpec::from_name(rest);
      spec_line_ = n;
    } else if (word == "param") {
      auto eq = rest.find('=');
      if (eq == std::string::npos) fail(n, "'param' expects NAME = VALUE");
      params_[trim(rest.substr(0, eq))] = eval_int(trim(rest.substr(eq + 1)), params_, n);
    } else if (word == "ground") {
      ground(rest, n);
    } else if (word == "distance") {
      std::string name, rhs;
      std::vector<std::string> args;
      split_head(rest, name, args, rhs, n);
      if (args.size() != 2) fail(n, "'distance' expects NAME(a, b) = EXPR");
      distances_[name] = {n, args[0], args[1], rhs};
    } else if (word == "op") {
      op(rest, n);
    } else {
      fail(n, "unknown directive '" + word + "'");
    }
  }

  void ground(const std::string& rest, int n) {
    auto eq = rest.find('=');
    if (eq == std::string::npos) fail(n, "'ground' expects NAME = lo..hi or NAME = points ...");
    std::string name = trim(rest.substr(0, eq));
    std::string body = trim(rest.substr(eq + 1));
    GroundDecl g{n, {}};
    if (body.rfind("points", 0) == 0) {
      Clause clause;
      std::string list = split_clause(body.substr(6), clause, n);
      auto add = [&](const std::map<std::string, long>& env) {
        std::stringstream in(list);
        std::string item;
        while (std::getline(in, item, ',')) {
          auto r = Expr(trim(item), env).evaluate();
          if (!r) fail(n, "bad point '" + trim(item) + "'");
          g.points.push_back(*r);
        }
      };
      if (clause.schematic() || !clause.condition.empty()) {
        for_each_instance(clause, params_, n, add);
      } else {
        add(params_);
      }
    } else {
      auto dots = body.find("..");
      if (dots == std::string::npos) fail(n, "expected lo..hi or points e1, e2, ...");
      long lo = eval_int(trim(body.substr(0, dots)), params_, n);
      long hi = eval_int(trim(body.substr(dots + 2)), params_, n);
      for (long v = lo; v <= hi; ++v) g.points.push_back(Rational(v));
    }
    if (g.points.empty()) fail(n, "ground type '" + name + "' has no points");
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (g.points[i] == g.points[j]) fail(n, "point " + to_string(g.points[i]) + " is listed twice");
      }
    }
    if (!t_.signature.has_ground(name)) fail(n, "the theory has no ground type '" + name + "'");
    grounds_[name] = std::move(g);
  }

  void op(const std::string& rest, int n) {
    Clause clause;
    std::string body = split_clause(rest, clause, n);
    std::string name, rhs;
    std::vector<std::string> args;
    split_head(body, name, args, rhs, n);
    auto vars = clause_vars(clause);
    auto declare = [&](const std::map<std::string, long>& env) {
      std::string sym = instantiate(name, env, vars, n);
      if (!t_.signature.find(sym)) return;  // instances outside the signature are skipped
      ops_.push_back({n, sym, args, rhs, env});
    };
    if (clause.schematic() || !clause.condition.empty()) {
      for_each_instance(clause, params_, n, declare);
    } else {
      if (!t_.signature.find(name)) fail(n, "the theory has no operation '" + name + "'");
      declare(params_);
    }
  }

  const GroundDecl& ground_of(const Type& a, int line) const {
    auto it = grounds_.find(a.name());
    if (it == grounds_.end()) fail(line, "ground type '" + a.name() + "' is not interpreted");
    return it->second;
  }

  Model build() {
    if (backend_ == Backend::FinMeas && !(spec_ == QuantaleSpec::lawvere())) {
      fail(spec_line_, "the finmeas backend uses the metric quantale");
    }
    Model m = backend_ == Backend::FinMet ? Model::finmet(spec_) : Model::finmeas();
    for (const auto& [name, g] : grounds_) {
      if (backend_ == Backend::FinMeas) {
        m.set_ground(name, g.points);
        continue;
      }
      m.set_ground(name, met_carrier(name, g));
    }
    for (const auto& o : ops_) {
      try {
        if (backend_ == Backend::FinMet) {
          met_op(m, o);
        } else {
          meas_op(m, o);
        }
      } catch (const ModelError& e) {
        std::string what = e.what();
        if (what.rfind("line ", 0) == 0) throw;
        fail(o.line, what);
      } catch (const Error& e) {
        fail(o.line, e.what());
      }
    }
    return m;
  }

  std::shared_ptr<const FinVCat> met_carrier(const std::string& name, const GroundDecl& g) const {
    std::vector<std::string> names;
    for (const auto& p : g.points) names.push_back(to_string(p));
    auto d = distances_.find(name);
    if (d == distances_.end()) return std::make_shared<const FinVCat>(FinVCat::discrete(spec_, names));
    const DistanceDecl& dd = d->second;
    std::vector<QuantaleValue> table;
    std::string expr = trim(dd.expr);
    for (const auto& x : g.points) {
      for (const auto& y : g.points) {
        if (expr == "inf" || expr == "top" || expr == "bot") {
          table.push_back(spec_.parse(expr));
          continue;
        }
        std::map<std::string, Rational> env;
        for (const auto& [k, v] : params_) env[k] = Rational(v);
        env[dd.a] = x;
        env[dd.b] = y;
        auto r = Expr(expr, env).evaluate();
        if (!r) fail(dd.line, "cannot evaluate '" + expr + "'");
        try {
          table.push_back(spec_.value(*r));
        } catch (const Error& e) {
          fail(dd.line, e.what());
        }
      }
    }
    try {
      return std::make_shared<const FinVCat>(spec_, names, table);
    } catch (const Error& e) {
      fail(dd.line, std::string("distance on '") + name + "' is not a V-category: " + e.what());
    }
  }

  // The named arguments bind the non-unit argument sorts in order.
  std::vector<std::size_t> named_positions(const OpSig& sig, const OpDecl& o) const {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < sig.args.size(); ++i) {
      const Type& a = sig.args[i];
      if (a.kind() == Type::Kind::Unit) continue;
      if (a.kind() != Type::Kind::Ground) fail(o.line, "operation '" + o.symbol + "' has a non-ground argument sort");
      pos.push_back(i);
    }
    if (pos.size() != o.args.size()) {
      fail(o.line, "operation '" + o.symbol + "' takes " + std::to_string(pos.size()) + " non-unit arguments");
    }
    return pos;
  }

  std::map<std::string, Rational> base_env(const OpDecl& o) const {
    std::map<std::string, Rational> env;
    for (const auto& [k, v] : o.env) env[k] = Rational(v);
    return env;
  }

  // Calls f with every assignment of basis points to the named arguments, in
  // the order of the left-nested argument object.
  void for_each_argument(const OpSig& sig, const OpDecl& o,
                         const std::function<void(const std::vector<std::size_t>&)>& f) const {
    auto pos = named_positions(sig, o);
    std::vector<std::size_t> sizes;
    for (auto p : pos) sizes.push_back(ground_of(sig.args[p], o.line).points.size());
    std::vector<std::size_t> idx(pos.size(), 0);
    while (true) {
      f(idx);
      std::size_t k = idx.size();
      while (k > 0) {
        --k;
        if (++idx[k] < sizes[k]) break;
        idx[k] = 0;
        if (k == 0) return;
      }
      if (idx.empty()) return;
    }
  }

  void met_op(Model& m, const OpDecl& o) const {
    const OpSig& sig = *t_.signature.find(o.symbol);
    auto pos = named_positions(sig, o);
    bool unit_result = sig.result.kind() == Type::Kind::Unit;
    if (!unit_result && sig.result.kind() != Type::Kind::Ground) {
      fail(o.line, "operation '" + o.symbol + "' has a non-ground result sort");
    }
    if (unit_result && o.expr != "*") fail(o.line, "an operation into I is written '= *'");
    std::map<std::vector<std::size_t>, std::size_t> table;
    if (!unit_result) {
      const GroundDecl& target = ground_of(sig.result, o.line);
      for_each_argument(sig, o, [&](const std::vector<std::size_t>& idx) {
        auto env = base_env(o);
        for (std::size_t i = 0; i < idx.size(); ++i) env[o.args[i]] = ground_of(sig.args[pos[i]], o.line).points[idx[i]];
        auto r = Expr(o.expr, env).evaluate();
        if (!r) fail(o.line, "cannot evaluate '" + o.expr + "'");
        auto it = std::find(target.points.begin(), target.points.end(), *r);
        if (it == target.points.end()) {
          fail(o.line, o.symbol + " yields " + to_string(*r) + ", which is not a point of " + sig.result.name());
        }
        table[idx] = static_cast<std::size_t>(it - target.points.begin());
      });
    }
    std::size_t nargs = sig.args.size();
    PointMap f = [table = std::move(table), pos, nargs, unit_result](const Point& p) -> Point {
      if (unit_result) return MetPoint::unit();
      // Unpack the left-nested argument point.
      std::vector<Point> parts(nargs);
      Point cur = p;
      for (std::size_t i = nargs; i-- > 1;) {
        parts[i] = cur->right;
        cur = cur->left;
      }
      parts[0] = cur;
      std::vector<std::size_t> idx;
      for (auto q : pos) idx.push_back(parts[q]->index);
      return MetPoint::ground(table.at(idx));
    };
    m.set_operation(o.symbol, sig, std::move(f));
    if (!is_nonexpansive(m, m.operation(o.symbol))) fail(o.line, "operation '" + o.symbol + "' is not non-expansive");
  }

  void meas_op(Model& m, const OpDecl& o) const {
    const OpSig& sig = *t_.signature.find(o.symbol);
    auto pos = named_positions(sig, o);
    std::vector<Rational> targets{Rational(0)};
    bool unit_result = sig.result.kind() == Type::Kind::Unit;
    if (!unit_result) {
      if (sig.result.kind() != Type::Kind::Ground) fail(o.line, "operation '" + o.symbol + "' has a non-ground result sort");
      targets = ground_of(sig.result, o.line).points;
    }
    std::size_t cols = 1;
    for (auto p : pos) cols *= ground_of(sig.args[p], o.line).points.size();
    RatMatrix a(targets.size(), cols);
    std::size_t col = 0;
    for_each_argument(sig, o, [&](const std::vector<std::size_t>& idx) {
      auto env = base_env(o);
      for (std::size_t i = 0; i < idx.size(); ++i) env[o.args[i]] = ground_of(sig.args[pos[i]], o.line).points[idx[i]];
      for (std::size_t r = 0; r < targets.size(); ++r) {
        Expr e(o.expr, env);
        if (!unit_result) e.at_point(targets[r]);
        auto v = e.evaluate();
        if (!v) fail(o.line, "cannot evaluate '" + o.expr + "'");
        if (*v != 0) a.at(r, col) = *v;
      }
      ++col;
    });
    m.set_operation(o.symbol, sig, std::move(a));
  }

  const Theory& t_;
  Backend backend_ = Backend::FinMet;
  QuantaleSpec spec_;
  int spec_line_ = 0;
  std::map<std::string, long> params_;
  std::map<std::string, GroundDecl> grounds_;
  std::map<std::string, DistanceDecl> distances_;
  std::vector<OpDecl> ops_;
};

}  // namespace

Model load_model(std::string_view text, const Theory& t) { return Loader(t).load(text); }

Model load_model_file(const std::filesystem::path& path, const Theory& t) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str(), t);
}

}  // namespace vlam
