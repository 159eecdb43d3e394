#include "schema.hpp"

#include <algorithm>

#include "vlam/error.hpp"

namespace vlam::detail {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

// ---------------------------------------------------------------------------
// Schema clauses: "for n, m in 0..N and k in 1..3 if n <= m"

std::size_t find_word(std::string_view s, std::string_view word, std::size_t from) {
  int depth = 0;
  for (std::size_t i = from; i + word.size() <= s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (depth == 0 && s.substr(i, word.size()) == word && (i == 0 || !ident_char(s[i - 1])) &&
        (i + word.size() == s.size() || !ident_char(s[i + word.size()]))) {
      return i;
    }
  }
  return std::string_view::npos;
}

[[noreturn]] void parse_error(int line, const std::string& msg) { throw TheoryError(TheoryErrorKind::Parse, line, msg); }

// Splits "body for ... if ..." into the body and its clause.
std::string split_clause(const std::string& text, Clause& clause, int line) {
  std::size_t f = find_word(text, "for");
  std::size_t i = find_word(text, "if", f == std::string::npos ? 0 : f);
  std::string body = text.substr(0, std::min(f, i));
  if (i != std::string::npos) clause.condition = trim(text.substr(i + 2));
  if (f != std::string::npos) {
    std::string bind = text.substr(f + 3, (i == std::string::npos ? text.size() : i) - f - 3);
    // bindings: vars in lo..hi, separated by ',' or 'and'
    std::vector<std::string> pending;
    std::size_t pos = 0;
    while (pos < bind.size()) {
      while (pos < bind.size() && (std::isspace(static_cast<unsigned char>(bind[pos])) || bind[pos] == ',')) ++pos;
      if (pos >= bind.size()) break;
      std::size_t start = pos;
      while (pos < bind.size() && ident_char(bind[pos])) ++pos;
      std::string word = bind.substr(start, pos - start);
      if (word.empty()) parse_error(line, "malformed 'for' clause near '" + bind.substr(start) + "'");
      if (word == "and") continue;
      if (word != "in") {
        pending.push_back(word);
        continue;
      }
      if (pending.empty()) parse_error(line, "'in' without variables in 'for' clause");
      // Range up to the next ',' or 'and' at depth 0.
      std::size_t end = pos;
      int depth = 0;
      while (end < bind.size()) {
        char c = bind[end];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && c == ',') break;
        if (depth == 0 && bind.compare(end, 4, " and") == 0) break;
        ++end;
      }
      std::string range = trim(bind.substr(pos, end - pos));
      auto dots = range.find("..");
      if (dots == std::string::npos) parse_error(line, "range '" + range + "' must have the form lo..hi");
      clause.bindings.push_back({pending, trim(range.substr(0, dots)), trim(range.substr(dots + 2))});
      pending.clear();
      pos = end;
    }
    if (!pending.empty()) parse_error(line, "variables without a range in 'for' clause");
  }
  return trim(body);
}

long eval_int(const std::string& text, const std::map<std::string, long>& vars, int line) {
  auto r = Expr(text, vars).evaluate();
  if (!r || r->get_den() != 1 || !r->get_num().fits_slong_p()) {
    parse_error(line, "'" + text + "' is not an integer expression");
  }
  return r->get_num().get_si();
}

// Calls f for every assignment of the clause variables that satisfies the condition.
void for_each_instance(const Clause& clause, const std::map<std::string, long>& params, int line,
                       const std::function<void(const std::map<std::string, long>&)>& f) {
  std::map<std::string, long> env = params;
  std::vector<std::pair<std::string, std::pair<long, long>>> vars;
  std::function<void(std::size_t)> go = [&](std::size_t b) {
    if (b == clause.bindings.size()) {
      if (!clause.condition.empty()) {
        auto c = Expr(clause.condition, env).condition();
        if (!c) parse_error(line, "malformed condition '" + clause.condition + "'");
        if (!*c) return;
      }
      f(env);
      return;
    }
    const Binding& bind = clause.bindings[b];
    long lo = eval_int(bind.lo, env, line), hi = eval_int(bind.hi, env, line);
    std::function<void(std::size_t)> assign = [&](std::size_t v) {
      if (v == bind.vars.size()) {
        go(b + 1);
        return;
      }
      for (long x = lo; x <= hi; ++x) {
        env[bind.vars[v]] = x;
        assign(v + 1);
      }
      env.erase(bind.vars[v]);
    };
    assign(0);
  };
  go(0);
}

// Replaces _{expr} and _var (var a clause variable) by _value.
std::string instantiate(const std::string& text, const std::map<std::string, long>& env,
                        const std::vector<std::string>& clause_vars, int line) {
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '_' && i + 1 < text.size() && text[i + 1] == '{') {
      auto close = text.find('}', i);
      if (close == std::string::npos) parse_error(line, "unterminated '_{'");
      out += "_" + std::to_string(eval_int(text.substr(i + 2, close - i - 2), env, line));
      i = close + 1;
      continue;
    }
    if (text[i] == '_') {
      std::size_t j = i + 1;
      while (j < text.size() && ident_char(text[j]) && text[j] != '_') ++j;
      std::string name = text.substr(i + 1, j - i - 1);
      bool boundary = j == text.size() || !ident_char(text[j]) || text[j] == '_';
      if (boundary && std::find(clause_vars.begin(), clause_vars.end(), name) != clause_vars.end()) {
        out += "_" + std::to_string(env.at(name));
        i = j;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

std::vector<std::string> clause_vars(const Clause& c) {
  std::vector<std::string> v;
  for (const auto& b : c.bindings) v.insert(v.end(), b.vars.begin(), b.vars.end());
  return v;
}

}  // namespace vlam::detail
