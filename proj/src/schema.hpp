#pragma once

// Shared text machinery for theory and model files: exact arithmetic
// expressions and "for v in lo..hi if cond" schema clauses.

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vlam/rational.hpp"

namespace vlam::detail {

std::string trim(std::string_view s);
bool ident_char(char c);

// Arithmetic over exact rationals: + - * /, unary minus, parentheses, |x|,
// integers, decimals, variables and the functions min, max, abs and le.
// With a point set, [e] is 1 when e equals that point and 0 otherwise.
class Expr {
 public:
  Expr(std::string_view text, const std::map<std::string, long>& vars) : s_(text), ints_(&vars) {}
  Expr(std::string_view text, const std::map<std::string, Rational>& vars) : s_(text), rats_(&vars) {}

  Expr& at_point(const Rational& p) {
    point_ = &p;
    return *this;
  }

  std::optional<Rational> evaluate() {
    try {
      Rational r = expr();
      skip();
      if (pos_ != s_.size()) return std::nullopt;
      return r;
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  }

  // cond := cmp (and cmp)*
  std::optional<bool> condition() {
    try {
      bool result = true;
      while (true) {
        Rational a = expr();
        skip();
        std::string op;
        for (const char* candidate : {"<=", ">=", "==", "!=", "<", ">"}) {
          if (s_.substr(pos_, std::string_view(candidate).size()) == candidate) {
            op = candidate;
            break;
          }
        }
        if (op.empty()) return std::nullopt;
        pos_ += op.size();
        Rational b = expr();
        bool r = op == "<=" ? a <= b : op == ">=" ? a >= b : op == "==" ? a == b : op == "!=" ? a != b
                                                                                  : op == "<"  ? a < b
                                                                                               : a > b;
        result = result && r;
        skip();
        if (pos_ == s_.size()) return result;
        if (s_.substr(pos_, 3) == "and") {
          pos_ += 3;
        } else if (s_.substr(pos_, 2) == "&&") {
          pos_ += 2;
        } else {
          return std::nullopt;
        }
      }
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  }

 private:
  [[noreturn]] static void bad() { throw std::domain_error("bad expression"); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Rational expr() {
    Rational r = product();
    while (true) {
      if (eat('+')) {
        r += product();
      } else if (peek_minus()) {
        ++pos_;
        r -= product();
      } else {
        return r;
      }
    }
  }

  bool peek_minus() {
    skip();
    return pos_ < s_.size() && s_[pos_] == '-';
  }

  Rational product() {
    Rational r = unary();
    while (true) {
      if (eat('*')) {
        r *= unary();
      } else if (eat('/')) {
        Rational d = unary();
        if (d == 0) bad();
        r /= d;
      } else {
        return r;
      }
    }
  }

  Rational unary() {
    if (eat('-')) return -unary();
    return atom();
  }

  Rational atom() {
    skip();
    if (pos_ >= s_.size()) bad();
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Rational r = expr();
      if (!eat(')')) bad();
      return r;
    }
    if (c == '[' && point_) {
      ++pos_;
      Rational r = expr();
      if (!eat(']')) bad();
      return Rational(r == *point_ ? 1 : 0);
    }
    if (c == '|') {
      ++pos_;
      Rational r = expr();
      if (!eat('|')) bad();
      return abs(r);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      auto r = parse_rational(s_.substr(start, pos_ - start));
      if (!r) bad();
      return *r;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (eat('(')) return call(name);
      if (ints_) {
        if (auto it = ints_->find(name); it != ints_->end()) return Rational(it->second);
      }
      if (rats_) {
        if (auto it = rats_->find(name); it != rats_->end()) return it->second;
      }
      bad();
    }
    bad();
  }

  // min, max, abs and le(a, b) (1 when a <= b, else 0); the '(' is consumed.
  Rational call(const std::string& name) {
    std::vector<Rational> args{expr()};
    while (eat(',')) args.push_back(expr());
    if (!eat(')')) bad();
    if (name == "abs" && args.size() == 1) return abs(args[0]);
    if (args.size() != 2) bad();
    if (name == "min") return std::min(args[0], args[1]);
    if (name == "max") return std::max(args[0], args[1]);
    if (name == "le") return Rational(args[0] <= args[1] ? 1 : 0);
    bad();
  }

  std::string_view s_;
  const std::map<std::string, long>* ints_ = nullptr;
  const std::map<std::string, Rational>* rats_ = nullptr;
  const Rational* point_ = nullptr;
  std::size_t pos_ = 0;
};

struct Binding {
  std::vector<std::string> vars;
  std::string lo;
  std::string hi;
};

struct Clause {
  std::vector<Binding> bindings;
  std::string condition;
  bool schematic() const { return !bindings.empty(); }
};

/// Offset of the keyword `word` at bracket depth 0, or npos.
std::size_t find_word(std::string_view s, std::string_view word, std::size_t from = 0);

/// The errors below are TheoryError(Parse) carrying `line`.
[[noreturn]] void parse_error(int line, const std::string& msg);

/// Splits "body for ... if ..." into the body and its clause.
std::string split_clause(const std::string& text, Clause& clause, int line);

long eval_int(const std::string& text, const std::map<std::string, long>& vars, int line);

/// Calls f for every assignment of the clause variables that satisfies the condition.
void for_each_instance(const Clause& clause, const std::map<std::string, long>& params, int line,
                       const std::function<void(const std::map<std::string, long>&)>& f);

/// Replaces _{expr} and _var (var a clause variable) by _value.
std::string instantiate(const std::string& text, const std::map<std::string, long>& env,
                        const std::vector<std::string>& clause_vars, int line);

std::vector<std::string> clause_vars(const Clause& c);

}  // namespace vlam::detail
