#include <cctype>
#include <set>

#include "vlam/error.hpp"
#include "vlam/syntax.hpp"

namespace vlam {

namespace {

enum class Tok {
  Ident,
  Backslash,  // \ or λ
  Colon,
  Dot,
  Comma,
  LParen,
  RParen,
  Star,       // * or ⊗
  Lolli,      // -o or ⊸
  Turnstile,  // |-
  Underscore,
  End,
  Other,  // anything else; terminates term parsing
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
  int line;
  int column;
  bool space_before;
};

class Lexer {
 public:
  Lexer(std::string_view text, int line, int column) : text_(text), line_(line), column_(column) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      bool space = skip_space();
      Token t{Tok::End, "", pos_, line_, column_, space};
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      auto starts = [&](std::string_view s) { return text_.substr(pos_, s.size()) == s; };
      if (std::isalpha(static_cast<unsigned char>(c)) || (c == '_' && pos_ + 1 < text_.size() && is_ident_char(text_[pos_ + 1]))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance(1);
        t.kind = Tok::Ident;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (starts("\\") || starts("λ")) {
        t.kind = Tok::Backslash;
        advance(starts("\\") ? 1 : std::string_view("λ").size());
      } else if (starts("-o") || starts("⊸")) {
        t.kind = Tok::Lolli;
        advance(starts("-o") ? 2 : std::string_view("⊸").size());
      } else if (starts("|-") || starts("▷")) {
        t.kind = Tok::Turnstile;
        advance(starts("|-") ? 2 : std::string_view("▷").size());
      } else if (starts("⊗")) {
        t.kind = Tok::Star;
        advance(std::string_view("⊗").size());
      } else if (starts("∗")) {
        t.kind = Tok::Star;
        advance(std::string_view("∗").size());
      } else {
        switch (c) {
          case ':': t.kind = Tok::Colon; break;
          case '.': t.kind = Tok::Dot; break;
          case ',': t.kind = Tok::Comma; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '*': t.kind = Tok::Star; break;
          case '_': t.kind = Tok::Underscore; break;
          default: t.kind = Tok::Other; break;
        }
        t.text = std::string(1, c);
        advance(1);
      }
      out.push_back(std::move(t));
    }
  }

  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

 private:
  bool skip_space() {
    bool any = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
      any = true;
    }
    return any;
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
        ++column_;
      }
      ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int column_;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"pm", "to", "for"};
  return k;
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options)
      : options_(options), tokens_(Lexer(text, options.first_line, options.first_column).run()) {}

  const Token& peek(std::size_t k = 0) const { return tokens_[std::min(pos_ + k, tokens_.size() - 1)]; }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_keyword(const char* kw) const { return at(Tok::Ident) && peek().text == kw; }
  bool at_end() const { return at(Tok::End); }
  std::size_t offset() const { return peek().offset; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) { throw SyntaxError(msg, t.line, t.column); }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Ident: return "'" + t.text + "'";
      case Tok::Backslash: return "'\\'";
      case Tok::Colon: return "':'";
      case Tok::Dot: return "'.'";
      case Tok::Comma: return "','";
      case Tok::LParen: return "'('";
      case Tok::RParen: return "')'";
      case Tok::Star: return "'*'";
      case Tok::Lolli: return "'-o'";
      case Tok::Turnstile: return "'|-'";
      case Tok::Underscore: return "'_'";
      case Tok::Other: return "'" + t.text + "'";
    }
    return "token";
  }

  Token expect(Tok kind, const std::string& what) {
    if (!at(kind)) fail("expected " + what + ", found " + describe(peek()));
    return tokens_[pos_++];
  }

  std::string expect_variable(const std::string& what) {
    Token t = expect(Tok::Ident, what);
    if (keywords().count(t.text)) fail_at(t, "expected " + what + ", found keyword '" + t.text + "'");
    return t.text;
  }

  void expect_keyword(const char* kw) {
    if (!at_keyword(kw)) fail(std::string("expected '") + kw + "', found " + describe(peek()));
    ++pos_;
  }

  // -- types ---------------------------------------------------------------

  Type type() {
    Type left = tensor_type();
    if (at(Tok::Lolli)) {
      ++pos_;
      return Type::lolli(left, type());
    }
    return left;
  }

  Type tensor_type() {
    Type left = atom_type();
    while (at(Tok::Star)) {
      ++pos_;
      left = Type::tensor(left, atom_type());
    }
    return left;
  }

  Type atom_type() {
    if (at(Tok::LParen)) {
      ++pos_;
      Type t = type();
      expect(Tok::RParen, "')'");
      return t;
    }
    Token t = expect(Tok::Ident, "a type");
    if (t.text == "I") return Type::unit();
    if (options_.signature && !options_.signature->has_ground(t.text)) {
      fail_at(t, "undeclared ground type '" + t.text + "'");
    }
    return Type::ground(t.text);
  }

  // -- terms ---------------------------------------------------------------

  Term term() {
    if (at(Tok::Backslash)) {
      ++pos_;
      std::string x = expect_variable("a bound variable");
      expect(Tok::Colon, "':' after the bound variable");
      Type a = type();
      expect(Tok::Dot, "'.' after the binder type");
      bound_.push_back(x);
      Term body = term();
      bound_.pop_back();
      return Term::lam(x, a, body);
    }
    if (at_keyword("pm")) {
      ++pos_;
      Term scrutinee = tensor_term();
      expect_keyword("to");
      Token xt = peek();
      std::string x = expect_variable("a pattern variable");
      expect(Tok::Star, "'*' in the tensor pattern");
      std::string y = expect_variable("a pattern variable");
      if (x == y) fail_at(xt, "pattern binds '" + x + "' twice");
      expect(Tok::Dot, "'.' after the tensor pattern");
      bound_.push_back(x);
      bound_.push_back(y);
      Term body = term();
      bound_.pop_back();
      bound_.pop_back();
      return Term::tensor_let(scrutinee, x, y, body);
    }
    Term scrutinee = tensor_term();
    if (at_keyword("to")) {
      ++pos_;
      if (at(Tok::Underscore) || at(Tok::Star)) {
        ++pos_;
      } else {
        fail("expected '_' or '*' after 'to', found " + describe(peek()));
      }
      expect(Tok::Dot, "'.' after the unit pattern");
      return Term::unit_let(scrutinee, term());
    }
    return scrutinee;
  }

  Term tensor_term() {
    Term left = app_term();
    while (at(Tok::Star)) {
      ++pos_;
      left = Term::tensor(left, app_term());
    }
    return left;
  }

  bool starts_argument() const {
    if (at(Tok::LParen) || at(Tok::Backslash)) return true;
    return at(Tok::Ident) && !keywords().count(peek().text);
  }

  Term app_term() {
    Term head = atom(true);
    while (starts_argument()) {
      // A trailing lambda is an argument: f \x:A. v  ==  f (\x:A. v)
      if (at(Tok::Backslash)) return Term::app(head, term());
      head = Term::app(head, atom(false));
    }
    return head;
  }

  Term atom(bool head_position) {
    if (at(Tok::Star) && head_position) {
      ++pos_;
      return Term::star();
    }
    if (at(Tok::LParen)) {
      ++pos_;
      Term t = term();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Backslash) || at_keyword("pm")) return term();
    if (!at(Tok::Ident)) fail("expected a term, found " + describe(peek()));
    Token id = tokens_[pos_++];
    if (keywords().count(id.text)) fail_at(id, "unexpected keyword '" + id.text + "'");
    if (at(Tok::LParen) && !peek().space_before) return operation(id);
    if (options_.signature && options_.signature->find(id.text) && !is_bound(id.text)) {
      fail_at(id, "operation '" + id.text + "' must be applied to its arguments");
    }
    if (options_.definitions && !is_bound(id.text)) {
      if (auto it = options_.definitions->find(id.text); it != options_.definitions->end()) return it->second;
    }
    return Term::var(id.text);
  }

  Term operation(const Token& id) {
    expect(Tok::LParen, "'('");
    std::vector<Term> args;
    if (at(Tok::RParen)) fail("operation '" + id.text + "' needs at least one argument");
    args.push_back(term());
    while (at(Tok::Comma)) {
      ++pos_;
      args.push_back(term());
    }
    expect(Tok::RParen, "')' closing the argument list of '" + id.text + "'");
    if (options_.signature) {
      const OpSig* sig = options_.signature->find(id.text);
      if (!sig) throw UnknownSymbolError(id.text, id.line, id.column);
      if (sig->args.size() != args.size()) {
        fail_at(id, "operation '" + id.text + "' expects " + std::to_string(sig->args.size()) + " argument(s), got " +
                        std::to_string(args.size()));
      }
    }
    return Term::op(id.text, std::move(args));
  }

  bool is_bound(const std::string& x) const { return std::find(bound_.begin(), bound_.end(), x) != bound_.end(); }

  // -- contexts ------------------------------------------------------------

  Context context() {
    std::vector<Context::Entry> entries;
    if (at(Tok::Other) && peek().text == "-") {
      ++pos_;
      return Context();
    }
    if (at_end() || at(Tok::Turnstile)) return Context();
    while (true) {
      Token xt = peek();
      std::string x = expect_variable("a context variable");
      expect(Tok::Colon, "':' after '" + x + "'");
      Type a = type();
      for (const auto& e : entries) {
        if (e.first == x) fail_at(xt, "variable '" + x + "' occurs twice in the context");
      }
      entries.emplace_back(x, a);
      if (!at(Tok::Comma)) break;
      ++pos_;
    }
    return Context(std::move(entries));
  }

  void expect_end(const std::string& what) {
    if (!at_end()) fail("unexpected " + describe(peek()) + " after " + what);
  }

 private:
  const ParseOptions& options_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
};

}  // namespace

Term parse_term(std::string_view text, const ParseOptions& options) {
  Parser p(text, options);
  Term t = p.term();
  p.expect_end("the term");
  return t;
}

Term parse_term_prefix(std::string_view text, std::size_t& consumed, const ParseOptions& options) {
  Parser p(text, options);
  Term t = p.term();
  consumed = p.at_end() ? text.size() : p.offset();
  return t;
}

Type parse_type(std::string_view text, const ParseOptions& options) {
  Parser p(text, options);
  Type t = p.type();
  p.expect_end("the type");
  return t;
}

Context parse_context(std::string_view text, const ParseOptions& options) {
  Parser p(text, options);
  Context c = p.context();
  p.expect_end("the context");
  return c;
}

ParsedJudgement parse_judgement(std::string_view text, const ParseOptions& options) {
  Parser p(text, options);
  Context c = p.context();
  p.expect(Tok::Turnstile, "'|-'");
  Term t = p.term();
  std::optional<Type> a;
  if (p.at(Tok::Colon)) {
    p.expect(Tok::Colon, "':'");
    a = p.type();
  }
  p.expect_end("the judgement");
  return {std::move(c), std::move(t), std::move(a)};
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  if (s == "_") return false;
  for (char c : s) {
    if (!Lexer::is_ident_char(c)) return false;
  }
  return !keywords().count(std::string(s));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Levels: 0 binders and lets, 1 tensor, 2 application, 3 atoms.
void print(const Term& t, int level, std::string& out) {
  auto open = [&](int needed) {
    bool parens = level > needed;
    if (parens) out += "(";
    return parens;
  };
  switch (t.kind()) {
    case Term::Kind::Var: out += t.name(); return;
    case Term::Kind::Star: out += level >= 3 ? "(*)" : "*"; return;
    case Term::Kind::Op: {
      out += t.name() + "(";
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        if (i) out += ", ";
        print(t.child(i), 0, out);
      }
      out += ")";
      return;
    }
    case Term::Kind::Lam: {
      bool p = open(0);
      out += "\\" + t.name() + ":" + t.binder_type().to_string() + ". ";
      print(t.child(0), 0, out);
      if (p) out += ")";
      return;
    }
    case Term::Kind::TensorLet: {
      bool p = open(0);
      out += "pm ";
      print(t.child(0), 1, out);
      out += " to " + t.name() + "*" + t.name2() + ". ";
      print(t.child(1), 0, out);
      if (p) out += ")";
      return;
    }
    case Term::Kind::UnitLet: {
      bool p = open(0);
      print(t.child(0), 1, out);
      out += " to _. ";
      print(t.child(1), 0, out);
      if (p) out += ")";
      return;
    }
    case Term::Kind::Tensor: {
      bool p = open(1);
      print(t.child(0), 1, out);
      out += " * ";
      print(t.child(1), 2, out);
      if (p) out += ")";
      return;
    }
    case Term::Kind::App: {
      bool p = open(2);
      print(t.child(0), 2, out);
      out += " ";
      print(t.child(1), 3, out);
      if (p) out += ")";
      return;
    }
  }
}

}  // namespace

std::string print_term(const Term& t) {
  std::string out;
  print(t, 0, out);
  return out;
}

}  // namespace vlam
