#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "chcprune/core/io.hpp"

namespace chcprune {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line), column_(column) {}

namespace {

enum class Tok { ident, var, integer, lparen, rparen, comma, dot, neck, eq, lt, le, gt, ge, plus, minus, star, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

const char* describe(Tok k) {
  switch (k) {
    case Tok::ident: return "identifier";
    case Tok::var: return "variable";
    case Tok::integer: return "integer";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::comma: return "','";
    case Tok::dot: return "'.'";
    case Tok::neck: return "':-'";
    case Tok::eq: return "'='";
    case Tok::lt: return "'<'";
    case Tok::le: return "'=<'";
    case Tok::gt: return "'>'";
    case Tok::ge: return "'>='";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::star: return "'*'";
    case Tok::end: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line, cl = col;
    auto push = [&](Tok k, std::size_t n) {
      out.push_back({k, std::string(text.substr(i, n)), l, cl});
      advance(n);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      push(std::islower(static_cast<unsigned char>(c)) ? Tok::ident : Tok::var, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      push(Tok::integer, j - i);
      continue;
    }
    auto next = i + 1 < text.size() ? text[i + 1] : '\0';
    switch (c) {
      case '(': push(Tok::lparen, 1); continue;
      case ')': push(Tok::rparen, 1); continue;
      case ',': push(Tok::comma, 1); continue;
      case '.': push(Tok::dot, 1); continue;
      case '+': push(Tok::plus, 1); continue;
      case '-': push(Tok::minus, 1); continue;
      case '*': push(Tok::star, 1); continue;
      case ':':
        if (next == '-') {
          push(Tok::neck, 2);
          continue;
        }
        break;
      case '=':
        if (next == '<') push(Tok::le, 2);
        else push(Tok::eq, 1);
        continue;
      case '<':
        if (next == '=') push(Tok::le, 2);
        else push(Tok::lt, 1);
        continue;
      case '>':
        if (next == '=') push(Tok::ge, 2);
        else push(Tok::gt, 1);
        continue;
      default:
        break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

// Placeholder prefix for `_`; replaced by a fresh name once the clause is read.
constexpr char kAnonMarker = '\x01';

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Program run() {
    Program prog;
    while (peek().kind != Tok::end) prog.clauses.push_back(clause());
    return prog;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(msg, t.line, t.column); }

  const Token& expect(Tok k) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + describe(k) + ", found " + describe(peek().kind));
    return take();
  }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  std::string var_name(const Token& t) {
    if (t.text == "_") return std::string(1, kAnonMarker) + std::to_string(anon_++);
    return t.text;
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Tok::var) return Term::var(var_name(take()));
    bool negative = accept(Tok::minus);
    if (peek().kind == Tok::integer) {
      Integer v(take().text);
      return Term::integer(negative ? Integer(-v) : v);
    }
    fail(peek(), "expected variable or integer argument");
  }

  std::vector<Term> args() {
    std::vector<Term> out;
    if (!accept(Tok::lparen)) return out;
    out.push_back(term());
    while (accept(Tok::comma)) out.push_back(term());
    expect(Tok::rparen);
    return out;
  }

  void check_arity(const Token& at, const Atom& a) {
    auto [it, fresh] = arity_.emplace(a.predicate, a.arity());
    if (!fresh && it->second != a.arity())
      fail(at, "predicate '" + a.predicate + "' used with arity " + std::to_string(a.arity()) +
                   " but earlier with arity " + std::to_string(it->second));
    if (a.predicate == kQuery && a.arity() != 0) fail(at, "query predicate 'unsafe' must be nullary");
  }

  // expr := ['-'] product {('+'|'-') product}
  LinearExpr expr() {
    LinearExpr e = product();
    for (;;) {
      if (accept(Tok::plus)) {
        e += product();
      } else if (accept(Tok::minus)) {
        e -= product();
      } else {
        return e;
      }
    }
  }

  LinearExpr product() {
    const Token& start = peek();
    LinearExpr e = factor();
    while (accept(Tok::star)) {
      LinearExpr f = factor();
      if (f.is_constant()) {
        e.scale(f.constant_term());
      } else if (e.is_constant()) {
        f.scale(e.constant_term());
        e = std::move(f);
      } else {
        fail(start, "non-linear product");
      }
    }
    return e;
  }

  LinearExpr factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::integer: return LinearExpr::constant(Integer(take().text));
      case Tok::var: return LinearExpr::variable(var_name(take()));
      case Tok::minus: {
        take();
        return factor().scale(-1);
      }
      case Tok::lparen: {
        take();
        LinearExpr e = expr();
        expect(Tok::rparen);
        return e;
      }
      default: fail(t, std::string("expected expression, found ") + describe(t.kind));
    }
  }

  std::optional<Relation> relation() {
    switch (peek().kind) {
      case Tok::eq: take(); return Relation::eq;
      case Tok::lt: take(); return Relation::lt;
      case Tok::le: take(); return Relation::le;
      case Tok::gt: take(); return Relation::gt;
      case Tok::ge: take(); return Relation::ge;
      default: return std::nullopt;
    }
  }

  void goal(Clause& c) {
    const Token& t = peek();
    if (t.kind == Tok::ident) {
      take();
      if (t.text == "true" && peek().kind != Tok::lparen) return;
      Atom a{t.text, args()};
      if (t.text == "read" || t.text == "write") {
        std::size_t want = t.text == "read" ? 3 : 4;
        if (a.arity() != want) fail(t, t.text + " expects " + std::to_string(want) + " arguments");
        c.constraint.push_back(ArrayConstraint{t.text == "read" ? ArrayOp::read : ArrayOp::write, std::move(a.args)});
        return;
      }
      check_arity(t, a);
      if (a.predicate == kQuery) fail(t, "'unsafe' may only occur in clause heads");
      c.body.push_back(std::move(a));
      return;
    }
    LinearExpr lhs = expr();
    auto rel = relation();
    if (!rel) fail(peek(), std::string("expected comparison operator, found ") + describe(peek().kind));
    c.constraint.push_back(LinearConstraint{std::move(lhs), *rel, expr()});
  }

  Clause clause() {
    anon_ = 0;
    const Token& h = expect(Tok::ident);
    if (h.text == "read" || h.text == "write" || h.text == "true")
      fail(h, "'" + h.text + "' cannot be used as a clause head");
    Clause c;
    c.head = Atom{h.text, args()};
    check_arity(h, c.head);
    if (accept(Tok::neck)) {
      goal(c);
      while (accept(Tok::comma)) goal(c);
    }
    expect(Tok::dot);
    if (anon_ > 0) name_anonymous(c);
    return c;
  }

  static void name_anonymous(Clause& c) {
    VarList used;
    collect_vars(c, used);
    Substitution s;
    std::size_t next = 0;
    for (const auto& v : used.items()) {
      if (v.empty() || v[0] != kAnonMarker) continue;
      std::string fresh;
      do {
        fresh = "_" + std::to_string(next++);
      } while (used.contains(fresh));
      s.emplace(v, Term::var(fresh));
    }
    c = substitute(s, c);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t anon_ = 0;
  std::map<std::string, std::size_t> arity_;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).run(); }

Program parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

}  // namespace chcprune
