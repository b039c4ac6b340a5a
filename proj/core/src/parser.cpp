#include <cctype>
#include <optional>

#include "secrl/error.hpp"
#include "secrl/formula.hpp"

namespace secrl {

namespace {

enum class Tok { Ident, Int, Bang, Amp, Pipe, Arrow, Semi, LBrack, RBrack, LParen, RParen, Caret, Comma, At, Dot, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Bang: return "'!'";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::Semi: return "';'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Caret: return "'^'";
    case Tok::Comma: return "','";
    case Tok::At: return "'@'";
    case Tok::Dot: return "'.'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t l0 = line, c0 = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, std::string(s.substr(i, j - i)), l0, c0});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), l0, c0});
      advance(j - i);
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", l0, c0});
      advance(2);
      continue;
    }
    Tok k;
    switch (c) {
      case '!': k = Tok::Bang; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Pipe; break;
      case ';': k = Tok::Semi; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '^': k = Tok::Caret; break;
      case ',': k = Tok::Comma; break;
      case '@': k = Tok::At; break;
      case '.': k = Tok::Dot; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", l0, c0);
    }
    out.push_back({k, std::string(1, c), l0, c0});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  FormulaAst formula() {
    FormulaAst ast;
    while (peek().kind == Tok::Ident && (peek().text == "forall" || peek().text == "exists")) {
      const Quantifier q = next().text == "forall" ? Quantifier::Forall : Quantifier::Exists;
      const Token& v = expect(Tok::Ident);
      expect(Tok::Dot);
      ast.quantifiers.push_back({q, v.text});
    }
    ast.body = body();
    return ast;
  }

  FormulaPtr body() {
    auto f = expr();
    if (peek().kind != Tok::End) fail("expected end of input");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw SyntaxError(msg + ", found " + (t.kind == Tok::End ? std::string(tok_name(t.kind)) : "'" + t.text + "'"),
                      t.line, t.col);
  }

  const Token& expect(Tok k) {
    if (peek().kind != k) fail(std::string("expected ") + tok_name(k));
    return next();
  }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  TimeUnits integer() {
    const Token& t = expect(Tok::Int);
    try {
      const unsigned long v = std::stoul(t.text);
      if (v > 1000000000UL) throw std::out_of_range("big");
      return static_cast<TimeUnits>(v);
    } catch (const std::exception&) {
      throw SyntaxError("integer out of range", t.line, t.col);
    }
  }

  FormulaPtr expr() {
    auto lhs = impl();
    if (accept(Tok::Semi)) return concat(lhs, expr());
    return lhs;
  }

  FormulaPtr impl() {
    auto lhs = disjunction();
    if (accept(Tok::Arrow)) return implies(lhs, impl());
    return lhs;
  }

  FormulaPtr disjunction() {
    auto lhs = conjunction();
    while (accept(Tok::Pipe)) lhs = disj(lhs, conjunction());
    return lhs;
  }

  FormulaPtr conjunction() {
    auto lhs = unary();
    while (accept(Tok::Amp)) lhs = conj(lhs, unary());
    return lhs;
  }

  FormulaPtr unary() {
    if (accept(Tok::Bang)) return negate(unary());
    return primary();
  }

  FormulaPtr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Ident && t.text == "H") {
      next();
      expect(Tok::Caret);
      const TimeUnits d = integer();
      const bool neg = accept(Tok::Bang);
      const std::string prop = expect(Tok::Ident).text;
      expect(Tok::At);
      const std::string var = expect(Tok::Ident).text;
      return hold(d, prop, var, neg);
    }
    if (accept(Tok::LBrack)) {
      auto inner = expr();
      expect(Tok::RBrack);
      expect(Tok::Caret);
      expect(Tok::LBrack);
      const Token& at = peek();
      const TimeUnits lo = integer();
      expect(Tok::Comma);
      const TimeUnits hi = integer();
      expect(Tok::RBrack);
      if (hi < lo) throw SyntaxError("within interval has upper bound below lower bound", at.line, at.col);
      return within(inner, lo, hi);
    }
    if (accept(Tok::LParen)) {
      auto inner = expr();
      expect(Tok::RParen);
      return inner;
    }
    fail("expected a hold, '[' or '('");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaAst parse(std::string_view text) {
  FormulaAst ast = Parser(text).formula();
  ast.validate();
  return ast;
}

FormulaPtr parse_body(std::string_view text) { return Parser(text).body(); }

}  // namespace secrl
