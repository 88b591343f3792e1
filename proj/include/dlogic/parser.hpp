#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dlogic/formula.hpp"

namespace dlogic {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : std::runtime_error("parse error at " + std::to_string(position) + ": " + message), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

enum class Tok { Ident, Top, Bottom, Not, Box, Diamond, Diff, SomewhereElse, Everywhere, And, Or, Implies, Iff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto starts = [&](std::string_view lit) { return s.substr(i, lit.size()) == lit; };
    if (std::islower(static_cast<unsigned char>(c))) {
      while (i < s.size() && (std::islower(static_cast<unsigned char>(s[i])) ||
                              std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '_'))
        ++i;
      out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
      continue;
    }
    Tok kind;
    std::size_t len = 1;
    if (starts("<->")) {
      kind = Tok::Iff;
      len = 3;
    } else if (starts("->")) {
      kind = Tok::Implies;
      len = 2;
    } else if (starts("[]")) {
      kind = Tok::Box;
      len = 2;
    } else if (starts("<>")) {
      kind = Tok::Diamond;
      len = 2;
    } else {
      switch (c) {
        case '~': kind = Tok::Not; break;
        case '&': kind = Tok::And; break;
        case '|': kind = Tok::Or; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case 'D': kind = Tok::Diff; break;
        case 'E': kind = Tok::SomewhereElse; break;
        case 'A': kind = Tok::Everywhere; break;
        case 'T': kind = Tok::Top; break;
        case 'F': kind = Tok::Bottom; break;
        default:
          throw ParseError(start, std::string("unknown token '") + c + "'");
      }
    }
    out.push_back({kind, start, std::string(s.substr(start, len))});
    i += len;
  }
  out.push_back({Tok::End, s.size(), ""});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Formula run() {
    Formula f = iff();
    if (peek().kind == Tok::RParen) throw ParseError(peek().pos, "unbalanced parentheses: unexpected ')'");
    if (peek().kind != Tok::End) throw ParseError(peek().pos, "unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  Formula iff() {
    Formula f = imp();
    while (accept(Tok::Iff)) f = Formula::iff(f, imp());
    return f;
  }
  Formula imp() {
    Formula f = disj();
    if (accept(Tok::Implies)) return Formula::implies(f, imp());
    return f;
  }
  Formula disj() {
    Formula f = conj();
    while (accept(Tok::Or)) f = Formula::disj(f, conj());
    return f;
  }
  Formula conj() {
    Formula f = unary();
    while (accept(Tok::And)) f = Formula::conj(f, unary());
    return f;
  }
  Formula unary() {
    switch (peek().kind) {
      case Tok::Not: ++pos_; return Formula::negation(unary());
      case Tok::Box: ++pos_; return Formula::box(unary());
      case Tok::Diamond: ++pos_; return Formula::diamond(unary());
      case Tok::Diff: ++pos_; return Formula::diff(unary());
      case Tok::SomewhereElse: ++pos_; return Formula::somewhereElse(unary());
      case Tok::Everywhere: ++pos_; return Formula::everywhere(unary());
      default: return atom();
    }
  }
  Formula atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: ++pos_; return Formula::letter(t.text);
      case Tok::Top: ++pos_; return Formula::top();
      case Tok::Bottom: ++pos_; return Formula::bottom();
      case Tok::LParen: {
        ++pos_;
        Formula f = iff();
        if (!accept(Tok::RParen)) {
          if (peek().kind == Tok::End) throw ParseError(peek().pos, "unbalanced parentheses: missing ')'");
          throw ParseError(peek().pos, "expected ')' but found '" + peek().text + "'");
        }
        return f;
      }
      case Tok::End: throw ParseError(t.pos, "unexpected end of input");
      case Tok::RParen: throw ParseError(t.pos, "unbalanced parentheses: unexpected ')'");
      default: throw ParseError(t.pos, "expected a formula but found '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Printing levels, loosest binding first.
enum Level { kImp = 1, kOr = 2, kAnd = 3, kUnary = 4 };

inline bool isNegation(const Formula& f) { return f.isImplies() && f.rhs().isBottom(); }

inline std::string render(const Formula& f, int need);

inline std::string wrap(const std::string& s, int have, int need) { return have < need ? "(" + s + ")" : s; }

inline std::string renderAt(const Formula& f, int& level) {
  switch (f.op()) {
    case Op::Letter: level = kUnary; return f.name();
    case Op::Bottom: level = kUnary; return "F";
    case Op::Box: level = kUnary; return "[] " + render(f.operand(), kUnary);
    case Op::Diff: level = kUnary; return "D " + render(f.operand(), kUnary);
    case Op::Implies: break;
  }
  const Formula a = f.lhs();
  const Formula b = f.rhs();
  if (b.isBottom()) {
    level = kUnary;
    if (a.isBottom()) return "T";
    if (a.op() == Op::Box && isNegation(a.operand())) return "<> " + render(a.operand().lhs(), kUnary);
    if (a.op() == Op::Diff && isNegation(a.operand())) return "E " + render(a.operand().lhs(), kUnary);
    if (a.isImplies() && isNegation(a.rhs())) {
      level = kAnd;
      return render(a.lhs(), kAnd) + " & " + render(a.rhs().lhs(), kUnary);
    }
    return "~" + render(a, kUnary);
  }
  if (isNegation(a)) {
    level = kOr;
    return render(a.lhs(), kOr) + " | " + render(b, kAnd);
  }
  level = kImp;
  return render(a, kOr) + " -> " + render(b, kImp);
}

inline std::string render(const Formula& f, int need) {
  int have = kUnary;
  std::string s = renderAt(f, have);
  return wrap(s, have, need);
}

}  // namespace detail

/// Parses the ASCII syntax into core form. Throws ParseError.
inline Formula parse(std::string_view text) { return detail::Parser(text).run(); }

/// Renders f so that parse(render(f)) == f. Recognizes the sugar patterns
/// ~, &, |, <>, E and T; [∀] prints as its expansion.
inline std::string render(const Formula& f) { return detail::render(f, 0); }

/// Core-form tree, e.g. Implies(D(p), D(Box(p))).
inline std::string toAst(const Formula& f) {
  switch (f.op()) {
    case Op::Letter: return f.name();
    case Op::Bottom: return "Bot";
    case Op::Implies: return "Implies(" + toAst(f.lhs()) + ", " + toAst(f.rhs()) + ")";
    case Op::Box: return "Box(" + toAst(f.operand()) + ")";
    case Op::Diff: return "D(" + toAst(f.operand()) + ")";
  }
  return {};
}

}  // namespace dlogic
