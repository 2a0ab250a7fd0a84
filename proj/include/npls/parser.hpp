#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "npls/ast.hpp"
#include "npls/errors.hpp"

namespace npls {

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column, std::string token)
      : Error("parse-error", msg + " at " + std::to_string(line) + ":" +
                                 std::to_string(column) +
                                 (token.empty() ? "" : " near '" + token + "'")),
        line_(line),
        column_(column),
        token_(std::move(token)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  int line_, column_;
  std::string token_;
};

namespace detail {

enum class Tok {
  Ident, Variable, Int, Real, Str,
  LBrace, RBrace, LParen, RParen, Comma, Dot, Colon, ColonDash, Arrow,
  Amp, Pipe, Gt, Lt, Ge, Le, EqEq, Neq, Plus, Minus, Star, Slash,
  Backquote, SanctionRuleKw, End
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t int_value = 0;
  double real_value = 0;
  int line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t = next();
      bool end = t.kind == Tok::End;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        advance();
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      break;
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, line_, col_,
                     pos_ < src_.size() ? std::string(1, src_[pos_]) : "");
  }

  Token next() {
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    auto punct = [&](Tok k, int n) {
      t.kind = k;
      t.text = src_.substr(pos_, n);
      for (int i = 0; i < n; ++i) advance();
      return t;
    };
    switch (c) {
      case '{': return punct(Tok::LBrace, 1);
      case '}': return punct(Tok::RBrace, 1);
      case '(': return punct(Tok::LParen, 1);
      case ')': return punct(Tok::RParen, 1);
      case ',': return punct(Tok::Comma, 1);
      case '.': return punct(Tok::Dot, 1);
      case '&': return punct(Tok::Amp, 1);
      case '|': return punct(Tok::Pipe, 1);
      case '+': return punct(Tok::Plus, 1);
      case '*': return punct(Tok::Star, 1);
      case '/': return punct(Tok::Slash, 1);
      case '`': return punct(Tok::Backquote, 1);
      case '-':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>')
          return punct(Tok::Arrow, 2);
        return punct(Tok::Minus, 1);
      case ':':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-')
          return punct(Tok::ColonDash, 2);
        return punct(Tok::Colon, 1);
      case '>':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=')
          return punct(Tok::Ge, 2);
        return punct(Tok::Gt, 1);
      case '<':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=')
          return punct(Tok::Le, 2);
        return punct(Tok::Lt, 1);
      case '=':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=')
          return punct(Tok::EqEq, 2);
        fail("unexpected '='; did you mean '=='?");
      case '\\':
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == '=' &&
            src_[pos_ + 2] == '=')
          return punct(Tok::Neq, 3);
        fail("unexpected '\\'");
      case '"': {
        advance();
        std::string v;
        while (pos_ < src_.size() && src_[pos_] != '"') {
          char d = src_[pos_];
          if (d == '\\' && pos_ + 1 < src_.size()) {
            advance();
            d = src_[pos_];
          }
          v += d;
          advance();
        }
        if (pos_ >= src_.size()) fail("unterminated string literal");
        advance();
        t.kind = Tok::Str;
        t.text = std::move(v);
        return t;
      }
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(t);
    if (std::islower(static_cast<unsigned char>(c))) {
      std::string name;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        name += src_[pos_];
        advance();
      }
      if (name == "sanction" && src_.compare(pos_, 5, "-rule") == 0) {
        for (int i = 0; i < 5; ++i) advance();
        t.kind = Tok::SanctionRuleKw;
        t.text = "sanction-rule";
        return t;
      }
      t.kind = Tok::Ident;
      t.text = std::move(name);
      return t;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        name += src_[pos_];
        advance();
      }
      t.kind = Tok::Variable;
      t.text = std::move(name);
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Token lex_number(Token t) {
    std::string num;
    bool real = false;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      num += src_[pos_];
      advance();
    }
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      real = true;
      num += '.';
      advance();
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        num += src_[pos_];
        advance();
      }
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      std::string exp(1, src_[pos_]);
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        exp += src_[pos_];
        advance();
      }
      if (pos_ < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          exp += src_[pos_];
          advance();
        }
        num += exp;
        real = true;
      } else {
        // 'e' was the start of an identifier, not an exponent; rewind.
        while (pos_ > mark) {
          --pos_;
          --col_;
        }
      }
    }
    t.text = num;
    if (real) {
      t.kind = Tok::Real;
      t.real_value = std::stod(num);
    } else {
      t.kind = Tok::Int;
      t.int_value = std::stoll(num);
    }
    return t;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

inline bool is_reserved_functor(const std::string& name) {
  static const std::set<std::string> kw = {
      "np",  "norm",        "obligation", "permission", "prohibition",
      "fail", "if",         "fulfilled",  "unfulfilled", "inactive", "not"};
  return kw.count(name) > 0;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(Lexer(src).run()) {}

  ProgramAst program() {
    expect_ident("np");
    ProgramAst p;
    p.name = expect(Tok::Ident, "program name").text;
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      if (at(Tok::End))
        fail("unexpected end of input, expected '}' closing the program");
      p.items.push_back(item());
    }
    expect(Tok::RBrace, "'}'");
    if (!at(Tok::End)) fail("trailing input after program");
    return p;
  }

  // Entry points reused by the REPL / script runner.
  TermPtr term_only() {
    TermPtr t = arith_expr();
    if (!at(Tok::End)) fail("trailing input after term");
    return t;
  }
  FormulaPtr formula_only() {
    FormulaPtr f = formula();
    if (!at(Tok::End)) fail("trailing input after formula");
    return f;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_ident(const char* s) const {
    return at(Tok::Ident) && cur().text == s;
  }
  Token consume() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().column, cur().text);
  }

  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return consume();
  }
  void expect_ident(const char* s) {
    if (!at_ident(s)) fail(std::string("expected '") + s + "'");
    consume();
  }

  ProgramAst::Item item() {
    if (at_ident("norm")) return norm();
    if (at(Tok::SanctionRuleKw)) return srule();
    return rule();
  }

  InferenceRule rule() {
    InferenceRule r;
    r.head = predicate_atom();
    if (at(Tok::ColonDash)) {
      consume();
      r.body = formula();
    }
    expect(Tok::Dot, "'.' terminating rule");
    return r;
  }

  NormAst norm() {
    NormAst n;
    n.line = cur().line;
    n.column = cur().column;
    consume();  // norm
    n.id = expect(Tok::Ident, "norm identifier").text;
    expect(Tok::Colon, "':' after norm identifier");
    n.condition = formula();
    expect(Tok::Arrow, "'->' before norm consequence");
    if (!at(Tok::Ident) ||
        (cur().text != "fail" && cur().text != "obligation" &&
         cur().text != "permission" && cur().text != "prohibition"))
      fail("expected fail, obligation, permission, or prohibition");
    Token kw = consume();
    if (kw.text == "fail") {
      n.kind = ConsequenceKind::Fail;
      expect(Tok::LParen, "'('");
      n.fail_atom = predicate_atom();
      expect(Tok::RParen, "')'");
    } else if (kw.text == "obligation" || kw.text == "permission" ||
               kw.text == "prohibition") {
      n.kind = kw.text == "obligation"    ? ConsequenceKind::Obligation
               : kw.text == "permission"  ? ConsequenceKind::Permission
                                          : ConsequenceKind::Prohibition;
      expect(Tok::LParen, "'('");
      n.bearer = bearer_or_target();
      expect(Tok::Comma, "',' (obligation requires 4 arguments)");
      n.maintenance = formula();
      expect(Tok::Comma, "',' (obligation requires 4 arguments)");
      n.goal = formula();
      expect(Tok::Comma, "',' (obligation requires 4 arguments)");
      if (at(Tok::Backquote))
        n.deadline_time = time_spec();
      else
        n.deadline_formula = formula();
      expect(Tok::RParen, "')' closing deontic arguments");
    } else {
      fail("expected fail, obligation, permission, or prohibition");
    }
    while (at_ident("if")) {
      consume();
      Token ow = expect(Tok::Ident, "fulfilled, unfulfilled, or inactive");
      Outcome o;
      if (ow.text == "fulfilled") o = Outcome::Fulfilled;
      else if (ow.text == "unfulfilled") o = Outcome::Unfulfilled;
      else if (ow.text == "inactive") o = Outcome::Inactive;
      else fail("expected fulfilled, unfulfilled, or inactive");
      if (n.triggers[static_cast<int>(o)])
        throw ParseError("duplicate trigger clause for outcome " + ow.text,
                         ow.line, ow.column, ow.text);
      expect(Tok::Colon, "':' after trigger outcome");
      std::vector<TermPtr> calls;
      if (at(Tok::Ident) && !at_ident("if")) {
        calls.push_back(predicate_atom());
        while (at(Tok::Comma)) {
          consume();
          calls.push_back(predicate_atom());
        }
      }
      n.triggers[static_cast<int>(o)] = std::move(calls);
    }
    expect(Tok::Dot, "'.' terminating norm");
    return n;
  }

  SanctionRuleAst srule() {
    SanctionRuleAst r;
    r.line = cur().line;
    r.column = cur().column;
    consume();  // sanction-rule
    r.id = expect(Tok::Ident, "sanction-rule identifier").text;
    if (at(Tok::LParen)) {
      consume();
      std::set<std::string> seen;
      for (;;) {
        Token v = expect(Tok::Variable, "formal parameter variable");
        if (!seen.insert(v.text).second)
          throw ParseError("duplicate formal parameter " + v.text, v.line,
                           v.column, v.text);
        r.params.push_back(v.text);
        if (!at(Tok::Comma)) break;
        consume();
      }
      expect(Tok::RParen, "')' closing formal parameters");
    }
    if (at(Tok::Colon)) {
      consume();
      r.condition = formula();
    }
    expect(Tok::Arrow, "'->' before sanction");
    expect_ident("sanction");
    expect(Tok::LParen, "'('");
    r.target = bearer_or_target();
    expect(Tok::Comma, "',' (sanction takes exactly two arguments)");
    r.content = predicate_atom();
    expect(Tok::RParen, "')' (sanction takes exactly two arguments)");
    expect(Tok::Dot, "'.' terminating sanction-rule");

    // Variable closure: target/content variables must come from the
    // parameters or from the condition.
    std::set<std::string> bound(r.params.begin(), r.params.end());
    if (r.condition)
      for (const auto& v : r.condition->free_vars()) bound.insert(v);
    std::set<std::string> used;
    r.target->collect_vars(used);
    r.content->collect_vars(used);
    for (const auto& v : used)
      if (!bound.count(v))
        throw ParseError("variable " + v +
                             " in sanction is neither a parameter nor bound "
                             "by the condition",
                         r.line, r.column, v);
    return r;
  }

  TimeSpec time_spec() {
    expect(Tok::Backquote, "'`'");
    TimeSpec ts;
    if (at(Tok::Int))
      ts.amount = static_cast<double>(consume().int_value);
    else if (at(Tok::Real))
      ts.amount = consume().real_value;
    else
      fail("expected number in time specification");
    Token u = expect(Tok::Ident, "time unit");
    std::string name = u.text;
    if (name.size() > 1 && name.back() == 's' && name != "s") name.pop_back();
    if (name == "millisecond") ts.unit = TimeSpec::Unit::Millisecond;
    else if (name == "second") ts.unit = TimeSpec::Unit::Second;
    else if (name == "minute") ts.unit = TimeSpec::Unit::Minute;
    else if (name == "hour") ts.unit = TimeSpec::Unit::Hour;
    else if (name == "day") ts.unit = TimeSpec::Unit::Day;
    else fail("unknown time unit '" + u.text + "'");
    expect(Tok::Backquote, "closing '`'");
    return ts;
  }

  TermPtr bearer_or_target() {
    if (at(Tok::Variable)) return Term::var(consume().text);
    if (at(Tok::Ident)) {
      Token t = consume();
      if (is_reserved_functor(t.text))
        throw ParseError("reserved word '" + t.text + "' used as identifier",
                         t.line, t.column, t.text);
      return Term::constant(t.text);
    }
    fail("expected variable or identifier");
  }

  // formula := or_expr;  not > & > |
  FormulaPtr formula() { return or_expr(); }

  FormulaPtr or_expr() {
    FormulaPtr f = and_expr();
    while (at(Tok::Pipe)) {
      consume();
      f = Formula::disj(f, and_expr());
    }
    return f;
  }

  FormulaPtr and_expr() {
    FormulaPtr f = unary();
    while (at(Tok::Amp)) {
      consume();
      f = Formula::conj(f, unary());
    }
    return f;
  }

  FormulaPtr unary() {
    if (at_ident("not")) {
      consume();
      return Formula::negation(unary());
    }
    return primary();
  }

  FormulaPtr primary() {
    if (at(Tok::LParen)) {
      // Could be a parenthesized formula or a parenthesized arithmetic
      // expression starting a comparison; try the formula reading first.
      std::size_t mark = pos_;
      try {
        consume();
        FormulaPtr f = formula();
        expect(Tok::RParen, "')'");
        if (!starts_arith_continuation()) return f;
      } catch (const ParseError&) {
      }
      pos_ = mark;
    }
    return cmp_or_atom();
  }

  bool starts_arith_continuation() const {
    switch (cur().kind) {
      case Tok::Plus: case Tok::Minus: case Tok::Star: case Tok::Slash:
      case Tok::Gt: case Tok::Lt: case Tok::Ge: case Tok::Le:
      case Tok::EqEq: case Tok::Neq:
        return true;
      default:
        return false;
    }
  }

  std::optional<CmpOp> cmp_op() {
    switch (cur().kind) {
      case Tok::Gt: consume(); return CmpOp::Gt;
      case Tok::Lt: consume(); return CmpOp::Lt;
      case Tok::Ge: consume(); return CmpOp::Ge;
      case Tok::Le: consume(); return CmpOp::Le;
      case Tok::EqEq: consume(); return CmpOp::Eq;
      case Tok::Neq: consume(); return CmpOp::Neq;
      default: return std::nullopt;
    }
  }

  FormulaPtr cmp_or_atom() {
    Token start = cur();
    TermPtr lhs = arith_expr();
    if (auto op = cmp_op()) {
      TermPtr rhs = arith_expr();
      return Formula::cmp(*op, lhs, rhs);
    }
    if (lhs->kind() != Term::Kind::Constant &&
        lhs->kind() != Term::Kind::Compound)
      throw ParseError("expected a predicate, got " + to_string(lhs),
                       start.line, start.column, start.text);
    if (lhs->kind() == Term::Kind::Compound &&
        (lhs->name() == "+" || lhs->name() == "-" || lhs->name() == "*" ||
         lhs->name() == "/"))
      throw ParseError("arithmetic expression is not a formula", start.line,
                       start.column, start.text);
    return Formula::atom(lhs);
  }

  // Predicate-shaped term: identifier or identifier(args).
  TermPtr predicate_atom() {
    Token t = expect(Tok::Ident, "predicate");
    if (is_reserved_functor(t.text))
      throw ParseError("reserved word '" + t.text + "' used as predicate",
                       t.line, t.column, t.text);
    if (!at(Tok::LParen)) return Term::constant(t.text);
    consume();
    std::vector<TermPtr> args;
    args.push_back(arith_expr());
    while (at(Tok::Comma)) {
      consume();
      args.push_back(arith_expr());
    }
    expect(Tok::RParen, "')'");
    return Term::compound(t.text, std::move(args));
  }

  TermPtr arith_expr() {
    TermPtr t = arith_term();
    for (;;) {
      if (at(Tok::Plus)) {
        consume();
        t = Term::compound("+", {t, arith_term()});
      } else if (at(Tok::Minus)) {
        consume();
        t = Term::compound("-", {t, arith_term()});
      } else {
        return t;
      }
    }
  }

  TermPtr arith_term() {
    TermPtr t = arith_factor();
    for (;;) {
      if (at(Tok::Star)) {
        consume();
        t = Term::compound("*", {t, arith_factor()});
      } else if (at(Tok::Slash)) {
        consume();
        t = Term::compound("/", {t, arith_factor()});
      } else {
        return t;
      }
    }
  }

  TermPtr arith_factor() {
    switch (cur().kind) {
      case Tok::Int: return Term::integer(consume().int_value);
      case Tok::Real: return Term::real(consume().real_value);
      case Tok::Str: return Term::str(consume().text);
      case Tok::Variable: return Term::var(consume().text);
      case Tok::Ident: return predicate_atom();
      case Tok::LParen: {
        consume();
        TermPtr t = arith_expr();
        expect(Tok::RParen, "')'");
        return t;
      }
      case Tok::Minus: {
        Token m = consume();
        if (at(Tok::Int)) return Term::integer(-consume().int_value);
        if (at(Tok::Real)) return Term::real(-consume().real_value);
        throw ParseError("unary minus requires a number literal", m.line,
                         m.column, m.text);
      }
      default:
        fail("expected term");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parse a complete NPL(s) program; throws ParseError on syntax errors.
inline ProgramAst parse_program(const std::string& text) {
  return detail::Parser(text).program();
}

// Single-term / single-formula entry points for scripts and the REPL.
inline TermPtr parse_term(const std::string& text) {
  return detail::Parser(text).term_only();
}
inline FormulaPtr parse_formula(const std::string& text) {
  return detail::Parser(text).formula_only();
}

}  // namespace npls
