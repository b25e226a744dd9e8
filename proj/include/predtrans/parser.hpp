#pragma once

// Concrete syntax of `.whl` programs:
//
//   program   := decl* stmt*
//   decl      := 'var' IDENT 'in' INT '..' INT ';'          (lower bound 0)
//   stmt      := 'skip' ';' | 'abort' ';' | 'havoc' IDENT ';'
//              | IDENT ':=' expr ';'
//              | 'if' '(' cond ')' 'then' block ('else' block)? ';'
//              | 'while' '(' cond ')' 'do' block ';'
//              | block ';'
//   block     := '{' stmt* '}'
//   cond      := conj ('||' conj)*
//   conj      := neg ('&&' neg)*
//   neg       := '!' neg | 'true' | 'false' | expr cmp expr | '(' cond ')'
//   cmp       := '=' | '<' | '<=' | '!=' | '>' | '>='
//   expr      := term (('+' | '-') term)*
//   term      := factor ('*' factor)*
//   factor    := INT | IDENT | '(' expr ')'
//
// Comments run from '//' to end of line. `!=`, `>` and `>=` are sugar for
// the negated or swapped core comparisons.

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/error.hpp"
#include "predtrans/formula.hpp"

namespace predtrans {

namespace detail {

enum class Tok {
  Ident, Int, Var, In, Skip, Abort, Havoc, If, Then, Else, While, Do, True, False,
  DotDot, Semi, Assign, Eq, Ne, Lt, Le, Gt, Ge, Not, AndAnd, OrOr,
  Plus, Minus, Star, LParen, RParen, LBrace, RBrace, End
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src) {
  static const std::pair<std::string_view, Tok> keywords[] = {
      {"var", Tok::Var},     {"in", Tok::In},       {"skip", Tok::Skip}, {"abort", Tok::Abort},
      {"havoc", Tok::Havoc}, {"if", Tok::If},       {"then", Tok::Then}, {"else", Tok::Else},
      {"while", Tok::While}, {"do", Tok::Do},       {"true", Tok::True}, {"false", Tok::False}};
  static const std::pair<std::string_view, Tok> symbols[] = {
      {"..", Tok::DotDot}, {":=", Tok::Assign}, {"<=", Tok::Le},     {">=", Tok::Ge},
      {"!=", Tok::Ne},     {"&&", Tok::AndAnd}, {"||", Tok::OrOr},   {";", Tok::Semi},
      {"=", Tok::Eq},      {"<", Tok::Lt},      {">", Tok::Gt},      {"!", Tok::Not},
      {"+", Tok::Plus},    {"-", Tok::Minus},   {"*", Tok::Star},    {"(", Tok::LParen},
      {")", Tok::RParen},  {"{", Tok::LBrace},  {"}", Tok::RBrace}};

  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      std::string_view word = src.substr(start, i - start);
      Tok kind = Tok::Ident;
      for (const auto& [kw, k] : keywords)
        if (kw == word) kind = k;
      out.push_back({kind, std::string(word), {start, i}});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i - start > 18) throw ParseError("integer literal too large", {start, i});
      out.push_back({Tok::Int, std::string(src.substr(start, i - start)), {start, i}});
      continue;
    }
    bool matched = false;
    for (const auto& [sym, k] : symbols) {
      if (src.substr(i, sym.size()) == sym) {
        i += sym.size();
        out.push_back({k, std::string(sym), {start, i}});
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", {start, start + 1});
  }
  out.push_back({Tok::End, "", {src.size(), src.size()}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(lex(src)) {}

  Program program() {
    Program p;
    while (at(Tok::Var)) p.decls.push_back(decl());
    std::vector<StmtPtr> body;
    while (!at(Tok::End)) body.push_back(stmt());
    p.body = Stmt::sequence(body);
    return p;
  }

  BoolExprPtr standalone_condition() {
    auto c = cond();
    expect(Tok::End, "end of input");
    return c;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) {
      const Token& t = peek();
      throw ParseError(std::string("expected ") + what + ", found " +
                           (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"),
                       t.span);
    }
    return advance();
  }

  std::int64_t integer() {
    const Token& t = expect(Tok::Int, "integer");
    return std::stoll(t.text);
  }

  VarDecl decl() {
    std::size_t start = expect(Tok::Var, "'var'").span.start;
    const Token& name = expect(Tok::Ident, "variable name");
    expect(Tok::In, "'in'");
    const Token& lo_tok = peek();
    std::int64_t lo = integer();
    if (lo != 0) throw ParseError("domains must start at 0", lo_tok.span);
    expect(Tok::DotDot, "'..'");
    std::int64_t hi = integer();
    std::size_t end = expect(Tok::Semi, "';'").span.end;
    return VarDecl{name.text, hi + 1, {start, end}};
  }

  StmtPtr block() {
    expect(Tok::LBrace, "'{'");
    std::vector<StmtPtr> body;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) expect(Tok::RBrace, "'}'");
      body.push_back(stmt());
    }
    advance();
    return Stmt::sequence(body);
  }

  StmtPtr stmt() {
    const Token& first = peek();
    const std::size_t start = first.span.start;
    StmtPtr s;
    switch (first.kind) {
      case Tok::Skip:
        advance();
        s = Stmt::skip();
        break;
      case Tok::Abort:
        advance();
        s = Stmt::abort();
        break;
      case Tok::Havoc: {
        advance();
        const Token& name = expect(Tok::Ident, "variable name");
        s = Stmt::havoc(name.text, {start, name.span.end});
        break;
      }
      case Tok::Ident: {
        const Token& name = advance();
        expect(Tok::Assign, "':='");
        auto rhs = expr();
        s = Stmt::assign(name.text, rhs, {start, rhs->span.end});
        break;
      }
      case Tok::If: {
        advance();
        expect(Tok::LParen, "'('");
        auto g = cond();
        expect(Tok::RParen, "')'");
        expect(Tok::Then, "'then'");
        auto t = block();
        StmtPtr e = Stmt::skip();
        if (at(Tok::Else)) {
          advance();
          e = block();
        }
        s = Stmt::if_then_else(g, t, e, {start, peek().span.start});
        break;
      }
      case Tok::While: {
        advance();
        expect(Tok::LParen, "'('");
        auto g = cond();
        expect(Tok::RParen, "')'");
        expect(Tok::Do, "'do'");
        auto b = block();
        s = Stmt::while_do(g, b, {start, peek().span.start});
        break;
      }
      case Tok::LBrace: s = block(); break;
      default:
        throw ParseError(first.kind == Tok::End ? "expected statement, found end of input"
                                                : "expected statement, found '" + first.text + "'",
                         first.span);
    }
    // The separator may be left off before '}' and at the end of input.
    if (!at(Tok::RBrace) && !at(Tok::End)) expect(Tok::Semi, "';'");
    if (!s) s = Stmt::skip();
    return s;
  }

  BoolExprPtr cond() {
    auto l = conj();
    while (at(Tok::OrOr)) {
      advance();
      auto r = conj();
      l = BoolExpr::disj(l, r, {l->span.start, r->span.end});
    }
    return l;
  }

  BoolExprPtr conj() {
    auto l = neg();
    while (at(Tok::AndAnd)) {
      advance();
      auto r = neg();
      l = BoolExpr::conj(l, r, {l->span.start, r->span.end});
    }
    return l;
  }

  BoolExprPtr neg() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not: {
        advance();
        auto inner = neg();
        return BoolExpr::negate(inner, {t.span.start, inner->span.end});
      }
      case Tok::True:
      case Tok::False:
        advance();
        return BoolExpr::constant(t.kind == Tok::True, t.span);
      case Tok::LParen: {
        // Either a parenthesized condition or a comparison whose left
        // operand is parenthesized; try the comparison first.
        const std::size_t saved = pos_;
        try {
          return comparison();
        } catch (const ParseError& as_comparison) {
          pos_ = saved;
          try {
            advance();
            auto c = cond();
            expect(Tok::RParen, "')'");
            return c;
          } catch (const ParseError& as_group) {
            throw as_group.span().start >= as_comparison.span().start ? as_group : as_comparison;
          }
        }
      }
      default: return comparison();
    }
  }

  BoolExprPtr comparison() {
    auto l = expr();
    const Token& op = peek();
    CmpOp cmp;
    bool swap = false;
    bool negate = false;
    switch (op.kind) {
      case Tok::Eq: cmp = CmpOp::Eq; break;
      case Tok::Lt: cmp = CmpOp::Lt; break;
      case Tok::Le: cmp = CmpOp::Le; break;
      case Tok::Ne: cmp = CmpOp::Eq, negate = true; break;
      case Tok::Gt: cmp = CmpOp::Lt, swap = true; break;
      case Tok::Ge: cmp = CmpOp::Le, swap = true; break;
      default:
        throw ParseError(op.kind == Tok::End ? "expected comparison operator, found end of input"
                                             : "expected comparison operator, found '" + op.text + "'",
                         op.span);
    }
    advance();
    auto r = expr();
    SourceSpan span{l->span.start, r->span.end};
    auto c = swap ? BoolExpr::compare(cmp, r, l, span) : BoolExpr::compare(cmp, l, r, span);
    return negate ? BoolExpr::negate(c, span) : c;
  }

  ExprPtr expr() {
    auto l = term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      ArithOp op = advance().kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
      auto r = term();
      l = Expr::binary(op, l, r, {l->span.start, r->span.end});
    }
    return l;
  }

  ExprPtr term() {
    auto l = factor();
    while (at(Tok::Star)) {
      advance();
      auto r = factor();
      l = Expr::binary(ArithOp::Mul, l, r, {l->span.start, r->span.end});
    }
    return l;
  }

  ExprPtr factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        advance();
        return Expr::constant(std::stoll(t.text), t.span);
      }
      case Tok::Ident: advance(); return Expr::variable(t.text, t.span);
      case Tok::LParen: {
        advance();
        auto e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        throw ParseError(t.kind == Tok::End ? "expected expression, found end of input"
                                            : "expected expression, found '" + t.text + "'",
                         t.span);
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

inline void check_declared(const BoolExpr& b, const std::vector<VarDecl>& decls);

inline void check_declared(const Expr& e, const std::vector<VarDecl>& decls) {
  switch (e.kind) {
    case Expr::Kind::Constant: return;
    case Expr::Kind::Variable:
      for (const auto& d : decls)
        if (d.name == e.name) return;
      throw ParseError("undeclared variable '" + e.name + "'", e.span);
    case Expr::Kind::Binary:
      check_declared(*e.lhs, decls);
      check_declared(*e.rhs, decls);
      return;
  }
}

inline void check_declared(const BoolExpr& b, const std::vector<VarDecl>& decls) {
  switch (b.kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return;
    case BoolExpr::Kind::Compare:
      check_declared(*b.lhs, decls);
      check_declared(*b.rhs, decls);
      return;
    case BoolExpr::Kind::Not: check_declared(*b.left, decls); return;
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or:
      check_declared(*b.left, decls);
      check_declared(*b.right, decls);
      return;
  }
}

}  // namespace detail

/// Parses a whole `.whl` program. Throws ParseError at the earliest failing
/// token. Undeclared names are left for `validate`.
inline Program parse_program(std::string_view source) { return detail::Parser(source).program(); }

/// Parses a guard condition over `decls`; undeclared names are errors.
inline BoolExprPtr parse_condition(std::string_view source, const std::vector<VarDecl>& decls) {
  auto c = detail::Parser(source).standalone_condition();
  detail::check_declared(*c, decls);
  return c;
}

/// Parses a quantifier-free postcondition over the current-stage variables.
inline Formula parse_formula(std::string_view source, const std::vector<VarDecl>& decls) {
  return to_formula(*parse_condition(source, decls), StageRef::current());
}

// ---------------------------------------------------------------------------
// Pretty printing.

namespace detail {

inline int precedence(const Expr& e) {
  if (e.kind != Expr::Kind::Binary) return 3;
  return e.op == ArithOp::Mul ? 2 : 1;
}

inline void print_expr(const Expr& e, std::string& out, int required) {
  const int prec = precedence(e);
  const bool paren = prec < required;
  if (paren) out += '(';
  switch (e.kind) {
    case Expr::Kind::Constant: out += std::to_string(e.value); break;
    case Expr::Kind::Variable: out += e.name; break;
    case Expr::Kind::Binary:
      print_expr(*e.lhs, out, prec);
      out += ' ';
      out += to_symbol(e.op);
      out += ' ';
      print_expr(*e.rhs, out, prec + 1);
      break;
  }
  if (paren) out += ')';
}

inline int precedence(const BoolExpr& b) {
  switch (b.kind) {
    case BoolExpr::Kind::Or: return 1;
    case BoolExpr::Kind::And: return 2;
    case BoolExpr::Kind::Not: return 3;
    default: return 4;
  }
}

inline void print_cond(const BoolExpr& b, std::string& out, int required) {
  const int prec = precedence(b);
  const bool paren = prec < required;
  if (paren) out += '(';
  switch (b.kind) {
    case BoolExpr::Kind::True: out += "true"; break;
    case BoolExpr::Kind::False: out += "false"; break;
    case BoolExpr::Kind::Compare:
      print_expr(*b.lhs, out, 0);
      out += ' ';
      out += to_symbol(b.cmp);
      out += ' ';
      print_expr(*b.rhs, out, 0);
      break;
    case BoolExpr::Kind::Not:
      out += '!';
      // A comparison under '!' is always parenthesized.
      print_cond(*b.left, out, 5);
      break;
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or:
      print_cond(*b.left, out, prec);
      out += b.kind == BoolExpr::Kind::And ? " && " : " || ";
      print_cond(*b.right, out, prec + 1);
      break;
  }
  if (paren) out += ')';
}

inline void print_stmt(const Stmt& s, std::string& out, int indent);

inline void print_body(const Stmt& s, std::string& out, int indent) {
  out += "{\n";
  print_stmt(s, out, indent + 1);
  out += std::string(static_cast<std::size_t>(indent) * 2, ' ') + "}";
}

inline void print_stmt(const Stmt& s, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::Seq:
      // A left-nested sequence needs an explicit block to survive reparsing.
      if (s.first->kind == Stmt::Kind::Seq) {
        out += pad;
        print_body(*s.first, out, indent);
        out += ";\n";
      } else {
        print_stmt(*s.first, out, indent);
      }
      print_stmt(*s.second, out, indent);
      return;
    case Stmt::Kind::Skip: out += pad + "skip;\n"; return;
    case Stmt::Kind::Abort: out += pad + "abort;\n"; return;
    case Stmt::Kind::Havoc: out += pad + "havoc " + s.target + ";\n"; return;
    case Stmt::Kind::Assign:
      out += pad + s.target + " := ";
      print_expr(*s.rhs, out, 0);
      out += ";\n";
      return;
    case Stmt::Kind::If:
      out += pad + "if (";
      print_cond(*s.guard, out, 0);
      out += ") then ";
      print_body(s.then_branch(), out, indent);
      out += " else ";
      print_body(s.else_branch(), out, indent);
      out += ";\n";
      return;
    case Stmt::Kind::While:
      out += pad + "while (";
      print_cond(*s.guard, out, 0);
      out += ") do ";
      print_body(s.body(), out, indent);
      out += ";\n";
      return;
  }
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_expr(e, out, 0);
  return out;
}

inline std::string to_string(const BoolExpr& b) {
  std::string out;
  detail::print_cond(b, out, 0);
  return out;
}

/// Statement text, one statement per line, bodies fully braced.
inline std::string to_string(const Stmt& s) {
  std::string out;
  detail::print_stmt(s, out, 0);
  return out;
}

/// Canonical program text; parse_program(pretty_print(p)) == p.
inline std::string pretty_print(const Program& p) {
  std::string out;
  for (const auto& d : p.decls) out += "var " + d.name + " in 0.." + std::to_string(d.domain_size - 1) + ";\n";
  detail::print_stmt(*p.body, out, 0);
  return out;
}

}  // namespace predtrans
