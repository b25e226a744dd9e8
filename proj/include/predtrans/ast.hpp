#pragma once

// Abstract syntax of the while language: arithmetic and boolean
// expressions, statements, variable declarations with finite domains, and
// the well-formedness checks run before any analysis.

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "predtrans/error.hpp"

namespace predtrans {

/// A program variable ranging over 0..domain_size-1.
struct VarDecl {
  std::string name;
  std::int64_t domain_size = 1;
  SourceSpan span{};

  friend bool operator==(const VarDecl& a, const VarDecl& b) {
    return a.name == b.name && a.domain_size == b.domain_size;
  }
};

/// Mathematical (always non-negative) remainder, used for modular assignment.
inline std::int64_t euclid_mod(std::int64_t value, std::int64_t modulus) {
  std::int64_t r = value % modulus;
  return r < 0 ? r + modulus : r;
}

enum class ArithOp { Add, Sub, Mul };
enum class CmpOp { Eq, Lt, Le };

inline const char* to_symbol(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
  }
  return "?";
}

inline const char* to_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
  }
  return "?";
}

inline bool compare(CmpOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
  }
  return false;
}

struct Expr;
struct BoolExpr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;
using StmtPtr = std::shared_ptr<const Stmt>;

/// Integer expression. Evaluation is over unbounded integers; reduction into
/// a variable's domain happens only on assignment.
struct Expr {
  enum class Kind { Constant, Variable, Binary };

  Kind kind = Kind::Constant;
  std::int64_t value = 0;
  std::string name;
  ArithOp op = ArithOp::Add;
  ExprPtr lhs;
  ExprPtr rhs;
  SourceSpan span{};

  static ExprPtr constant(std::int64_t v, SourceSpan s = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Constant;
    e->value = v;
    e->span = s;
    return e;
  }
  static ExprPtr variable(std::string n, SourceSpan s = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Variable;
    e->name = std::move(n);
    e->span = s;
    return e;
  }
  static ExprPtr binary(ArithOp o, ExprPtr l, ExprPtr r, SourceSpan s = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->op = o;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    e->span = s;
    return e;
  }
};

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Constant: return a.value == b.value;
    case Expr::Kind::Variable: return a.name == b.name;
    case Expr::Kind::Binary:
      return a.op == b.op && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
  }
  return false;
}

/// Guard conditions of if/while statements.
struct BoolExpr {
  enum class Kind { True, False, Compare, Not, And, Or };

  Kind kind = Kind::True;
  CmpOp cmp = CmpOp::Eq;
  ExprPtr lhs;
  ExprPtr rhs;
  BoolExprPtr left;
  BoolExprPtr right;
  SourceSpan span{};

  static BoolExprPtr constant(bool v, SourceSpan s = {}) {
    auto b = std::make_shared<BoolExpr>();
    b->kind = v ? Kind::True : Kind::False;
    b->span = s;
    return b;
  }
  static BoolExprPtr compare(CmpOp op, ExprPtr l, ExprPtr r, SourceSpan s = {}) {
    auto b = std::make_shared<BoolExpr>();
    b->kind = Kind::Compare;
    b->cmp = op;
    b->lhs = std::move(l);
    b->rhs = std::move(r);
    b->span = s;
    return b;
  }
  static BoolExprPtr negate(BoolExprPtr inner, SourceSpan s = {}) {
    auto b = std::make_shared<BoolExpr>();
    b->kind = Kind::Not;
    b->left = std::move(inner);
    b->span = s;
    return b;
  }
  static BoolExprPtr conj(BoolExprPtr l, BoolExprPtr r, SourceSpan s = {}) {
    auto b = std::make_shared<BoolExpr>();
    b->kind = Kind::And;
    b->left = std::move(l);
    b->right = std::move(r);
    b->span = s;
    return b;
  }
  static BoolExprPtr disj(BoolExprPtr l, BoolExprPtr r, SourceSpan s = {}) {
    auto b = std::make_shared<BoolExpr>();
    b->kind = Kind::Or;
    b->left = std::move(l);
    b->right = std::move(r);
    b->span = s;
    return b;
  }
};

inline bool operator==(const BoolExpr& a, const BoolExpr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return true;
    case BoolExpr::Kind::Compare:
      return a.cmp == b.cmp && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
    case BoolExpr::Kind::Not: return *a.left == *b.left;
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or: return *a.left == *b.left && *a.right == *b.right;
  }
  return false;
}

/// Statements. `first`/`second` carry the children: seq(first, second),
/// if(guard, then = first, else = second), while(guard, body = first).
struct Stmt {
  enum class Kind { Skip, Assign, Havoc, Abort, Seq, If, While };

  Kind kind = Kind::Skip;
  std::string target;
  ExprPtr rhs;
  BoolExprPtr guard;
  StmtPtr first;
  StmtPtr second;
  SourceSpan span{};

  const Stmt& then_branch() const { return *first; }
  const Stmt& else_branch() const { return *second; }
  const Stmt& body() const { return *first; }

  static StmtPtr skip(SourceSpan s = {}) { return make(Kind::Skip, s); }
  static StmtPtr abort(SourceSpan s = {}) { return make(Kind::Abort, s); }
  static StmtPtr assign(std::string t, ExprPtr e, SourceSpan s = {}) {
    auto st = make_mut(Kind::Assign, s);
    st->target = std::move(t);
    st->rhs = std::move(e);
    return st;
  }
  static StmtPtr havoc(std::string t, SourceSpan s = {}) {
    auto st = make_mut(Kind::Havoc, s);
    st->target = std::move(t);
    return st;
  }
  static StmtPtr seq(StmtPtr a, StmtPtr b, SourceSpan s = {}) {
    auto st = make_mut(Kind::Seq, s);
    st->first = std::move(a);
    st->second = std::move(b);
    return st;
  }
  static StmtPtr if_then_else(BoolExprPtr g, StmtPtr t, StmtPtr e, SourceSpan s = {}) {
    auto st = make_mut(Kind::If, s);
    st->guard = std::move(g);
    st->first = std::move(t);
    st->second = std::move(e);
    return st;
  }
  static StmtPtr while_do(BoolExprPtr g, StmtPtr b, SourceSpan s = {}) {
    auto st = make_mut(Kind::While, s);
    st->guard = std::move(g);
    st->first = std::move(b);
    return st;
  }

  /// Right-nested sequence of the given statements; skip when empty.
  static StmtPtr sequence(const std::vector<StmtPtr>& stmts) {
    if (stmts.empty()) return skip();
    StmtPtr acc = stmts.back();
    for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it) acc = seq(*it, acc);
    return acc;
  }

 private:
  static std::shared_ptr<Stmt> make_mut(Kind k, SourceSpan s) {
    auto st = std::make_shared<Stmt>();
    st->kind = k;
    st->span = s;
    return st;
  }
  static StmtPtr make(Kind k, SourceSpan s) { return make_mut(k, s); }
};

inline bool operator==(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Abort: return true;
    case Stmt::Kind::Assign: return a.target == b.target && *a.rhs == *b.rhs;
    case Stmt::Kind::Havoc: return a.target == b.target;
    case Stmt::Kind::Seq: return *a.first == *b.first && *a.second == *b.second;
    case Stmt::Kind::If:
      return *a.guard == *b.guard && *a.first == *b.first && *a.second == *b.second;
    case Stmt::Kind::While: return *a.guard == *b.guard && *a.first == *b.first;
  }
  return false;
}

struct Program {
  std::vector<VarDecl> decls;
  StmtPtr body = Stmt::skip();

  const VarDecl* find(const std::string& name) const {
    for (const auto& d : decls)
      if (d.name == name) return &d;
    return nullptr;
  }

  friend bool operator==(const Program& a, const Program& b) {
    return a.decls == b.decls && *a.body == *b.body;
  }
};

struct Diagnostic {
  enum class Code { UndeclaredVariable, DuplicateDeclaration, EmptyDomain };

  Code code;
  std::string message;
  SourceSpan span;
};

namespace detail {

class Validator {
 public:
  explicit Validator(const Program& p) : program_(p) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> seen;
    for (const auto& d : program_.decls) {
      if (!seen.insert(d.name).second)
        report(Diagnostic::Code::DuplicateDeclaration,
               "duplicate declaration of '" + d.name + "'", d.span);
      if (d.domain_size < 1)
        report(Diagnostic::Code::EmptyDomain,
               "domain of '" + d.name + "' must contain at least one value", d.span);
    }
    if (program_.body) stmt(*program_.body);
    return std::move(out_);
  }

 private:
  void report(Diagnostic::Code code, std::string msg, SourceSpan span) {
    out_.push_back({code, std::move(msg), span});
  }

  void name(const std::string& n, SourceSpan span) {
    if (!program_.find(n))
      report(Diagnostic::Code::UndeclaredVariable, "undeclared variable '" + n + "'", span);
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Constant: break;
      case Expr::Kind::Variable: name(e.name, e.span); break;
      case Expr::Kind::Binary:
        expr(*e.lhs);
        expr(*e.rhs);
        break;
    }
  }

  void cond(const BoolExpr& b) {
    switch (b.kind) {
      case BoolExpr::Kind::True:
      case BoolExpr::Kind::False: break;
      case BoolExpr::Kind::Compare:
        expr(*b.lhs);
        expr(*b.rhs);
        break;
      case BoolExpr::Kind::Not: cond(*b.left); break;
      case BoolExpr::Kind::And:
      case BoolExpr::Kind::Or:
        cond(*b.left);
        cond(*b.right);
        break;
    }
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Skip:
      case Stmt::Kind::Abort: break;
      case Stmt::Kind::Assign:
        name(s.target, s.span);
        expr(*s.rhs);
        break;
      case Stmt::Kind::Havoc: name(s.target, s.span); break;
      case Stmt::Kind::Seq:
        stmt(*s.first);
        stmt(*s.second);
        break;
      case Stmt::Kind::If:
        cond(*s.guard);
        stmt(*s.first);
        stmt(*s.second);
        break;
      case Stmt::Kind::While:
        cond(*s.guard);
        stmt(*s.first);
        break;
    }
  }

  const Program& program_;
  std::vector<Diagnostic> out_;
};

}  // namespace detail

/// One diagnostic per violated well-formedness rule, in source order of
/// declarations followed by statements. Empty means well-formed.
inline std::vector<Diagnostic> validate(const Program& program) {
  return detail::Validator(program).run();
}

inline bool contains(const Stmt& s, Stmt::Kind kind) {
  if (s.kind == kind) return true;
  switch (s.kind) {
    case Stmt::Kind::Seq:
    case Stmt::Kind::If: return contains(*s.first, kind) || contains(*s.second, kind);
    case Stmt::Kind::While: return contains(*s.first, kind);
    default: return false;
  }
}

/// True iff no havoc occurs anywhere in the body; expressions are
/// deterministic by construction.
inline bool is_syntactically_deterministic(const Program& program) {
  return !contains(*program.body, Stmt::Kind::Havoc);
}

/// Every while loop in `s` has a havoc-free body.
inline bool loops_are_havoc_free(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Seq:
    case Stmt::Kind::If: return loops_are_havoc_free(*s.first) && loops_are_havoc_free(*s.second);
    case Stmt::Kind::While: return !contains(*s.first, Stmt::Kind::Havoc);
    default: return true;
  }
}

}  // namespace predtrans
