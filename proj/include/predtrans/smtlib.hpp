#pragma once

// SMT-LIB 2.6 export. Variables become Int constants named by their staged
// spelling (|x|, |x'|, |x#3|); every constant and every bound variable is
// restricted to its declared domain.

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/error.hpp"
#include "predtrans/formula.hpp"

namespace predtrans {

namespace detail {

class SmtPrinter {
 public:
  explicit SmtPrinter(const std::vector<VarDecl>& decls) : decls_(decls) {}

  std::int64_t domain(const FormulaVar& v) const {
    for (const auto& d : decls_)
      if (d.name == v.base) return d.domain_size;
    throw FormulaError("variable " + v.name() + " has no declaration");
  }

  std::size_t position(const FormulaVar& v) const {
    for (std::size_t i = 0; i < decls_.size(); ++i)
      if (decls_[i].name == v.base) return i;
    return decls_.size();
  }

  static std::string symbol(const FormulaVar& v) { return "|" + v.name() + "|"; }

  static std::string number(std::int64_t n) {
    if (n >= 0) return std::to_string(n);
    // Negating INT64_MIN is undefined; spell it out by hand.
    if (n == std::numeric_limits<std::int64_t>::min()) return "(- 9223372036854775808)";
    return "(- " + std::to_string(-n) + ")";
  }

  std::string range(const FormulaVar& v) const {
    return "(and (<= 0 " + symbol(v) + ") (< " + symbol(v) + " " + std::to_string(domain(v)) + "))";
  }

  std::string term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Constant: return number(t.value);
      case Term::Kind::Variable: return symbol(t.var);
      case Term::Kind::Binary: {
        if (t.op == ArithOp::Mul && !is_constant(*t.lhs) && !is_constant(*t.rhs)) nonlinear_ = true;
        return std::string("(") + to_symbol(t.op) + " " + term(*t.lhs) + " " + term(*t.rhs) + ")";
      }
      case Term::Kind::Mod: return "(mod " + term(*t.lhs) + " " + std::to_string(t.value) + ")";
    }
    return "0";
  }

  std::string formula(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::True: return "true";
      case K::False: return "false";
      case K::Atom: return std::string("(") + to_symbol(f->op) + " " + term(*f->lhs) + " " + term(*f->rhs) + ")";
      case K::Not: return "(not " + formula(f->children[0]) + ")";
      case K::And:
      case K::Or: {
        std::string out = f.kind() == K::And ? "(and" : "(or";
        for (const auto& c : f->children) out += " " + formula(c);
        return out + ")";
      }
      case K::Implies: return "(=> " + formula(f->children[0]) + " " + formula(f->children[1]) + ")";
      case K::Exists:
        quantified_ = true;
        return "(exists ((" + symbol(f->bound) + " Int)) (and " + range(f->bound) + " " +
               formula(f->children[0]) + "))";
      case K::Forall:
        quantified_ = true;
        return "(forall ((" + symbol(f->bound) + " Int)) (=> " + range(f->bound) + " " +
               formula(f->children[0]) + "))";
    }
    return "true";
  }

  std::string logic() const {
    std::string arith = nonlinear_ ? "NIA" : "LIA";
    return quantified_ ? arith : "QF_" + arith;
  }

 private:
  static bool is_constant(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Constant: return true;
      case Term::Kind::Variable: return false;
      case Term::Kind::Binary: return is_constant(*t.lhs) && is_constant(*t.rhs);
      case Term::Kind::Mod: return is_constant(*t.lhs);
    }
    return false;
  }

  const std::vector<VarDecl>& decls_;
  bool nonlinear_ = false;
  bool quantified_ = false;
};

}  // namespace detail

/// A complete script asserting `f` over in-range values of its free
/// variables, ending in (check-sat). Free variables are declared in
/// declaration order, then by stage and index.
inline std::string to_smtlib(const Formula& f, const std::vector<VarDecl>& decls) {
  detail::SmtPrinter p(decls);
  std::string body = p.formula(f);

  std::vector<FormulaVar> vars = f->free_vars;
  for (const auto& v : vars) p.domain(v);
  std::stable_sort(vars.begin(), vars.end(), [&](const FormulaVar& a, const FormulaVar& b) {
    auto pa = p.position(a), pb = p.position(b);
    if (pa != pb) return pa < pb;
    return a.stage_ref() < b.stage_ref();
  });

  std::string out = "(set-logic " + p.logic() + ")\n";
  for (const auto& v : vars) out += "(declare-const " + detail::SmtPrinter::symbol(v) + " Int)\n";
  for (const auto& v : vars) out += "(assert " + p.range(v) + ")\n";
  out += "(assert " + body + ")\n";
  out += "(check-sat)\n";
  return out;
}

}  // namespace predtrans
