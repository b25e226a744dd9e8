#pragma once

// Pseudorandom programs, postconditions and formulas for property tests.
// Everything is a deterministic function of the seed.

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/error.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/oracle.hpp"

namespace predtrans {

struct GeneratorConfig {
  std::uint32_t max_vars = 2;
  std::int64_t domain_size = 4;
  std::uint32_t max_depth = 3;
  bool allow_havoc = false;
  bool allow_abort = false;
  bool require_termination = false;
  std::uint64_t seed = 0;
  /// Loops nested inside loop bodies; 0 keeps loop bodies loop-free.
  std::uint32_t max_loop_nesting = 0;
  bool allow_loops = true;
  /// Attempts before giving up on require_termination.
  std::uint32_t resample_budget = 64;

  void validate() const {
    if (max_vars < 1) throw CheckError("generator needs max_vars >= 1");
    if (domain_size < 2) throw CheckError("generator needs domain_size >= 2");
    if (max_depth < 1) throw CheckError("generator needs max_depth >= 1");
  }
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  bool chance(std::uint32_t percent) { return below(100) < percent; }
  std::mt19937_64& rng() { return rng_; }

  std::vector<VarDecl> decls(std::uint32_t max_vars, std::int64_t domain_size, bool exact_count = false) {
    static const char* names[] = {"x", "y", "z", "w", "u", "v"};
    std::uint32_t n = exact_count ? max_vars : 1 + static_cast<std::uint32_t>(below(max_vars));
    std::vector<VarDecl> out;
    for (std::uint32_t i = 0; i < n; ++i) {
      std::string name = i < 6 ? names[i] : "v" + std::to_string(i);
      out.push_back({name, domain_size, {}});
    }
    return out;
  }

  ExprPtr expr(const std::vector<VarDecl>& decls, int depth) {
    const std::int64_t max_const = decls.front().domain_size;
    if (depth <= 0 || chance(55)) {
      if (chance(60)) return Expr::variable(decls[below(decls.size())].name);
      return Expr::constant(static_cast<std::int64_t>(below(static_cast<std::uint64_t>(max_const))));
    }
    static const ArithOp ops[] = {ArithOp::Add, ArithOp::Add, ArithOp::Sub, ArithOp::Mul};
    return Expr::binary(ops[below(4)], expr(decls, depth - 1), expr(decls, depth - 1));
  }

  BoolExprPtr cond(const std::vector<VarDecl>& decls, int depth) {
    if (depth <= 0 || chance(50)) {
      if (chance(4)) return BoolExpr::constant(chance(50));
      static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Lt, CmpOp::Le};
      return BoolExpr::compare(ops[below(3)], expr(decls, 1), expr(decls, 1));
    }
    switch (below(3)) {
      case 0: return BoolExpr::negate(cond(decls, depth - 1));
      case 1: return BoolExpr::conj(cond(decls, depth - 1), cond(decls, depth - 1));
      default: return BoolExpr::disj(cond(decls, depth - 1), cond(decls, depth - 1));
    }
  }

  /// A quantifier-free postcondition over the current-stage variables.
  Formula post(const std::vector<VarDecl>& decls, int depth = 2) {
    return to_formula(*cond(decls, depth), StageRef::current());
  }

  StmtPtr assignment(const std::vector<VarDecl>& decls, const std::set<std::string>& frozen = {}) {
    std::vector<const VarDecl*> targets;
    for (const auto& d : decls)
      if (!frozen.count(d.name)) targets.push_back(&d);
    if (targets.empty()) return Stmt::skip();
    return Stmt::assign(targets[below(targets.size())]->name, expr(decls, 2));
  }

  StmtPtr stmt(const GeneratorConfig& c, const std::vector<VarDecl>& decls, std::uint32_t depth,
               std::set<std::string> frozen, std::uint32_t loop_level) {
    if (depth <= 1) return atomic(c, decls, frozen);
    const std::uint64_t pick = below(100);
    if (pick < 25) return atomic(c, decls, frozen);
    if (pick < 55)
      return Stmt::seq(stmt(c, decls, depth - 1, frozen, loop_level), stmt(c, decls, depth - 1, frozen, loop_level));
    if (pick < 80 || !c.allow_loops || loop_level > c.max_loop_nesting)
      return Stmt::if_then_else(cond(decls, 1), stmt(c, decls, depth - 1, frozen, loop_level),
                                stmt(c, decls, depth - 1, frozen, loop_level));
    return loop(c, decls, depth, std::move(frozen), loop_level);
  }

 private:
  StmtPtr atomic(const GeneratorConfig& c, const std::vector<VarDecl>& decls, const std::set<std::string>& frozen) {
    const std::uint64_t pick = below(100);
    if (c.allow_abort && pick < 6) return Stmt::abort();
    if (c.allow_havoc && pick < 22) {
      std::vector<std::string> targets;
      for (const auto& d : decls)
        if (!frozen.count(d.name)) targets.push_back(d.name);
      if (!targets.empty()) return Stmt::havoc(targets[below(targets.size())]);
    }
    if (pick > 92) return Stmt::skip();
    return assignment(decls, frozen);
  }

  StmtPtr loop(const GeneratorConfig& c, const std::vector<VarDecl>& decls, std::uint32_t depth,
               std::set<std::string> frozen, std::uint32_t loop_level) {
    if (!c.require_termination)
      return Stmt::while_do(cond(decls, 1), stmt(c, decls, depth - 1, frozen, loop_level + 1));
    // Counting loop over a variable the body may not write:
    //   while (v < bound) do { body; v := v + 1 }
    std::vector<const VarDecl*> free;
    for (const auto& d : decls)
      if (!frozen.count(d.name)) free.push_back(&d);
    if (free.empty()) return atomic(c, decls, frozen);
    const VarDecl& v = *free[below(free.size())];
    auto limit = static_cast<std::int64_t>(1 + below(static_cast<std::uint64_t>(v.domain_size - 1)));
    frozen.insert(v.name);
    StmtPtr body = stmt(c, decls, depth - 1, frozen, loop_level + 1);
    StmtPtr step = Stmt::assign(v.name, Expr::binary(ArithOp::Add, Expr::variable(v.name), Expr::constant(1)));
    BoolExprPtr guard = BoolExpr::compare(CmpOp::Lt, Expr::variable(v.name), Expr::constant(limit));
    return Stmt::while_do(guard, Stmt::seq(body, step));
  }

  std::mt19937_64 rng_;
};

/// A well-formed program honoring `config`. With require_termination, the
/// oracle must confirm that no start state diverges; candidates are
/// resampled until one passes or the budget runs out (CheckError).
inline Program generate_program(const GeneratorConfig& config) {
  config.validate();
  Generator g(config.seed);
  for (std::uint32_t attempt = 0; attempt < config.resample_budget; ++attempt) {
    Program p;
    p.decls = g.decls(config.max_vars, config.domain_size);
    p.body = g.stmt(config, p.decls, config.max_depth, {}, 0);
    if (!config.require_termination) return p;
    OracleTable t = Oracle(*p.body, p.decls).table();
    bool diverges = false;
    for (bool d : t.diverges) diverges = diverges || d;
    if (!diverges) return p;
  }
  throw CheckError("no terminating program found within " + std::to_string(config.resample_budget) +
                   " attempts (seed " + std::to_string(config.seed) + ")");
}

/// A random quantifier-free postcondition over `decls`.
inline Formula generate_post(const std::vector<VarDecl>& decls, std::uint64_t seed, int depth = 2) {
  return Generator(seed).post(decls, depth);
}

/// A program consisting of one assignment.
inline Program generate_assignment(const GeneratorConfig& config) {
  config.validate();
  Generator g(config.seed);
  Program p;
  p.decls = g.decls(config.max_vars, config.domain_size);
  p.body = g.assignment(p.decls);
  return p;
}

/// A random formula over the current, primed and indexed copies of `decls`,
/// with quantifiers over primed and indexed copies. Free variables are the
/// current and primed copies plus indexed copy 1.
inline Formula generate_formula(const std::vector<VarDecl>& decls, std::uint64_t seed, int depth = 4) {
  Generator g(seed);
  std::vector<StageRef> stages{StageRef::current(), StageRef::primed(), StageRef::indexed(1)};
  std::uint32_t next_index = 2;

  std::function<TermPtr(int, const std::vector<StageRef>&)> term = [&](int d, const std::vector<StageRef>& in_scope) {
    if (d <= 0 || g.chance(50)) {
      if (g.chance(65)) {
        const VarDecl& v = decls[g.below(decls.size())];
        return Term::variable(FormulaVar::at(v.name, in_scope[g.below(in_scope.size())]));
      }
      return Term::constant(static_cast<std::int64_t>(g.below(6)) - 1);
    }
    if (g.chance(15)) return Term::mod(term(d - 1, in_scope), 1 + static_cast<std::int64_t>(g.below(4)));
    static const ArithOp ops[] = {ArithOp::Add, ArithOp::Sub, ArithOp::Mul};
    return Term::binary(ops[g.below(3)], term(d - 1, in_scope), term(d - 1, in_scope));
  };

  std::function<Formula(int, std::vector<StageRef>)> formula = [&](int d, std::vector<StageRef> in_scope) -> Formula {
    if (d <= 0 || g.chance(25)) {
      if (g.chance(5)) return Formula::truth(g.chance(50));
      static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Lt, CmpOp::Le};
      return Formula::atom(ops[g.below(3)], term(2, in_scope), term(2, in_scope));
    }
    switch (g.below(8)) {
      case 0: return !formula(d - 1, in_scope);
      case 1: return formula(d - 1, in_scope) && formula(d - 1, in_scope);
      case 2: return formula(d - 1, in_scope) || formula(d - 1, in_scope);
      case 3: return Formula::implication(formula(d - 1, in_scope), formula(d - 1, in_scope));
      case 4:
        return Formula::conjunction({formula(d - 1, in_scope), formula(d - 1, in_scope), formula(d - 1, in_scope)});
      default: {
        // Binds one variable of a fresh or the primed copy.
        const VarDecl& v = decls[g.below(decls.size())];
        StageRef at = g.chance(30) ? StageRef::primed() : StageRef::indexed(next_index++);
        FormulaVar bound = FormulaVar::at(v.name, at);
        in_scope.push_back(at);
        Formula body = formula(d - 1, in_scope);
        return g.chance(50) ? Formula::exists(bound, v.domain_size, body) : Formula::forall(bound, v.domain_size, body);
      }
    }
  };
  return formula(depth, stages);
}

}  // namespace predtrans
