#pragma once

// Transition relations rho(x, x') of statements. Loops are unrolled into a
// finite disjunction of summands, one per iteration count 0..bound; each
// summand chains fresh copies x#k of the state through the body relation.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/evaluate.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/state_space.hpp"

namespace predtrans {

struct TransitionRelation {
  Formula rho;
  std::uint64_t unroll_bound = 0;
  /// The bounded construction provably equals the unbounded one. When false
  /// the relation may be missing long runs; see the checker's certification.
  bool exact = true;
  std::vector<VarDecl> decls;
};

/// Product of all domain sizes; throws CeilingExceeded past the ceiling.
inline std::uint64_t default_unroll_bound(const std::vector<VarDecl>& decls, const Limits& limits = {}) {
  return state_count(decls, limits.state_ceiling);
}

namespace detail {

class RhoBuilder {
 public:
  RhoBuilder(const std::vector<VarDecl>& decls, std::uint64_t bound, std::uint32_t first_fresh = 1)
      : decls_(decls), bound_(bound), next_(first_fresh) {}

  std::uint32_t fresh() { return next_++; }

  /// Relation of `s` between the copies `from` and `to` of the state.
  Formula build(const Stmt& s, StageRef from, StageRef to) {
    switch (s.kind) {
      case Stmt::Kind::Skip: return frame(from, to, nullptr);
      case Stmt::Kind::Abort: return Formula::truth(false);
      case Stmt::Kind::Assign: {
        const VarDecl& d = decl(s.target);
        auto value = Term::mod(to_term(*s.rhs, from), d.domain_size);
        return Formula::conjunction({eq(var(d.name, to), value), frame(from, to, &s.target)});
      }
      case Stmt::Kind::Havoc: return frame(from, to, &s.target);
      case Stmt::Kind::Seq: {
        const StageRef mid = StageRef::indexed(fresh());
        Formula body = build(*s.first, from, mid) && build(*s.second, mid, to);
        return close(Formula::Kind::Exists, mid, body);
      }
      case Stmt::Kind::If: {
        Formula g = to_formula(*s.guard, from);
        Formula t = build(*s.first, from, to);
        Formula e = build(*s.second, from, to);
        return (g && t) || (!g && e);
      }
      case Stmt::Kind::While: {
        std::vector<Formula> summands;
        for (std::uint64_t i = 0; i <= bound_; ++i) summands.push_back(summand(s, from, to, i));
        return Formula::disjunction(std::move(summands));
      }
    }
    return Formula::truth(false);
  }

  /// Binds every declared variable at stage `at`, first declaration outermost.
  Formula close(Formula::Kind kind, StageRef at, Formula body) const {
    for (auto it = decls_.rbegin(); it != decls_.rend(); ++it) {
      FormulaVar v = FormulaVar::at(it->name, at);
      body = kind == Formula::Kind::Exists ? Formula::exists(v, it->domain_size, std::move(body))
                                           : Formula::forall(v, it->domain_size, std::move(body));
    }
    return body;
  }

 private:
  const VarDecl& decl(const std::string& name) const {
    for (const auto& d : decls_)
      if (d.name == name) return d;
    throw FormulaError("undeclared variable '" + name + "'");
  }

  static TermPtr var(const std::string& name, StageRef at) { return Term::variable(FormulaVar::at(name, at)); }

  // v_to = v_from for every declared v other than `except`.
  Formula frame(StageRef from, StageRef to, const std::string* except) const {
    std::vector<Formula> parts;
    for (const auto& d : decls_)
      if (!except || d.name != *except) parts.push_back(eq(var(d.name, to), var(d.name, from)));
    return Formula::conjunction(std::move(parts));
  }

  // Runs of exactly `i` iterations:
  //   g(x0) & rho(x0,x1) & ... & g(x_{i-1}) & rho(x_{i-1},x_i) & !g(x_i) & to = x_i
  // with x0 = from and x1..x_i existentially bound fresh copies.
  Formula summand(const Stmt& loop, StageRef from, StageRef to, std::uint64_t i) {
    std::vector<StageRef> chain{from};
    for (std::uint64_t j = 0; j < i; ++j) chain.push_back(StageRef::indexed(fresh()));
    Formula tail = !to_formula(*loop.guard, chain.back()) && frame(chain.back(), to, nullptr);
    for (std::uint64_t j = i; j-- > 0;) {
      Formula step = build(loop.body(), chain[j], chain[j + 1]);
      tail = to_formula(*loop.guard, chain[j]) && close(Formula::Kind::Exists, chain[j + 1], step && tail);
    }
    return tail;
  }

  const std::vector<VarDecl>& decls_;
  std::uint64_t bound_;
  std::uint32_t next_;
};

inline bool loops_exact(const Stmt& s, std::uint64_t bound, std::uint64_t states) {
  if (!contains(s, Stmt::Kind::While)) return true;
  return loops_are_havoc_free(s) && bound >= states;
}

}  // namespace detail

/// rho(x, x') of `stmt`, with loops unrolled to `unroll_bound` iterations.
inline TransitionRelation build_rho(const Stmt& stmt, const std::vector<VarDecl>& decls,
                                    std::uint64_t unroll_bound, const Limits& limits = {}) {
  detail::RhoBuilder builder(decls, unroll_bound);
  TransitionRelation tr;
  tr.rho = builder.build(stmt, StageRef::current(), StageRef::primed());
  tr.unroll_bound = unroll_bound;
  tr.exact = detail::loops_exact(stmt, unroll_bound, state_count(decls, limits.state_ceiling));
  tr.decls = decls;
  return tr;
}

inline TransitionRelation build_rho(const Program& p, std::uint64_t unroll_bound, const Limits& limits = {}) {
  return build_rho(*p.body, p.decls, unroll_bound, limits);
}

inline TransitionRelation build_rho(const Program& p, const Limits& limits = {}) {
  return build_rho(*p.body, p.decls, default_unroll_bound(p.decls, limits), limits);
}

/// For every start state (by index), the set of states rho relates it to.
namespace detail {

inline std::vector<std::pair<FormulaVar, std::int64_t>> primed_vars(const std::vector<VarDecl>& decls) {
  std::vector<std::pair<FormulaVar, std::int64_t>> out;
  for (const auto& d : decls) out.emplace_back(FormulaVar::primed(d.name), d.domain_size);
  return out;
}

// Successors of the state bound at the current stage, by state index.
inline std::vector<std::size_t> successors(Evaluator& ev, const StateSpace& space,
                                           const std::vector<std::pair<FormulaVar, std::int64_t>>& primed) {
  std::vector<std::size_t> out;
  for (auto& values : ev.solutions(primed)) out.push_back(space.index_of(State{std::move(values)}));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

inline std::vector<StateSet> successor_sets(const TransitionRelation& tr, const StateSpace& space) {
  Evaluator ev(tr.rho);
  const auto primed = detail::primed_vars(tr.decls);
  std::vector<StateSet> out(space.size(), StateSet(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) {
    space.bind(ev, space.state(i), StageRef::current());
    for (auto j : detail::successors(ev, space, primed)) out[i].insert(j);
  }
  return out;
}

inline std::vector<StateSet> successor_sets(const TransitionRelation& tr, const Limits& limits = {}) {
  return successor_sets(tr, StateSpace(tr.decls, limits));
}

/// Outcome of a per-state property of a relation, with the first offending
/// state (in index order) and its successors when the property fails.
struct RelationProperty {
  bool holds = true;
  std::optional<State> witness;
  std::vector<State> successors;
};

/// Every start state has at least one successor.
inline RelationProperty is_pointwise_satisfiable(const TransitionRelation& tr, const Limits& limits = {}) {
  StateSpace space(tr.decls, limits);
  // One existential query per state instead of enumerating pairs.
  Formula some = detail::RhoBuilder(tr.decls, 0).close(Formula::Kind::Exists, StageRef::primed(), tr.rho);
  Evaluator exists_succ(some);
  RelationProperty r;
  for (std::size_t i = 0; i < space.size(); ++i) {
    State s = space.state(i);
    space.bind(exists_succ, s, StageRef::current());
    if (!exists_succ.holds()) {
      r.holds = false;
      r.witness = s;
      return r;
    }
  }
  return r;
}

/// Every start state has at most one successor.
inline RelationProperty is_semantically_deterministic(const TransitionRelation& tr, const Limits& limits = {}) {
  StateSpace space(tr.decls, limits);
  Evaluator ev(tr.rho);
  const auto primed = detail::primed_vars(tr.decls);
  RelationProperty r;
  for (std::size_t i = 0; i < space.size(); ++i) {
    State s = space.state(i);
    space.bind(ev, s, StageRef::current());
    auto found = detail::successors(ev, space, primed);
    if (found.size() > 1) {
      r.holds = false;
      r.witness = s;
      for (std::size_t k = 0; k < 2; ++k) r.successors.push_back(space.state(found[k]));
      return r;
    }
  }
  return r;
}

/// Some pair of states satisfies rho.
inline bool is_globally_satisfiable(const TransitionRelation& tr, const Limits& limits = {}) {
  StateSpace space(tr.decls, limits);
  Formula some = detail::RhoBuilder(tr.decls, 0).close(Formula::Kind::Exists, StageRef::primed(), tr.rho);
  Evaluator ev(some);
  for (std::size_t i = 0; i < space.size(); ++i) {
    space.bind(ev, space.state(i), StageRef::current());
    if (ev.holds()) return true;
  }
  return false;
}

}  // namespace predtrans
