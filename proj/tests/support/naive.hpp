#pragma once

// Reference semantics for tests: direct recursive evaluation with full
// enumeration of quantifiers, no search and no caching.

#include <cstdint>
#include <map>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/state_space.hpp"

namespace naive {

using Env = std::map<predtrans::FormulaVar, std::int64_t>;

inline std::int64_t term(const predtrans::Term& t, const Env& env) {
  using K = predtrans::Term::Kind;
  switch (t.kind) {
    case K::Constant: return t.value;
    case K::Variable: return env.at(t.var);
    case K::Binary: {
      // Wraparound like the library, spelled independently.
      unsigned long long a = static_cast<unsigned long long>(term(*t.lhs, env));
      unsigned long long b = static_cast<unsigned long long>(term(*t.rhs, env));
      switch (t.op) {
        case predtrans::ArithOp::Add: return static_cast<std::int64_t>(a + b);
        case predtrans::ArithOp::Sub: return static_cast<std::int64_t>(a - b);
        case predtrans::ArithOp::Mul: return static_cast<std::int64_t>(a * b);
      }
      return 0;
    }
    case K::Mod: {
      std::int64_t v = term(*t.lhs, env);
      std::int64_t m = t.value;
      return ((v % m) + m) % m;
    }
  }
  return 0;
}

inline bool holds(const predtrans::Formula& f, Env& env) {
  using K = predtrans::Formula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: {
      std::int64_t a = term(*f->lhs, env), b = term(*f->rhs, env);
      switch (f->op) {
        case predtrans::CmpOp::Eq: return a == b;
        case predtrans::CmpOp::Lt: return a < b;
        case predtrans::CmpOp::Le: return a <= b;
      }
      return false;
    }
    case K::Not: return !holds(f->children[0], env);
    case K::And:
      for (const auto& c : f->children)
        if (!holds(c, env)) return false;
      return true;
    case K::Or:
      for (const auto& c : f->children)
        if (holds(c, env)) return true;
      return false;
    case K::Implies: return !holds(f->children[0], env) || holds(f->children[1], env);
    case K::Exists:
    case K::Forall: {
      const bool all = f.kind() == K::Forall;
      auto saved = env.find(f->bound) != env.end() ? std::optional<std::int64_t>(env[f->bound]) : std::nullopt;
      bool result = all;
      for (std::int64_t v = 0; v < f->domain_size; ++v) {
        env[f->bound] = v;
        if (holds(f->children[0], env) != all) {
          result = !all;
          break;
        }
      }
      if (saved)
        env[f->bound] = *saved;
      else
        env.erase(f->bound);
      return result;
    }
  }
  return false;
}

inline bool holds(const predtrans::Formula& f, const Env& env) {
  Env copy = env;
  return holds(f, copy);
}

/// Indices of states (current stage) satisfying `f`.
inline std::vector<bool> extension(const predtrans::Formula& f, const predtrans::StateSpace& space) {
  std::vector<bool> out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    Env env;
    auto s = space.state(i);
    for (std::size_t k = 0; k < space.decls().size(); ++k)
      env[predtrans::FormulaVar::current(space.decls()[k].name)] = s.values[k];
    out[i] = holds(f, env);
  }
  return out;
}

}  // namespace naive
