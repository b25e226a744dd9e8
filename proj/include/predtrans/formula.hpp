#pragma once

// First-order formulas over finite-domain integer variables. Formulas are
// immutable DAGs of shared nodes; every transformation below preserves
// sharing so that the large unrolled relations stay compact.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/error.hpp"

namespace predtrans {

enum class Stage : std::uint8_t { Current, Primed, Indexed };

/// Which copy of the program variables a formula refers to: x, x' or x#k.
struct StageRef {
  Stage stage = Stage::Current;
  std::uint32_t index = 0;

  static StageRef current() { return {Stage::Current, 0}; }
  static StageRef primed() { return {Stage::Primed, 0}; }
  static StageRef indexed(std::uint32_t k) { return {Stage::Indexed, k}; }

  auto operator<=>(const StageRef&) const = default;
};

struct FormulaVar {
  std::string base;
  Stage stage = Stage::Current;
  std::uint32_t index = 0;

  static FormulaVar at(std::string base, StageRef s) { return {std::move(base), s.stage, s.index}; }
  static FormulaVar current(std::string base) { return {std::move(base), Stage::Current, 0}; }
  static FormulaVar primed(std::string base) { return {std::move(base), Stage::Primed, 0}; }
  static FormulaVar indexed(std::string base, std::uint32_t k) {
    if (k < 1) throw FormulaError("indexed variable copies start at 1");
    return {std::move(base), Stage::Indexed, k};
  }

  StageRef stage_ref() const { return {stage, index}; }

  std::string name() const {
    switch (stage) {
      case Stage::Current: return base;
      case Stage::Primed: return base + "'";
      case Stage::Indexed: return base + "#" + std::to_string(index);
    }
    return base;
  }

  auto operator<=>(const FormulaVar&) const = default;
};

struct FormulaVarHash {
  std::size_t operator()(const FormulaVar& v) const noexcept {
    std::size_t h = std::hash<std::string>{}(v.base);
    h ^= (static_cast<std::size_t>(v.stage) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    h ^= (static_cast<std::size_t>(v.index) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    return h;
  }
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Constant, Variable, Binary, Mod };

  Kind kind = Kind::Constant;
  std::int64_t value = 0;  // constant value, or the modulus for Mod
  FormulaVar var;
  ArithOp op = ArithOp::Add;
  TermPtr lhs;
  TermPtr rhs;
  std::uint64_t size = 1;  // tree size, saturating

  static TermPtr constant(std::int64_t v) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Constant;
    t->value = v;
    return t;
  }
  static TermPtr variable(FormulaVar v) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Variable;
    t->var = std::move(v);
    return t;
  }
  static TermPtr binary(ArithOp o, TermPtr l, TermPtr r) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Binary;
    t->op = o;
    t->lhs = std::move(l);
    t->rhs = std::move(r);
    t->size = std::min<std::uint64_t>(1 + t->lhs->size + t->rhs->size, std::uint64_t{1} << 62);
    return t;
  }
  /// Reduction into 0..modulus-1.
  static TermPtr mod(TermPtr inner, std::int64_t modulus) {
    if (modulus < 1) throw FormulaError("modulus must be positive");
    auto t = std::make_shared<Term>();
    t->kind = Kind::Mod;
    t->value = modulus;
    t->lhs = std::move(inner);
    t->size = std::min<std::uint64_t>(1 + t->lhs->size, std::uint64_t{1} << 62);
    return t;
  }
};

inline bool same_term(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Constant: return a.value == b.value;
    case Term::Kind::Variable: return a.var == b.var;
    case Term::Kind::Binary: return a.op == b.op && same_term(*a.lhs, *b.lhs) && same_term(*a.rhs, *b.rhs);
    case Term::Kind::Mod: return a.value == b.value && same_term(*a.lhs, *b.lhs);
  }
  return false;
}

/// Arithmetic on int64 with two's-complement wraparound instead of UB.
inline std::int64_t apply(ArithOp op, std::int64_t a, std::int64_t b) {
  auto ua = static_cast<std::uint64_t>(a);
  auto ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case ArithOp::Add: return static_cast<std::int64_t>(ua + ub);
    case ArithOp::Sub: return static_cast<std::int64_t>(ua - ub);
    case ArithOp::Mul: return static_cast<std::int64_t>(ua * ub);
  }
  return 0;
}

inline void collect_vars(const Term& t, std::vector<FormulaVar>& out) {
  switch (t.kind) {
    case Term::Kind::Constant: break;
    case Term::Kind::Variable: out.push_back(t.var); break;
    case Term::Kind::Binary:
      collect_vars(*t.lhs, out);
      collect_vars(*t.rhs, out);
      break;
    case Term::Kind::Mod: collect_vars(*t.lhs, out); break;
  }
}

inline bool mentions(const Term& t, const FormulaVar& v) {
  switch (t.kind) {
    case Term::Kind::Constant: return false;
    case Term::Kind::Variable: return t.var == v;
    case Term::Kind::Binary: return mentions(*t.lhs, v) || mentions(*t.rhs, v);
    case Term::Kind::Mod: return mentions(*t.lhs, v);
  }
  return false;
}

struct FormulaNode;

/// Handle to an immutable formula node. Copies share structure.
class Formula {
 public:
  enum class Kind { True, False, Atom, Not, And, Or, Implies, Exists, Forall };

  Formula() : Formula(truth(true)) {}

  static Formula truth(bool value);
  static Formula atom(CmpOp op, TermPtr lhs, TermPtr rhs);
  static Formula negation(Formula inner);
  /// Conjunction; the empty conjunction is true and a singleton is its element.
  static Formula conjunction(std::vector<Formula> parts);
  static Formula disjunction(std::vector<Formula> parts);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula exists(FormulaVar var, std::int64_t domain_size, Formula body);
  static Formula forall(FormulaVar var, std::int64_t domain_size, Formula body);

  const FormulaNode* operator->() const { return node_.get(); }
  const FormulaNode& operator*() const { return *node_; }
  const FormulaNode* get() const { return node_.get(); }

  Kind kind() const;
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  static Formula make(FormulaNode node);

  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  Formula::Kind kind = Formula::Kind::True;
  CmpOp op = CmpOp::Eq;
  TermPtr lhs;
  TermPtr rhs;
  std::vector<Formula> children;
  FormulaVar bound;
  std::int64_t domain_size = 0;

  // Cached at construction.
  std::vector<FormulaVar> free_vars;  // sorted, unique
  std::uint64_t tree_size = 1;        // saturating; atoms include their terms
  std::uint32_t max_index = 0;        // largest x#k index, free or bound
  // Set once simplify has produced this node; simplify returns such nodes unchanged.
  mutable bool simplified = false;

  bool is_quantifier() const {
    return kind == Formula::Kind::Exists || kind == Formula::Kind::Forall;
  }
};

inline Formula::Kind Formula::kind() const { return node_->kind; }

namespace detail {

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}

inline void finish_node(FormulaNode& n) {
  std::vector<FormulaVar> vars;
  std::uint32_t max_index = 0;
  std::uint64_t size = 1;
  if (n.kind == Formula::Kind::Atom) {
    collect_vars(*n.lhs, vars);
    collect_vars(*n.rhs, vars);
    size = saturating_add(size, saturating_add(n.lhs->size, n.rhs->size));
  }
  for (const auto& c : n.children) {
    vars.insert(vars.end(), c->free_vars.begin(), c->free_vars.end());
    max_index = std::max(max_index, c->max_index);
    size = saturating_add(size, c->tree_size);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (n.is_quantifier()) {
    vars.erase(std::remove(vars.begin(), vars.end(), n.bound), vars.end());
    if (n.bound.stage == Stage::Indexed) max_index = std::max(max_index, n.bound.index);
  }
  for (const auto& v : vars)
    if (v.stage == Stage::Indexed) max_index = std::max(max_index, v.index);
  n.free_vars = std::move(vars);
  n.max_index = max_index;
  n.tree_size = size;
}

}  // namespace detail

inline Formula Formula::make(FormulaNode node) {
  detail::finish_node(node);
  return Formula(std::make_shared<const FormulaNode>(std::move(node)));
}

inline Formula Formula::truth(bool value) {
  auto node = [](Kind k) {
    FormulaNode n;
    n.kind = k;
    return make(std::move(n));
  };
  static const Formula t = node(Kind::True);
  static const Formula f = node(Kind::False);
  return value ? t : f;
}

inline Formula Formula::atom(CmpOp op, TermPtr lhs, TermPtr rhs) {
  FormulaNode n;
  n.kind = Kind::Atom;
  n.op = op;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return make(std::move(n));
}

inline Formula Formula::negation(Formula inner) {
  FormulaNode n;
  n.kind = Kind::Not;
  n.children.push_back(std::move(inner));
  return make(std::move(n));
}

inline Formula Formula::conjunction(std::vector<Formula> parts) {
  if (parts.empty()) return truth(true);
  if (parts.size() == 1) return parts.front();
  FormulaNode n;
  n.kind = Kind::And;
  n.children = std::move(parts);
  return make(std::move(n));
}

inline Formula Formula::disjunction(std::vector<Formula> parts) {
  if (parts.empty()) return truth(false);
  if (parts.size() == 1) return parts.front();
  FormulaNode n;
  n.kind = Kind::Or;
  n.children = std::move(parts);
  return make(std::move(n));
}

inline Formula Formula::implication(Formula lhs, Formula rhs) {
  FormulaNode n;
  n.kind = Kind::Implies;
  n.children = {std::move(lhs), std::move(rhs)};
  return make(std::move(n));
}

inline Formula Formula::exists(FormulaVar var, std::int64_t domain_size, Formula body) {
  if (domain_size < 1) throw FormulaError("quantifier domain must be non-empty");
  FormulaNode n;
  n.kind = Kind::Exists;
  n.bound = std::move(var);
  n.domain_size = domain_size;
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

inline Formula Formula::forall(FormulaVar var, std::int64_t domain_size, Formula body) {
  if (domain_size < 1) throw FormulaError("quantifier domain must be non-empty");
  FormulaNode n;
  n.kind = Kind::Forall;
  n.bound = std::move(var);
  n.domain_size = domain_size;
  n.children.push_back(std::move(body));
  return make(std::move(n));
}

inline Formula operator!(Formula f) { return Formula::negation(std::move(f)); }
inline Formula operator&&(Formula a, Formula b) { return Formula::conjunction({std::move(a), std::move(b)}); }
inline Formula operator||(Formula a, Formula b) { return Formula::disjunction({std::move(a), std::move(b)}); }

inline Formula eq(TermPtr a, TermPtr b) { return Formula::atom(CmpOp::Eq, std::move(a), std::move(b)); }

inline bool is_free(const Formula& f, const FormulaVar& v) {
  return std::binary_search(f->free_vars.begin(), f->free_vars.end(), v);
}

// ---------------------------------------------------------------------------
// Conversions from program syntax.

inline TermPtr to_term(const Expr& e, StageRef stage) {
  switch (e.kind) {
    case Expr::Kind::Constant: return Term::constant(e.value);
    case Expr::Kind::Variable: return Term::variable(FormulaVar::at(e.name, stage));
    case Expr::Kind::Binary: return Term::binary(e.op, to_term(*e.lhs, stage), to_term(*e.rhs, stage));
  }
  return Term::constant(0);
}

inline Formula to_formula(const BoolExpr& b, StageRef stage) {
  switch (b.kind) {
    case BoolExpr::Kind::True: return Formula::truth(true);
    case BoolExpr::Kind::False: return Formula::truth(false);
    case BoolExpr::Kind::Compare:
      return Formula::atom(b.cmp, to_term(*b.lhs, stage), to_term(*b.rhs, stage));
    case BoolExpr::Kind::Not: return !to_formula(*b.left, stage);
    case BoolExpr::Kind::And: return to_formula(*b.left, stage) && to_formula(*b.right, stage);
    case BoolExpr::Kind::Or: return to_formula(*b.left, stage) || to_formula(*b.right, stage);
  }
  return Formula::truth(true);
}

// ---------------------------------------------------------------------------
// Structural maps. Results are memoized on node identity, which is sound
// because each map below is context-free: shadowing binders stop the map
// inside their own subtree.

namespace detail {

inline TermPtr map_term(const TermPtr& t, const std::function<TermPtr(const FormulaVar&)>& on_var) {
  switch (t->kind) {
    case Term::Kind::Constant: return t;
    case Term::Kind::Variable: {
      auto r = on_var(t->var);
      return r ? r : t;
    }
    case Term::Kind::Binary: {
      auto l = map_term(t->lhs, on_var);
      auto r = map_term(t->rhs, on_var);
      if (l == t->lhs && r == t->rhs) return t;
      return Term::binary(t->op, std::move(l), std::move(r));
    }
    case Term::Kind::Mod: {
      auto l = map_term(t->lhs, on_var);
      if (l == t->lhs) return t;
      return Term::mod(std::move(l), t->value);
    }
  }
  return t;
}

/// Rebuilds `f` replacing free variable occurrences via `on_var` (returning
/// null leaves the variable alone). `touches` prunes subtrees with no
/// relevant free variables; `on_binder` sees every binder above a relevant
/// occurrence and may reject it (capture).
class VarMapper {
 public:
  using OnVar = std::function<TermPtr(const FormulaVar&)>;
  using Touches = std::function<bool(const FormulaNode&)>;
  using OnBinder = std::function<void(const FormulaNode&)>;

  VarMapper(OnVar on_var, Touches touches, OnBinder on_binder, std::vector<FormulaVar> shadowed = {})
      : on_var_(std::move(on_var)),
        touches_(std::move(touches)),
        on_binder_(std::move(on_binder)),
        shadowed_(std::move(shadowed)) {}

  Formula operator()(const Formula& f) {
    if (!touches_(*f)) return f;
    if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second;
    Formula out = rebuild(f);
    memo_.emplace(f.get(), out);
    return out;
  }

 private:
  TermPtr map_var(const FormulaVar& v) const {
    if (std::find(shadowed_.begin(), shadowed_.end(), v) != shadowed_.end()) return nullptr;
    return on_var_(v);
  }

  Formula rebuild(const Formula& f) {
    using K = Formula::Kind;
    auto on_var = [this](const FormulaVar& v) { return map_var(v); };
    switch (f.kind()) {
      case K::True:
      case K::False: return f;
      case K::Atom: return Formula::atom(f->op, map_term(f->lhs, on_var), map_term(f->rhs, on_var));
      case K::Not: return Formula::negation((*this)(f->children[0]));
      case K::And:
      case K::Or: {
        std::vector<Formula> parts;
        parts.reserve(f->children.size());
        for (const auto& c : f->children) parts.push_back((*this)(c));
        return f.kind() == K::And ? Formula::conjunction(std::move(parts))
                                  : Formula::disjunction(std::move(parts));
      }
      case K::Implies: return Formula::implication((*this)(f->children[0]), (*this)(f->children[1]));
      case K::Exists:
      case K::Forall: {
        on_binder_(*f);
        Formula body;
        if (map_var(f->bound)) {
          // The binder shadows a variable this map would rewrite.
          auto shadowed = shadowed_;
          shadowed.push_back(f->bound);
          VarMapper inner(on_var_, touches_, on_binder_, std::move(shadowed));
          body = inner(f->children[0]);
        } else {
          body = (*this)(f->children[0]);
        }
        return f.kind() == K::Exists ? Formula::exists(f->bound, f->domain_size, std::move(body))
                                     : Formula::forall(f->bound, f->domain_size, std::move(body));
      }
    }
    return f;
  }

  OnVar on_var_;
  Touches touches_;
  OnBinder on_binder_;
  std::vector<FormulaVar> shadowed_;
  std::unordered_map<const FormulaNode*, Formula> memo_;
};

}  // namespace detail

/// Replaces every free occurrence of `var` by `term`.
inline Formula substitute(const Formula& f, const FormulaVar& var, const TermPtr& term) {
  std::vector<FormulaVar> term_vars;
  collect_vars(*term, term_vars);
  detail::VarMapper mapper(
      [&](const FormulaVar& v) -> TermPtr { return v == var ? term : nullptr; },
      [&](const FormulaNode& n) {
        return std::binary_search(n.free_vars.begin(), n.free_vars.end(), var);
      },
      [&](const FormulaNode& binder) {
        if (std::find(term_vars.begin(), term_vars.end(), binder.bound) != term_vars.end())
          throw FormulaError("substitution would capture " + binder.bound.name());
      });
  return mapper(f);
}

/// Renames all free variables of stage `from` to stage `to`.
inline Formula restage(const Formula& f, StageRef from, StageRef to) {
  detail::VarMapper mapper(
      [&](const FormulaVar& v) -> TermPtr {
        if (v.stage_ref() != from) return nullptr;
        return Term::variable(FormulaVar::at(v.base, to));
      },
      [&](const FormulaNode& n) {
        return std::any_of(n.free_vars.begin(), n.free_vars.end(),
                           [&](const FormulaVar& v) { return v.stage_ref() == from; });
      },
      [&](const FormulaNode& binder) {
        if (binder.bound.stage_ref() != to) return;
        for (const auto& v : binder.free_vars)
          if (v.base == binder.bound.base && v.stage_ref() == from)
            throw FormulaError("renaming would capture " + binder.bound.name());
      });
  return mapper(f);
}

/// Moves every free variable to its primed copy: phi(x) becomes phi(x').
inline Formula prime(const Formula& f) {
  for (const auto& v : f->free_vars)
    if (v.stage != Stage::Current)
      throw FormulaError("prime expects only current-stage free variables, found " + v.name());
  return restage(f, StageRef::current(), StageRef::primed());
}

// ---------------------------------------------------------------------------
// Simplification.

namespace detail {

inline TermPtr fold_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Constant:
    case Term::Kind::Variable: return t;
    case Term::Kind::Binary: {
      auto l = fold_term(t->lhs);
      auto r = fold_term(t->rhs);
      if (l->kind == Term::Kind::Constant && r->kind == Term::Kind::Constant)
        return Term::constant(apply(t->op, l->value, r->value));
      if (l == t->lhs && r == t->rhs) return t;
      return Term::binary(t->op, l, r);
    }
    case Term::Kind::Mod: {
      auto l = fold_term(t->lhs);
      if (l->kind == Term::Kind::Constant) return Term::constant(euclid_mod(l->value, t->value));
      if (l == t->lhs) return t;
      return Term::mod(l, t->value);
    }
  }
  return t;
}

class Simplifier {
 public:
  Formula operator()(const Formula& f) {
    if (f->simplified) return f;
    if (auto it = memo_.find(f.get()); it != memo_.end()) return it->second.second;
    Formula out = run(f);
    out->simplified = true;
    // The key is retained: run() may simplify temporaries whose address
    // would otherwise be reused.
    memo_.emplace(f.get(), std::make_pair(f, out));
    return out;
  }

 private:
  Formula run(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::True:
      case K::False: return f;
      case K::Atom: {
        auto l = fold_term(f->lhs);
        auto r = fold_term(f->rhs);
        if (l->kind == Term::Kind::Constant && r->kind == Term::Kind::Constant)
          return Formula::truth(compare(f->op, l->value, r->value));
        if (same_term(*l, *r)) return Formula::truth(f->op != CmpOp::Lt);
        if (l == f->lhs && r == f->rhs) return f;
        return Formula::atom(f->op, l, r);
      }
      case K::Not: {
        Formula c = (*this)(f->children[0]);
        if (c.is_true()) return Formula::truth(false);
        if (c.is_false()) return Formula::truth(true);
        if (c.kind() == K::Not) return c->children[0];
        if (c.get() == f->children[0].get()) return f;
        return Formula::negation(c);
      }
      case K::And:
      case K::Or: {
        const bool is_and = f.kind() == K::And;
        std::vector<Formula> parts;
        for (const auto& child : f->children) {
          Formula c = (*this)(child);
          if (is_and ? c.is_true() : c.is_false()) continue;
          if (is_and ? c.is_false() : c.is_true()) return c;
          if (c.kind() == f.kind()) {
            for (const auto& g : c->children) push_unique(parts, g);
          } else {
            push_unique(parts, c);
          }
        }
        if (same_children(parts, f->children)) return f;
        return is_and ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
      }
      case K::Implies: {
        Formula a = (*this)(f->children[0]);
        Formula b = (*this)(f->children[1]);
        if (a.is_false() || b.is_true()) return Formula::truth(true);
        if (a.is_true()) return b;
        if (b.is_false()) return (*this)(Formula::negation(a));
        if (a.get() == f->children[0].get() && b.get() == f->children[1].get()) return f;
        return Formula::implication(a, b);
      }
      case K::Exists:
      case K::Forall: {
        Formula body = (*this)(f->children[0]);
        // Domains are non-empty, so a binder over a body that ignores it is redundant.
        if (!is_free(body, f->bound)) return body;
        if (body.get() == f->children[0].get()) return f;
        return f.kind() == K::Exists ? Formula::exists(f->bound, f->domain_size, body)
                                     : Formula::forall(f->bound, f->domain_size, body);
      }
    }
    return f;
  }

  static bool same_children(const std::vector<Formula>& a, const std::vector<Formula>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].get() != b[i].get()) return false;
    return true;
  }

  static void push_unique(std::vector<Formula>& parts, const Formula& g) {
    for (const auto& p : parts)
      if (p.get() == g.get()) return;
    parts.push_back(g);
  }

  std::unordered_map<const FormulaNode*, std::pair<Formula, Formula>> memo_;
};

}  // namespace detail

/// Best-effort, equivalence-preserving cleanup: constant folding, true/false
/// absorption, double negation, flattening, vacuous binders.
inline Formula simplify(const Formula& f) { return detail::Simplifier{}(f); }

/// Replaces every quantifier by the finite disjunction (exists) or
/// conjunction (forall) of its instances over the binder's domain.
inline Formula expand_quantifiers(const Formula& f) {
  using K = Formula::Kind;
  std::unordered_map<const FormulaNode*, Formula> memo;
  std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
    if (auto it = memo.find(g.get()); it != memo.end()) return it->second;
    Formula out = g;
    switch (g.kind()) {
      case K::True:
      case K::False:
      case K::Atom: break;
      case K::Not: out = Formula::negation(go(g->children[0])); break;
      case K::And:
      case K::Or: {
        std::vector<Formula> parts;
        for (const auto& c : g->children) parts.push_back(go(c));
        out = g.kind() == K::And ? Formula::conjunction(std::move(parts))
                                 : Formula::disjunction(std::move(parts));
        break;
      }
      case K::Implies: out = Formula::implication(go(g->children[0]), go(g->children[1])); break;
      case K::Exists:
      case K::Forall: {
        Formula body = go(g->children[0]);
        std::vector<Formula> instances;
        for (std::int64_t c = 0; c < g->domain_size; ++c)
          instances.push_back(simplify(substitute(body, g->bound, Term::constant(c))));
        out = simplify(g.kind() == K::Exists ? Formula::disjunction(std::move(instances))
                                             : Formula::conjunction(std::move(instances)));
        break;
      }
    }
    memo.emplace(g.get(), out);
    return out;
  };
  return go(f);
}

// ---------------------------------------------------------------------------
// Printing.

namespace detail {

inline int term_precedence(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Constant: return t.value < 0 ? 1 : 3;
    case Term::Kind::Variable: return 3;
    case Term::Kind::Binary: return t.op == ArithOp::Mul ? 2 : 1;
    case Term::Kind::Mod: return 2;
  }
  return 3;
}

inline void print_term(const Term& t, std::string& out, int required) {
  const int prec = term_precedence(t);
  const bool paren = prec < required;
  if (paren) out += '(';
  switch (t.kind) {
    case Term::Kind::Constant: out += std::to_string(t.value); break;
    case Term::Kind::Variable: out += t.var.name(); break;
    case Term::Kind::Binary:
      print_term(*t.lhs, out, prec);
      out += ' ';
      out += to_symbol(t.op);
      out += ' ';
      print_term(*t.rhs, out, prec + 1);
      break;
    case Term::Kind::Mod:
      print_term(*t.lhs, out, prec + 1);
      out += " mod ";
      out += std::to_string(t.value);
      break;
  }
  if (paren) out += ')';
}

class Printer {
 public:
  explicit Printer(std::size_t budget) : budget_(budget) {}

  std::string finish(const Formula& f) {
    print(f, 0);
    if (truncated_) {
      out_.resize(cut_);
      while (!out_.empty() && out_.back() == ' ') out_.pop_back();
      out_ += " ...";
    }
    return std::move(out_);
  }

 private:
  static int precedence(Formula::Kind k) {
    using K = Formula::Kind;
    switch (k) {
      case K::Exists:
      case K::Forall: return 0;
      case K::Implies: return 1;
      case K::Or: return 2;
      case K::And: return 3;
      case K::Not: return 4;
      default: return 5;
    }
  }

  void print(const Formula& f, int required) {
    using K = Formula::Kind;
    if (truncated_) return;
    if (out_.size() > budget_) {
      truncated_ = true;
      cut_ = out_.size();
      return;
    }
    const int prec = precedence(f.kind());
    const bool paren = prec < required;
    if (paren) out_ += '(';
    switch (f.kind()) {
      case K::True: out_ += "true"; break;
      case K::False: out_ += "false"; break;
      case K::Atom:
        print_term(*f->lhs, out_, 0);
        out_ += ' ';
        out_ += to_symbol(f->op);
        out_ += ' ';
        print_term(*f->rhs, out_, 0);
        break;
      case K::Not: {
        const Formula& c = f->children[0];
        out_ += '!';
        const bool wrap = c.kind() == K::Atom;
        if (wrap) out_ += '(';
        print(c, 4);
        if (wrap) out_ += ')';
        break;
      }
      case K::And:
      case K::Or: {
        const char* sep = f.kind() == K::And ? " && " : " || ";
        for (std::size_t i = 0; i < f->children.size(); ++i) {
          if (i) out_ += sep;
          print(f->children[i], prec + (f->children[i].kind() == f.kind() ? 1 : 0));
        }
        break;
      }
      case K::Implies:
        print(f->children[0], 2);
        out_ += " -> ";
        print(f->children[1], 1);
        break;
      case K::Exists:
      case K::Forall:
        out_ += f.kind() == K::Exists ? "exists " : "forall ";
        out_ += f->bound.name();
        out_ += " in 0..";
        out_ += std::to_string(f->domain_size - 1);
        out_ += ". ";
        print(f->children[0], 0);
        break;
    }
    if (paren) out_ += ')';
  }

  std::size_t budget_;
  bool truncated_ = false;
  std::size_t cut_ = 0;  // output length when the budget ran out
  std::string out_;
};

}  // namespace detail

inline std::string to_string(const Term& t) {
  std::string out;
  detail::print_term(t, out, 0);
  return out;
}

/// Infix rendering. Output longer than `budget` characters is cut and
/// marked with a trailing " ...".
inline std::string to_string(const Formula& f,
                             std::size_t budget = std::numeric_limits<std::size_t>::max()) {
  return detail::Printer(budget).finish(f);
}

}  // namespace predtrans
