#pragma once

// Truth of formulas under a valuation. Quantifiers range over their binder's
// finite domain. Evaluation of a block of like quantifiers is a small
// backtracking search: equalities that pin a bound variable are propagated
// (one-point rule), disjunctions are split, and only the remaining variables
// are enumerated. Closed subformulas above a size threshold are memoized on
// the values of their free variables, which keeps the unrolled loop
// relations tractable.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "predtrans/error.hpp"
#include "predtrans/formula.hpp"

namespace predtrans {

using Valuation = std::map<FormulaVar, std::int64_t>;

class Evaluator {
 public:
  explicit Evaluator(Formula root) : root_(std::move(root)) {}

  void bind(const FormulaVar& v, std::int64_t value) {
    int s = slot(v);
    values_[s] = value;
    bound_[s] = 1;
  }

  void bind(const Valuation& valuation) {
    for (const auto& [v, value] : valuation) bind(v, value);
  }

  void unbind_all() { std::fill(bound_.begin(), bound_.end(), 0); }

  /// Truth of the root under the current bindings.
  bool holds() {
    const NodeInfo& info = node_info(root_.get());
    for (std::size_t i = 0; i < info.free_slots.size(); ++i)
      if (!bound_[info.free_slots[i]])
        throw FormulaError("unassigned variable " + root_->free_vars[i].name());
    return eval(*root_);
  }

  bool holds(const Valuation& valuation) {
    unbind_all();
    bind(valuation);
    return holds();
  }

  /// Every assignment to `vars` (each ranging over 0..domain-1) under which
  /// the root holds, given bindings for its other free variables. Sorted.
  std::vector<std::vector<std::int64_t>> solutions(const std::vector<std::pair<FormulaVar, std::int64_t>>& vars) {
    std::vector<BlockVar> block;
    for (const auto& [v, domain] : vars) block.push_back({slot(v), domain});
    for (const auto& b : block) bound_[b.slot] = 0;
    const NodeInfo& info = node_info(root_.get());
    for (std::size_t i = 0; i < info.free_slots.size(); ++i)
      if (!bound_[info.free_slots[i]] && domain_of(block, info.free_slots[i]) < 0)
        throw FormulaError("unassigned variable " + root_->free_vars[i].name());
    std::vector<Literal> lits;
    flatten(*root_, true, lits);
    std::set<std::vector<std::int64_t>> found;
    collected_ = &found;
    collect_count_ = block.size();
    try {
      search(block, lits, std::vector<char>(lits.size(), 0));
    } catch (...) {
      collected_ = nullptr;
      throw;
    }
    collected_ = nullptr;
    for (const auto& b : block) bound_[b.slot] = 0;
    return {found.begin(), found.end()};
  }

  const Formula& root() const { return root_; }

 private:
  static constexpr std::uint64_t kMemoThreshold = 24;

  struct NodeInfo {
    std::vector<int> free_slots;
    bool memoize = false;
  };

  struct Literal {
    const FormulaNode* node;
    bool positive;
  };

  struct BlockVar {
    int slot;
    std::int64_t domain;
  };

  struct MemoKey {
    const FormulaNode* node;
    std::vector<std::int64_t> values;
    bool operator==(const MemoKey& o) const { return node == o.node && values == o.values; }
  };

  struct MemoKeyHash {
    std::size_t operator()(const MemoKey& k) const noexcept {
      std::size_t h = std::hash<const void*>{}(k.node);
      for (auto v : k.values) h = h * 1000003u ^ std::hash<std::int64_t>{}(v);
      return h;
    }
  };

  int slot(const FormulaVar& v) {
    auto [it, inserted] = slots_.try_emplace(v, static_cast<int>(values_.size()));
    if (inserted) {
      values_.push_back(0);
      bound_.push_back(0);
    }
    return it->second;
  }

  int term_slot(const Term& t) {
    auto it = term_slots_.find(&t);
    if (it != term_slots_.end()) return it->second;
    int s = slot(t.var);
    term_slots_.emplace(&t, s);
    return s;
  }

  const NodeInfo& node_info(const FormulaNode* n) {
    auto it = info_.find(n);
    if (it != info_.end()) return it->second;
    NodeInfo info;
    info.free_slots.reserve(n->free_vars.size());
    for (const auto& v : n->free_vars) info.free_slots.push_back(slot(v));
    info.memoize = n->is_quantifier() || n->tree_size >= kMemoThreshold;
    return info_.emplace(n, std::move(info)).first->second;
  }

  bool closed(const FormulaNode& n) {
    for (int s : node_info(&n).free_slots)
      if (!bound_[s]) return false;
    return true;
  }

  std::int64_t term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Constant: return t.value;
      case Term::Kind::Variable: {
        int s = term_slot(t);
        if (!bound_[s]) throw FormulaError("unassigned variable " + t.var.name());
        return values_[s];
      }
      case Term::Kind::Binary: return apply(t.op, term(*t.lhs), term(*t.rhs));
      case Term::Kind::Mod: return euclid_mod(term(*t.lhs), t.value);
    }
    return 0;
  }

  bool eval(const FormulaNode& n) {
    const NodeInfo& info = node_info(&n);
    if (!info.memoize) return eval_uncached(n);
    MemoKey key{&n, {}};
    key.values.reserve(info.free_slots.size());
    for (int s : info.free_slots) key.values.push_back(values_[s]);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = eval_uncached(n);
    memo_.emplace(std::move(key), r);
    return r;
  }

  bool eval_uncached(const FormulaNode& n) {
    using K = Formula::Kind;
    switch (n.kind) {
      case K::True: return true;
      case K::False: return false;
      case K::Atom: return compare(n.op, term(*n.lhs), term(*n.rhs));
      case K::Not: return !eval(*n.children[0]);
      case K::And:
        for (const auto& c : n.children)
          if (!eval(*c)) return false;
        return true;
      case K::Or:
        for (const auto& c : n.children)
          if (eval(*c)) return true;
        return false;
      case K::Implies: return !eval(*n.children[0]) || eval(*n.children[1]);
      case K::Exists:
      case K::Forall: return eval_block(n);
    }
    return false;
  }

  // Splits `n` (under polarity) into literals whose conjunction it equals.
  static void flatten(const FormulaNode& n, bool positive, std::vector<Literal>& out) {
    using K = Formula::Kind;
    if (n.kind == K::Not) return flatten(*n.children[0], !positive, out);
    if ((positive && n.kind == K::And) || (!positive && n.kind == K::Or)) {
      for (const auto& c : n.children) flatten(*c, positive, out);
      return;
    }
    if (!positive && n.kind == K::Implies) {
      flatten(*n.children[0], true, out);
      flatten(*n.children[1], false, out);
      return;
    }
    if (positive && n.kind == K::True) return;
    if (!positive && n.kind == K::False) return;
    out.push_back({&n, positive});
  }

  static bool is_split(const Literal& l) {
    using K = Formula::Kind;
    return (l.positive && (l.node->kind == K::Or || l.node->kind == K::Implies)) ||
           (!l.positive && l.node->kind == K::And);
  }

  // Disjuncts of a splittable literal, each as a list of literals.
  static std::vector<std::vector<Literal>> split(const Literal& l) {
    using K = Formula::Kind;
    std::vector<std::vector<Literal>> out;
    if (l.node->kind == K::Implies) {
      out.emplace_back();
      flatten(*l.node->children[0], false, out.back());
      out.emplace_back();
      flatten(*l.node->children[1], true, out.back());
      return out;
    }
    for (const auto& c : l.node->children) {
      out.emplace_back();
      flatten(*c, l.positive, out.back());
    }
    return out;
  }

  bool eval_block(const FormulaNode& q) {
    const bool universal = q.kind == Formula::Kind::Forall;
    std::vector<BlockVar> block;
    const FormulaNode* body = &q;
    while (body->kind == q.kind) {
      int s = slot(body->bound);
      bool dup = false;
      for (auto& b : block)
        if (b.slot == s) {
          b.domain = body->domain_size;  // inner binder shadows
          dup = true;
        }
      if (!dup) block.push_back({s, body->domain_size});
      body = body->children[0].get();
    }
    // forall: search for a counterexample to the body.
    std::vector<Literal> lits;
    flatten(*body, !universal, lits);

    std::vector<std::pair<std::int64_t, char>> saved;
    saved.reserve(block.size());
    for (const auto& b : block) {
      saved.emplace_back(values_[b.slot], bound_[b.slot]);
      bound_[b.slot] = 0;
    }
    auto* collecting = std::exchange(collected_, nullptr);
    bool found = search(block, lits, std::vector<char>(lits.size(), 0));
    collected_ = collecting;
    for (std::size_t i = 0; i < block.size(); ++i) {
      values_[block[i].slot] = saved[i].first;
      bound_[block[i].slot] = saved[i].second;
    }
    return universal ? !found : found;
  }

  std::int64_t domain_of(const std::vector<BlockVar>& block, int s) const {
    for (const auto& b : block)
      if (b.slot == s) return b.domain;
    return -1;
  }

  // If `l` is an equality pinning an unbound block variable to a closed
  // term, returns that slot and term.
  std::pair<int, const Term*> pinned(const std::vector<BlockVar>& block, const Literal& l) {
    if (!l.positive || l.node->kind != Formula::Kind::Atom || l.node->op != CmpOp::Eq) return {-1, nullptr};
    auto try_side = [&](const Term& var_side, const Term& other) -> std::pair<int, const Term*> {
      if (var_side.kind != Term::Kind::Variable) return {-1, nullptr};
      int s = term_slot(var_side);
      if (bound_[s] || domain_of(block, s) < 0) return {-1, nullptr};
      if (!term_closed(other)) return {-1, nullptr};
      return {s, &other};
    };
    auto r = try_side(*l.node->lhs, *l.node->rhs);
    if (r.first >= 0) return r;
    return try_side(*l.node->rhs, *l.node->lhs);
  }

  // True when `l` is an existential quantifier (under its polarity) whose
  // binders are all distinct, unbound and absent from the block.
  bool inlinable(const std::vector<BlockVar>& block, const Literal& l) {
    using K = Formula::Kind;
    const K kind = l.node->kind;
    if (!((l.positive && kind == K::Exists) || (!l.positive && kind == K::Forall))) return false;
    std::vector<int> seen;
    for (const FormulaNode* n = l.node; n->kind == kind; n = n->children[0].get()) {
      int s = slot(n->bound);
      if (bound_[s] || domain_of(block, s) >= 0 || std::find(seen.begin(), seen.end(), s) != seen.end()) return false;
      seen.push_back(s);
    }
    return functional(l, seen);
  }

  // Whether one-point equalities fix every binder of `l` once its currently
  // bound free variables are known. Inlining a quantifier that must be
  // enumerated would lose the memo on it.
  bool functional(const Literal& l, const std::vector<int>& binders) {
    const NodeInfo& info = node_info(l.node);
    std::uint64_t mask = 0;
    std::vector<char> known(values_.size(), 0);
    for (std::size_t i = 0; i < info.free_slots.size(); ++i)
      if (bound_[info.free_slots[i]]) {
        if (i < 64) mask |= std::uint64_t{1} << i;
        known[info.free_slots[i]] = 1;
      }
    if (info.free_slots.size() > 64) return false;
    auto key = std::make_pair(l.node, mask);
    if (auto it = functional_.find(key); it != functional_.end()) return it->second;
    std::vector<Literal> lits;
    const FormulaNode* body = l.node;
    while (body->kind == l.node->kind) body = body->children[0].get();
    flatten(*body, l.positive, lits);
    determine(lits, known);
    bool all = true;
    for (int b : binders) all = all && is_known(known, b);
    functional_.emplace(key, all);
    return all;
  }

  static bool is_known(const std::vector<char>& known, int s) {
    return static_cast<std::size_t>(s) < known.size() && known[s];
  }

  bool term_known(const Term& t, const std::vector<char>& known) {
    switch (t.kind) {
      case Term::Kind::Constant: return true;
      case Term::Kind::Variable: return is_known(known, term_slot(t));
      case Term::Kind::Binary: return term_known(*t.lhs, known) && term_known(*t.rhs, known);
      case Term::Kind::Mod: return term_known(*t.lhs, known);
    }
    return false;
  }

  // Marks variables fixed in every model of the conjunction `lits`: one-point
  // equalities to a fixpoint, one pass through nested disjunctions and
  // quantifiers, then equalities again. Nested parts are visited once so the
  // cost stays linear in the formula.
  void determine(const std::vector<Literal>& lits, std::vector<char>& known) {
    using K = Formula::Kind;
    auto mark = [&](int s) {
      if (is_known(known, s)) return false;
      if (static_cast<std::size_t>(s) >= known.size()) known.resize(values_.size(), 0);
      known[s] = 1;
      return true;
    };
    auto equalities = [&] {
      for (bool changed = true; changed;) {
        changed = false;
        for (const auto& l : lits) {
          const FormulaNode& n = *l.node;
          if (!l.positive || n.kind != K::Atom || n.op != CmpOp::Eq) continue;
          if (n.lhs->kind == Term::Kind::Variable && term_known(*n.rhs, known)) changed |= mark(term_slot(*n.lhs));
          if (n.rhs->kind == Term::Kind::Variable && term_known(*n.lhs, known)) changed |= mark(term_slot(*n.rhs));
        }
      }
    };
    equalities();
    for (const auto& l : lits) {
      const FormulaNode& n = *l.node;
      std::vector<char> found;
      if (is_split(l)) {
        bool first = true;
        for (const auto& alt : split(l)) {
          std::vector<char> branch = known;
          determine(alt, branch);
          if (first) {
            found = std::move(branch);
            first = false;
          } else {
            found.resize(std::max(found.size(), branch.size()), 0);
            for (std::size_t i = 0; i < found.size(); ++i) found[i] = found[i] && is_known(branch, static_cast<int>(i));
          }
        }
      } else if ((l.positive && n.kind == K::Exists) || (!l.positive && n.kind == K::Forall)) {
        const FormulaNode* body = &n;
        while (body->kind == n.kind) body = body->children[0].get();
        std::vector<Literal> inner;
        flatten(*body, l.positive, inner);
        found = known;
        determine(inner, found);
        // Binders are local; everything else fixed inside is fixed here.
        for (const FormulaNode* q = &n; q->kind == n.kind; q = q->children[0].get()) {
          const auto b = static_cast<std::size_t>(slot(q->bound));
          if (b < found.size()) found[b] = 0;
        }
      }
      for (std::size_t i = 0; i < found.size(); ++i)
        if (found[i]) mark(static_cast<int>(i));
    }
    equalities();
  }

  bool term_closed(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Constant: return true;
      case Term::Kind::Variable: return bound_[term_slot(t)] != 0;
      case Term::Kind::Binary: return term_closed(*t.lhs) && term_closed(*t.rhs);
      case Term::Kind::Mod: return term_closed(*t.lhs);
    }
    return false;
  }

  bool search(const std::vector<BlockVar>& block, std::vector<Literal>& lits, std::vector<char> done) {
    std::vector<int> trail;
    auto undo = [&] {
      for (int s : trail) bound_[s] = 0;
    };

    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < lits.size(); ++i) {
        if (done[i]) continue;
        const Literal& l = lits[i];
        if (closed(*l.node)) {
          if (eval(*l.node) != l.positive) {
            undo();
            return false;
          }
          done[i] = 1;
          continue;
        }
        if (inlinable(block, l)) {
          // (exists y. A) && B == exists y. A && B, y being fresh here.
          std::vector<BlockVar> next_block = block;
          std::vector<Literal> next = lits;
          std::vector<char> next_done = done;
          next_done[i] = 1;
          const FormulaNode* body = &*l.node;
          for (; body->kind == l.node->kind; body = body->children[0].get())
            next_block.push_back({slot(body->bound), body->domain_size});
          flatten(*body, l.positive, next);
          next_done.resize(next.size(), 0);
          bool found = search(next_block, next, std::move(next_done));
          undo();
          return found;
        }
        auto [s, other] = pinned(block, l);
        if (s >= 0) {
          std::int64_t v = term(*other);
          if (v < 0 || v >= domain_of(block, s)) {
            undo();
            return false;
          }
          values_[s] = v;
          bound_[s] = 1;
          trail.push_back(s);
          done[i] = 1;
          changed = true;
        }
      }
    }

    std::size_t pending = lits.size();
    std::size_t best = lits.size();
    std::size_t best_unbound = SIZE_MAX;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (done[i]) continue;
      if (pending == lits.size() && is_split(lits[i])) pending = i;
      std::size_t unbound = 0;
      for (int s : node_info(lits[i].node).free_slots) unbound += bound_[s] ? 0 : 1;
      if (unbound < best_unbound) {
        best_unbound = unbound;
        best = i;
      }
    }
    if (best == lits.size()) {
      if (collected_) {
        record(block, 0);
        undo();
        return false;
      }
      undo();
      return true;
    }

    bool found = false;
    if (pending != lits.size()) {
      Literal l = lits[pending];
      for (auto& alt : split(l)) {
        std::vector<Literal> next = lits;
        std::vector<char> next_done = done;
        next_done[pending] = 1;
        next.insert(next.end(), alt.begin(), alt.end());
        next_done.resize(next.size(), 0);
        if (search(block, next, std::move(next_done))) {
          found = true;
          break;
        }
      }
    } else {
      int var = -1;
      for (int s : node_info(lits[best].node).free_slots)
        if (!bound_[s]) {
          var = s;
          break;
        }
      std::int64_t domain = domain_of(block, var);
      if (domain < 0) throw FormulaError("unassigned free variable during evaluation");
      for (std::int64_t v = 0; v < domain && !found; ++v) {
        values_[var] = v;
        bound_[var] = 1;
        found = search(block, lits, done);
      }
      bound_[var] = 0;
    }
    undo();
    return found;
  }

  // Adds every completion of the block's unbound variables to the solutions.
  void record(const std::vector<BlockVar>& block, std::size_t from) {
    for (std::size_t i = from; i < collect_count_; ++i) {
      if (bound_[block[i].slot]) continue;
      for (std::int64_t v = 0; v < block[i].domain; ++v) {
        values_[block[i].slot] = v;
        bound_[block[i].slot] = 1;
        record(block, i + 1);
      }
      bound_[block[i].slot] = 0;
      return;
    }
    std::vector<std::int64_t> values;
    for (std::size_t i = 0; i < collect_count_; ++i) values.push_back(values_[block[i].slot]);
    collected_->insert(std::move(values));
  }

  Formula root_;
  // Set while solutions() runs its own block; nested blocks clear it.
  std::set<std::vector<std::int64_t>>* collected_ = nullptr;
  std::size_t collect_count_ = 0;
  std::unordered_map<FormulaVar, int, FormulaVarHash> slots_;
  std::unordered_map<const Term*, int> term_slots_;
  std::unordered_map<const FormulaNode*, NodeInfo> info_;
  std::unordered_map<MemoKey, bool, MemoKeyHash> memo_;
  std::map<std::pair<const FormulaNode*, std::uint64_t>, bool> functional_;
  std::vector<std::int64_t> values_;
  std::vector<char> bound_;
};

/// Classical truth value of `f` under `v`; every free variable of `f`
/// (primed and indexed ones by their staged identity) must be assigned.
inline bool evaluate(const Formula& f, const Valuation& v) { return Evaluator(f).holds(v); }

}  // namespace predtrans
