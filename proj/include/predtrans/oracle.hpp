#pragma once

// Concrete semantics by exhaustive exploration. The statement is compiled
// to a small control-flow graph; a run from a start state is a depth-first
// search over (node, state) configurations. Exit configurations are the
// final states, and a configuration reached again while still on the
// search stack is a cycle, i.e. a diverging execution.
//
// Expressions are evaluated here directly from the syntax tree, without
// going through the formula engine, so that the two can be compared.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/error.hpp"
#include "predtrans/evaluate.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/state_space.hpp"

namespace predtrans {

struct SuccessorSet {
  State origin;
  std::vector<State> finals;  // sorted by state index
  bool diverges = false;
};

/// Per start-state index: the final states and whether some run diverges.
struct OracleTable {
  std::vector<StateSet> finals;
  std::vector<bool> diverges;
};

class Oracle {
 public:
  Oracle(const Stmt& stmt, std::vector<VarDecl> decls, const Limits& limits = {})
      : space_(std::move(decls), limits), limits_(limits) {
    nodes_.push_back({Node::Kind::Exit});
    entry_ = compile(stmt, kExit);
  }

  const StateSpace& space() const { return space_; }

  SuccessorSet run(const State& start) const {
    if (!space_.in_range(start)) throw Error("start state is outside the declared domains");
    auto [finals, diverges] = explore(space_.index_of(start));
    SuccessorSet out;
    out.origin = start;
    for (auto i : finals.indices()) out.finals.push_back(space_.state(i));
    out.diverges = diverges;
    return out;
  }

  OracleTable table() const {
    OracleTable t;
    t.finals.reserve(space_.size());
    t.diverges.reserve(space_.size());
    for (std::size_t i = 0; i < space_.size(); ++i) {
      auto [finals, diverges] = explore(i);
      t.finals.push_back(std::move(finals));
      t.diverges.push_back(diverges);
    }
    return t;
  }

 private:
  static constexpr int kExit = 0;

  struct Node {
    enum class Kind { Exit, Assign, Havoc, Abort, Branch };
    Kind kind;
    std::size_t target = 0;  // variable position
    const Expr* rhs = nullptr;
    const BoolExpr* guard = nullptr;
    int next = kExit;  // successor; the then-successor for Branch
    int other = kExit;  // else-successor for Branch
  };

  std::size_t position(const std::string& name) const {
    auto p = space_.position(name);
    if (!p) throw Error("undeclared variable '" + name + "'");
    return *p;
  }

  int add(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
  }

  // Returns the entry node of `s` followed by `next`.
  int compile(const Stmt& s, int next) {
    switch (s.kind) {
      case Stmt::Kind::Skip: return next;
      case Stmt::Kind::Abort: return add({Node::Kind::Abort});
      case Stmt::Kind::Assign: {
        Node n{Node::Kind::Assign};
        n.target = position(s.target);
        n.rhs = s.rhs.get();
        n.next = next;
        return add(n);
      }
      case Stmt::Kind::Havoc: {
        Node n{Node::Kind::Havoc};
        n.target = position(s.target);
        n.next = next;
        return add(n);
      }
      case Stmt::Kind::Seq: return compile(*s.first, compile(*s.second, next));
      case Stmt::Kind::If: {
        Node n{Node::Kind::Branch};
        n.guard = s.guard.get();
        n.next = compile(*s.first, next);
        n.other = compile(*s.second, next);
        return add(n);
      }
      case Stmt::Kind::While: {
        Node n{Node::Kind::Branch};
        n.guard = s.guard.get();
        n.other = next;
        int head = add(n);
        int body = compile(s.body(), head);
        nodes_[static_cast<std::size_t>(head)].next = body;
        return head;
      }
    }
    return next;
  }

  static std::int64_t wrap(std::int64_t a, std::int64_t b, ArithOp op) {
    auto ua = static_cast<std::uint64_t>(a);
    auto ub = static_cast<std::uint64_t>(b);
    switch (op) {
      case ArithOp::Add: return static_cast<std::int64_t>(ua + ub);
      case ArithOp::Sub: return static_cast<std::int64_t>(ua - ub);
      case ArithOp::Mul: return static_cast<std::int64_t>(ua * ub);
    }
    return 0;
  }

  std::int64_t value(const Expr& e, const State& s) const {
    switch (e.kind) {
      case Expr::Kind::Constant: return e.value;
      case Expr::Kind::Variable: return s.values[position(e.name)];
      case Expr::Kind::Binary: return wrap(value(*e.lhs, s), value(*e.rhs, s), e.op);
    }
    return 0;
  }

  bool truth(const BoolExpr& b, const State& s) const {
    switch (b.kind) {
      case BoolExpr::Kind::True: return true;
      case BoolExpr::Kind::False: return false;
      case BoolExpr::Kind::Compare: return compare(b.cmp, value(*b.lhs, s), value(*b.rhs, s));
      case BoolExpr::Kind::Not: return !truth(*b.left, s);
      case BoolExpr::Kind::And: return truth(*b.left, s) && truth(*b.right, s);
      case BoolExpr::Kind::Or: return truth(*b.left, s) || truth(*b.right, s);
    }
    return false;
  }

  // Successor configurations of (node, state).
  void step(int node, std::size_t state, std::vector<std::pair<int, std::size_t>>& out) const {
    out.clear();
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    State s = space_.state(state);
    switch (n.kind) {
      case Node::Kind::Exit:
      case Node::Kind::Abort: return;
      case Node::Kind::Assign:
        s.values[n.target] = euclid_mod(value(*n.rhs, s), space_.decls()[n.target].domain_size);
        out.emplace_back(n.next, space_.index_of(s));
        return;
      case Node::Kind::Havoc:
        for (std::int64_t v = 0; v < space_.decls()[n.target].domain_size; ++v) {
          s.values[n.target] = v;
          out.emplace_back(n.next, space_.index_of(s));
        }
        return;
      case Node::Kind::Branch: out.emplace_back(truth(*n.guard, s) ? n.next : n.other, state); return;
    }
  }

  std::pair<StateSet, bool> explore(std::size_t start) const {
    const std::size_t n_states = space_.size();
    auto key = [&](int node, std::size_t state) { return static_cast<std::size_t>(node) * n_states + state; };
    // 0 = unvisited, 1 = on the stack, 2 = finished
    std::vector<char> color(nodes_.size() * n_states, 0);
    StateSet finals(n_states);
    bool diverges = false;
    std::uint64_t explored = 0;

    struct Frame {
      int node;
      std::size_t state;
      std::vector<std::pair<int, std::size_t>> succ;
      std::size_t next = 0;
    };
    std::vector<Frame> stack;
    auto push = [&](int node, std::size_t state) {
      if (++explored > limits_.config_ceiling)
        throw CeilingExceeded("oracle explored more than " + std::to_string(limits_.config_ceiling) +
                              " configurations");
      color[key(node, state)] = 1;
      Frame f{node, state, {}, 0};
      if (nodes_[static_cast<std::size_t>(node)].kind == Node::Kind::Exit) finals.insert(state);
      step(node, state, f.succ);
      stack.push_back(std::move(f));
    };

    push(entry_, start);
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next == top.succ.size()) {
        color[key(top.node, top.state)] = 2;
        stack.pop_back();
        continue;
      }
      auto [node, state] = top.succ[top.next++];
      char c = color[key(node, state)];
      if (c == 1) diverges = true;
      if (c == 0) push(node, state);
    }
    return {std::move(finals), diverges};
  }

  StateSpace space_;
  Limits limits_;
  std::vector<Node> nodes_;
  int entry_ = kExit;
};

inline SuccessorSet run(const Stmt& stmt, const State& start, const std::vector<VarDecl>& decls,
                        const Limits& limits = {}) {
  return Oracle(stmt, decls, limits).run(start);
}

/// States satisfying `f` (over current-stage variables).
inline StateSet extension(const Formula& f, const StateSpace& space) {
  Evaluator ev(f);
  StateSet out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    space.bind(ev, space.state(i));
    if (ev.holds()) out.insert(i);
  }
  return out;
}

/// States whose every final state satisfies `post`; includes states with
/// no final state at all.
inline StateSet wlp_set(const OracleTable& table, const StateSet& post) {
  StateSet out(table.finals.size());
  for (std::size_t i = 0; i < table.finals.size(); ++i)
    if (table.finals[i].subset_of(post)) out.insert(i);
  return out;
}

/// States with some final state satisfying `post`.
inline StateSet wp_set(const OracleTable& table, const StateSet& post) {
  StateSet out(table.finals.size());
  for (std::size_t i = 0; i < table.finals.size(); ++i) {
    for (auto j : table.finals[i].indices())
      if (post.contains(j)) {
        out.insert(i);
        break;
      }
  }
  return out;
}

inline StateSet wlp_set(const Stmt& stmt, const Formula& post, const std::vector<VarDecl>& decls,
                        const Limits& limits = {}) {
  Oracle oracle(stmt, decls, limits);
  return wlp_set(oracle.table(), extension(post, oracle.space()));
}

inline StateSet wp_set(const Stmt& stmt, const Formula& post, const std::vector<VarDecl>& decls,
                       const Limits& limits = {}) {
  Oracle oracle(stmt, decls, limits);
  return wp_set(oracle.table(), extension(post, oracle.space()));
}

}  // namespace predtrans
