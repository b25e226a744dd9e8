#pragma once

// wp and wlp, computed two ways:
//
//  relational   wlp(P, phi) = forall x'. rho(x, x') -> phi(x')
//               wp(P, phi)  = exists x'. rho(x, x') && phi(x')
//  structural   by recursion on the statement; loops are expanded into a
//               nest of conditionals whose innermost position is true for
//               wlp and false for wp.
//
// Unrolled levels that grow large are passed through the loop body via a
// frame of fresh variables y instead of by substitution:
//   wp(B, Q)  = exists y. wp(B, x = y) && Q(y)
//   wlp(B, Q) = forall y. !wlp(B, x != y) -> Q(y)
// so each level mentions the previous one once.
//
// Both methods cover runs of at most `bound` loop iterations per loop.

#include <cstdint>
#include <string>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/precondition.hpp"
#include "predtrans/transition.hpp"

namespace predtrans {

inline Precondition wlp_relational(const TransitionRelation& tr, const Formula& post) {
  detail::RhoBuilder closer(tr.decls, 0);
  Formula f = closer.close(Formula::Kind::Forall, StageRef::primed(), Formula::implication(tr.rho, prime(post)));
  return {f, Method::Relational, Transformer::Wlp};
}

inline Precondition wp_relational(const TransitionRelation& tr, const Formula& post) {
  detail::RhoBuilder closer(tr.decls, 0);
  Formula f = closer.close(Formula::Kind::Exists, StageRef::primed(), tr.rho && prime(post));
  return {f, Method::Relational, Transformer::Wp};
}

namespace detail {

class StructuralBuilder {
 public:
  StructuralBuilder(const std::vector<VarDecl>& decls, std::uint64_t bound, Transformer t, std::uint32_t first_fresh)
      : decls_(decls), bound_(bound), wp_(t == Transformer::Wp), next_(first_fresh) {}

  Formula run(const Stmt& s, const Formula& post) {
    switch (s.kind) {
      case Stmt::Kind::Skip: return post;
      case Stmt::Kind::Abort: return Formula::truth(!wp_);
      case Stmt::Kind::Assign: {
        const VarDecl& d = decl(s.target);
        auto value = Term::mod(to_term(*s.rhs, StageRef::current()), d.domain_size);
        return simplify(substitute(post, FormulaVar::current(d.name), value));
      }
      case Stmt::Kind::Havoc: {
        const VarDecl& d = decl(s.target);
        FormulaVar choice = FormulaVar::indexed(d.name, next_++);
        Formula body = substitute(post, FormulaVar::current(d.name), Term::variable(choice));
        return simplify(wp_ ? Formula::exists(choice, d.domain_size, body)
                            : Formula::forall(choice, d.domain_size, body));
      }
      case Stmt::Kind::Seq: return run(*s.first, run(*s.second, post));
      case Stmt::Kind::If: {
        Formula g = to_formula(*s.guard, StageRef::current());
        return branch(g, run(*s.first, post), run(*s.second, post));
      }
      case Stmt::Kind::While: {
        Formula g = to_formula(*s.guard, StageRef::current());
        Formula r = Formula::truth(!wp_);
        // bound + 1 levels: runs of up to `bound` iterations are decided.
        for (std::uint64_t k = 0; k <= bound_; ++k) {
          Formula after = r->tree_size <= kInlineSize ? run(s.body(), r) : through_frame(s.body(), r);
          r = branch(g, after, post);
        }
        return r;
      }
    }
    return post;
  }

 private:
  static constexpr std::uint64_t kInlineSize = 256;

  Formula through_frame(const Stmt& body, const Formula& post) {
    std::vector<FormulaVar> frame;
    std::vector<Formula> links;
    Formula moved = post;
    for (const auto& d : decls_) {
      frame.push_back(FormulaVar::indexed(d.name, next_++));
      links.push_back(eq(Term::variable(FormulaVar::current(d.name)), Term::variable(frame.back())));
      moved = substitute(moved, FormulaVar::current(d.name), Term::variable(frame.back()));
    }
    Formula link = Formula::conjunction(std::move(links));
    Formula f = wp_ ? (run(body, link) && moved) : Formula::implication(!run(body, !link), moved);
    for (std::size_t i = frame.size(); i-- > 0;)
      f = wp_ ? Formula::exists(frame[i], decls_[i].domain_size, f)
              : Formula::forall(frame[i], decls_[i].domain_size, f);
    return simplify(f);
  }

  Formula branch(const Formula& g, const Formula& then_pre, const Formula& else_pre) const {
    if (wp_) return simplify((g && then_pre) || (!g && else_pre));
    return simplify(Formula::implication(g, then_pre) && Formula::implication(!g, else_pre));
  }

  const VarDecl& decl(const std::string& name) const {
    for (const auto& d : decls_)
      if (d.name == name) return d;
    throw FormulaError("undeclared variable '" + name + "'");
  }

  const std::vector<VarDecl>& decls_;
  std::uint64_t bound_;
  bool wp_;
  std::uint32_t next_;
};

inline Precondition structural(const Stmt& stmt, const Formula& post, const std::vector<VarDecl>& decls,
                               std::uint64_t bound, Transformer t) {
  for (const auto& v : post->free_vars)
    if (v.stage != Stage::Current)
      throw FormulaError("postcondition may mention current-stage variables only, found " + v.name());
  StructuralBuilder b(decls, bound, t, post->max_index + 1);
  return {b.run(stmt, post), Method::Structural, t};
}

}  // namespace detail

inline Precondition wlp_structural(const Stmt& stmt, const Formula& post, const std::vector<VarDecl>& decls,
                                   std::uint64_t bound) {
  return detail::structural(stmt, post, decls, bound, Transformer::Wlp);
}

inline Precondition wp_structural(const Stmt& stmt, const Formula& post, const std::vector<VarDecl>& decls,
                                  std::uint64_t bound) {
  return detail::structural(stmt, post, decls, bound, Transformer::Wp);
}

/// wlp as !wp(P, !post), over the relation.
inline Precondition wlp_via_duality(const TransitionRelation& tr, const Formula& post) {
  return {!wp_relational(tr, !post).formula, Method::Relational, Transformer::Wlp};
}

/// wlp as !wp(P, !post), by structural recursion.
inline Precondition wlp_via_duality(const Stmt& stmt, const Formula& post, const std::vector<VarDecl>& decls,
                                    std::uint64_t bound) {
  return {simplify(!wp_structural(stmt, !post, decls, bound).formula), Method::Structural, Transformer::Wlp};
}

/// The precondition of `program` for `post` by either method. `tr` must be
/// the program's relation at `bound` when the method is relational.
inline Precondition precondition(Transformer t, Method m, const Program& program, const Formula& post,
                                 std::uint64_t bound, const TransitionRelation* tr = nullptr) {
  if (m == Method::Structural)
    return t == Transformer::Wp ? wp_structural(*program.body, post, program.decls, bound)
                                : wlp_structural(*program.body, post, program.decls, bound);
  TransitionRelation local;
  if (!tr) {
    local = build_rho(program, bound);
    tr = &local;
  }
  return t == Transformer::Wp ? wp_relational(*tr, post) : wlp_relational(*tr, post);
}

}  // namespace predtrans
