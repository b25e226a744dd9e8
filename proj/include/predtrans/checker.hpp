#pragma once

// Extensional comparison of preconditions and the theorem claims built on
// it. Every claim first establishes that the preconditions it compares are
// exact (or certifies them against the oracle), then checks the claim's
// hypotheses, and only then tests the conclusion.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/error.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/oracle.hpp"
#include "predtrans/precondition.hpp"
#include "predtrans/report.hpp"
#include "predtrans/state_space.hpp"
#include "predtrans/transformers.hpp"
#include "predtrans/transition.hpp"

namespace predtrans {

namespace detail {

inline CheckReport compare_extensions(std::string claim, const Precondition& a, const Precondition& b,
                                      const StateSet& ea, const StateSet& eb, const StateSpace& space,
                                      bool both_ways) {
  CheckReport r;
  r.claim = std::move(claim);
  r.lhs = a;
  r.rhs = b;
  r.decls = space.decls();
  auto only_a = ea.first_not_in(eb);
  auto only_b = both_ways ? eb.first_not_in(ea) : std::nullopt;
  if (!only_a && !only_b) {
    r.verdict = Verdict::Holds;
    return r;
  }
  r.verdict = Verdict::Fails;
  const bool pick_a = only_a && (!only_b || *only_a < *only_b);
  State w = space.state(pick_a ? *only_a : *only_b);
  r.witness = w;
  r.notes = "{" + space.to_string(w) + "} satisfies " + (pick_a ? "lhs" : "rhs") + " but not " +
            (pick_a ? "rhs" : "lhs");
  return r;
}

}  // namespace detail

/// Holds iff every state satisfying `a` satisfies `b`.
inline CheckReport implies(const Precondition& a, const Precondition& b, const StateSpace& space) {
  return detail::compare_extensions("implies", a, b, extension(a, space), extension(b, space), space, false);
}

inline CheckReport implies(const Precondition& a, const Precondition& b, const std::vector<VarDecl>& decls,
                           const Limits& limits = {}) {
  return implies(a, b, StateSpace(decls, limits));
}

/// Holds iff `a` and `b` are satisfied by the same states.
inline CheckReport equivalent(const Precondition& a, const Precondition& b, const StateSpace& space) {
  return detail::compare_extensions("equivalent", a, b, extension(a, space), extension(b, space), space, true);
}

inline CheckReport equivalent(const Precondition& a, const Precondition& b, const std::vector<VarDecl>& decls,
                              const Limits& limits = {}) {
  return equivalent(a, b, StateSpace(decls, limits));
}

struct CheckOptions {
  Method method = Method::Structural;
  /// Defaults to the product of the domain sizes.
  std::optional<std::uint64_t> unroll_bound;
  Limits limits;
};

/// Lazily computed facts about one program and postcondition, shared by
/// the claims that need them.
class Analysis {
 public:
  Analysis(Program program, Formula post, const CheckOptions& options = {})
      : program_(std::move(program)),
        post_(std::move(post)),
        limits_(options.limits),
        space_(program_.decls, limits_),
        bound_(options.unroll_bound ? *options.unroll_bound : default_unroll_bound(program_.decls, limits_)) {}

  const Program& program() const { return program_; }
  const Formula& post() const { return post_; }
  const StateSpace& space() const { return space_; }
  std::uint64_t bound() const { return bound_; }

  const TransitionRelation& rho() {
    if (!rho_) rho_ = build_rho(*program_.body, program_.decls, bound_, limits_);
    return *rho_;
  }

  const OracleTable& oracle() {
    if (!oracle_) oracle_ = Oracle(*program_.body, program_.decls, limits_).table();
    return *oracle_;
  }

  const StateSet& post_set() {
    if (!post_set_) post_set_ = extension(post_, space_);
    return *post_set_;
  }

  StateSet oracle_set(Transformer t) {
    return t == Transformer::Wp ? wp_set(oracle(), post_set()) : wlp_set(oracle(), post_set());
  }

  /// Whether rho equals the oracle's relation. Decided syntactically when
  /// possible, otherwise by comparing all pairs.
  bool rho_exact() {
    if (rho_exact_) return *rho_exact_;
    if (rho().exact) {
      rho_exact_ = true;
    } else {
      rho_exact_ = successor_sets(rho(), space_) == oracle().finals;
      rho_note_ = *rho_exact_ ? "relation certified exact against the oracle at bound " + std::to_string(bound_)
                              : "relation truncated at bound " + std::to_string(bound_) +
                                    " differs from the oracle";
    }
    return *rho_exact_;
  }

  const Precondition& pre(Transformer t, Method m) {
    auto& slot = pres_[index(t, m)];
    if (!slot) slot = precondition(t, m, program_, post_, bound_, m == Method::Relational ? &rho() : nullptr);
    return *slot;
  }

  const StateSet& ext(Transformer t, Method m) {
    auto& slot = exts_[index(t, m)];
    if (!slot) slot = extension(pre(t, m), space_);
    return *slot;
  }

  /// Whether the precondition computed by `m` has the unbounded meaning.
  bool exact(Transformer t, Method m) {
    if (m == Method::Relational) return rho_exact();
    if (detail::loops_exact(*program_.body, bound_, space_.size())) return true;
    bool same = ext(t, m) == oracle_set(t);
    add(std::string(to_string(t)) + " (structural) " +
        (same ? "certified exact against the oracle" : "differs from the oracle") + " at bound " +
        std::to_string(bound_));
    return same;
  }

  /// Notes accumulated while certifying exactness.
  std::string notes() const {
    std::string out = rho_note_;
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    return out;
  }

 private:
  static std::size_t index(Transformer t, Method m) {
    return (t == Transformer::Wp ? 0 : 2) + (m == Method::Relational ? 0 : 1);
  }

  void add(std::string note) {
    for (const auto& n : notes_)
      if (n == note) return;
    notes_.push_back(std::move(note));
  }

  Program program_;
  Formula post_;
  Limits limits_;
  StateSpace space_;
  std::uint64_t bound_;
  std::optional<TransitionRelation> rho_;
  std::optional<OracleTable> oracle_;
  std::optional<StateSet> post_set_;
  std::optional<bool> rho_exact_;
  std::string rho_note_;
  std::vector<std::string> notes_;
  std::array<std::optional<Precondition>, 4> pres_;
  std::array<std::optional<StateSet>, 4> exts_;
};

/// Claims accepted by check_theorem.
inline const std::vector<std::string>& supported_claims() {
  static const std::vector<std::string> claims{
      "theorem2", "theorem3",  "theorem3-global", "theorem4",     "lemma1",      "lemma2",
      "duality",  "agreement-wp", "agreement-wlp", "composition"};
  return claims;
}

namespace detail {

// A report that does not compare extensions; lhs and rhs still show the
// preconditions the claim is about.
inline CheckReport blank(const std::string& claim, Analysis& a, Verdict v, const std::string& note,
                         std::pair<Transformer, Method> lhs, std::pair<Transformer, Method> rhs) {
  CheckReport r;
  r.claim = claim;
  r.verdict = v;
  r.decls = a.program().decls;
  r.lhs = a.pre(lhs.first, lhs.second);
  r.rhs = a.pre(rhs.first, rhs.second);
  r.notes = note;
  return r;
}

inline CheckReport compare_pre(const std::string& claim, Analysis& a, Transformer lt, Method lm, Transformer rt,
                               Method rm, bool both_ways) {
  return compare_extensions(claim, a.pre(lt, lm), a.pre(rt, rm), a.ext(lt, lm), a.ext(rt, rm), a.space(),
                            both_ways);
}

// Inconclusive report when either side is not exact, else nullopt.
inline std::optional<CheckReport> require_exact(const std::string& claim, Analysis& a,
                                                std::vector<std::pair<Transformer, Method>> sides) {
  bool ok = true;
  for (auto [t, m] : sides) ok = a.exact(t, m) && ok;
  if (ok) return std::nullopt;
  return blank(claim, a, Verdict::InconclusiveTruncated, a.notes(), sides.front(), sides.back());
}

inline std::string successors_text(const StateSpace& space, const std::vector<State>& states) {
  std::string out;
  for (const auto& s : states) out += (out.empty() ? "{" : ", {") + space.to_string(s) + "}";
  return out;
}

// A statement whose relation is a total function: exactly one successor
// from every state. Returns a note describing the violation, if any.
inline std::optional<std::pair<State, std::string>> total_function_violation(const Stmt& s, Analysis& parent,
                                                                             const std::string& name) {
  Program sub{parent.program().decls, std::shared_ptr<const Stmt>(std::shared_ptr<const Stmt>{}, &s)};
  CheckOptions opts;
  opts.unroll_bound = parent.bound();
  Analysis a(sub, Formula::truth(true), opts);
  if (!a.rho_exact()) return std::make_pair(State{}, name + ": " + a.notes());
  const StateSpace& space = a.space();
  auto det = is_semantically_deterministic(a.rho());
  if (!det.holds)
    return std::make_pair(*det.witness, name + " is not deterministic: {" + space.to_string(*det.witness) +
                                            "} has successors " + successors_text(space, det.successors));
  auto sat = is_pointwise_satisfiable(a.rho());
  if (!sat.holds)
    return std::make_pair(*sat.witness, name + " has no successor from {" + space.to_string(*sat.witness) + "}");
  return std::nullopt;
}

}  // namespace detail

/// Checks the relation of the composition of `p` and `q` against
/// wp(p; q, true): both are the states from which p then q can finish.
inline CheckReport wp_true_composition_check(const Stmt& p, const Stmt& q, const std::vector<VarDecl>& decls,
                                             std::optional<std::uint64_t> unroll_bound = std::nullopt,
                                             const Limits& limits = {}) {
  const std::uint64_t bound = unroll_bound ? *unroll_bound : default_unroll_bound(decls, limits);
  StateSpace space(decls, limits);
  detail::RhoBuilder builder(decls, bound);
  Formula rho_p = builder.build(p, StageRef::current(), StageRef::primed());
  const StageRef after = StageRef::indexed(builder.fresh());
  Formula rho_q = builder.build(q, StageRef::primed(), after);
  Formula chained = builder.close(Formula::Kind::Exists, StageRef::primed(),
                                  builder.close(Formula::Kind::Exists, after, rho_p && rho_q));
  Precondition lhs{chained, Method::Relational, Transformer::Wp};
  auto seq = Stmt::seq(std::shared_ptr<const Stmt>(std::shared_ptr<const Stmt>{}, &p),
                       std::shared_ptr<const Stmt>(std::shared_ptr<const Stmt>{}, &q));
  Precondition rhs = wp_relational(build_rho(*seq, decls, bound, limits), Formula::truth(true));
  CheckReport r = equivalent(lhs, rhs, space);
  r.claim = "composition";
  return r;
}

/// Runs one claim on `program` and `post`. Unknown claims throw CheckError.
inline CheckReport check_theorem(const std::string& claim, const Program& program, const Formula& post,
                                 const CheckOptions& options = {}) {
  using T = Transformer;
  const Method m = options.method;
  Analysis a(program, post, options);
  const std::pair wp_side{T::Wp, m};
  const std::pair wlp_side{T::Wlp, m};
  auto finish = [&](CheckReport r) {
    r.claim = claim;
    add_note(r, a.notes());
    return r;
  };

  if (claim == "theorem2" || claim == "theorem3" || claim == "theorem3-global") {
    if (auto r = detail::require_exact(claim, a, {{T::Wp, m}, {T::Wlp, m}})) return finish(*r);
    if (!a.rho_exact()) return finish(*detail::require_exact(claim, a, {{T::Wp, Method::Relational}}));
    const StateSpace& space = a.space();
    if (claim == "theorem2") {
      auto det = is_semantically_deterministic(a.rho());
      if (!det.holds) {
        CheckReport r = detail::blank(claim, a, Verdict::SideConditionViolated,
                                      "relation is not deterministic: {" + space.to_string(*det.witness) +
                                          "} has successors " + detail::successors_text(space, det.successors),
                                      wp_side, wlp_side);
        r.witness = det.witness;
        return finish(r);
      }
      return finish(detail::compare_pre(claim, a, T::Wp, m, T::Wlp, m, false));
    }
    if (claim == "theorem3") {
      auto sat = is_pointwise_satisfiable(a.rho());
      if (!sat.holds) {
        CheckReport r = detail::blank(claim, a, Verdict::SideConditionViolated,
                                      "relation is not satisfiable at {" + space.to_string(*sat.witness) + "}",
                                      wlp_side, wp_side);
        r.witness = sat.witness;
        return finish(r);
      }
      return finish(detail::compare_pre(claim, a, T::Wlp, m, T::Wp, m, false));
    }
    if (!is_globally_satisfiable(a.rho()))
      return finish(detail::blank(claim, a, Verdict::SideConditionViolated, "relation is empty", wlp_side, wp_side));
    CheckReport r = detail::compare_pre(claim, a, T::Wlp, m, T::Wp, m, false);
    add_note(r, "hypothesis read as: some pair of states satisfies the relation");
    return finish(r);
  }

  if (claim == "theorem4") {
    if (!is_syntactically_deterministic(program))
      return finish(detail::blank(claim, a, Verdict::SideConditionViolated, "program contains havoc", wp_side, wlp_side));
    const OracleTable& table = a.oracle();
    for (std::size_t i = 0; i < table.finals.size(); ++i) {
      if (table.diverges[i] || table.finals[i].count() != 1) {
        CheckReport r = detail::blank(claim, a, Verdict::SideConditionViolated,
                                      "execution from {" + a.space().to_string(a.space().state(i)) + "} " +
                                          (table.diverges[i] ? "does not terminate" : "aborts"),
                                      wp_side, wlp_side);
        r.witness = a.space().state(i);
        return finish(r);
      }
    }
    if (auto r = detail::require_exact(claim, a, {{T::Wp, m}, {T::Wlp, m}})) return finish(*r);
    return finish(detail::compare_pre(claim, a, T::Wp, m, T::Wlp, m, true));
  }

  if (claim == "lemma1") {
    const Stmt& body = *program.body;
    if (body.kind != Stmt::Kind::Assign)
      return finish(detail::blank(claim, a, Verdict::SideConditionViolated, "program is not a single assignment", wp_side,
                                  wlp_side));
    const VarDecl* d = program.find(body.target);
    Precondition substituted{
        simplify(substitute(post, FormulaVar::current(d->name),
                            Term::mod(to_term(*body.rhs, StageRef::current()), d->domain_size))),
        m, T::Wp};
    CheckReport r = detail::compare_pre(claim, a, T::Wp, m, T::Wlp, m, true);
    if (!r.holds()) return finish(r);
    r = detail::compare_extensions(claim, a.pre(T::Wp, m), substituted, a.ext(T::Wp, m),
                                   extension(substituted, a.space()), a.space(), true);
    return finish(r);
  }

  if (claim == "lemma2" || claim == "composition") {
    const Stmt& body = *program.body;
    if (body.kind != Stmt::Kind::Seq)
      return finish(detail::blank(claim, a, Verdict::SideConditionViolated, "program is not a sequence", wp_side, wlp_side));
    if (claim == "composition")
      return finish(wp_true_composition_check(*body.first, *body.second, program.decls, a.bound(), options.limits));
    for (auto [part, name] : {std::pair{body.first.get(), "first part"}, std::pair{body.second.get(), "second part"}}) {
      if (auto v = detail::total_function_violation(*part, a, name)) {
        CheckReport r = detail::blank(claim, a, Verdict::SideConditionViolated, v->second, wp_side, wlp_side);
        if (!v->first.values.empty()) r.witness = v->first;
        return finish(r);
      }
    }
    if (auto r = detail::require_exact(claim, a, {{T::Wp, m}, {T::Wlp, m}})) return finish(*r);
    return finish(detail::compare_pre(claim, a, T::Wp, m, T::Wlp, m, true));
  }

  if (claim == "duality") {
    Precondition dual = m == Method::Relational ? wlp_via_duality(a.rho(), post)
                                                : wlp_via_duality(*program.body, post, program.decls, a.bound());
    return finish(detail::compare_extensions(claim, dual, a.pre(T::Wlp, m), extension(dual, a.space()),
                                             a.ext(T::Wlp, m), a.space(), true));
  }

  if (claim == "agreement-wp" || claim == "agreement-wlp") {
    const T t = claim == "agreement-wp" ? T::Wp : T::Wlp;
    if (auto r = detail::require_exact(claim, a, {{t, Method::Relational}, {t, Method::Structural}}))
      return finish(*r);
    return finish(detail::compare_pre(claim, a, t, Method::Relational, t, Method::Structural, true));
  }

  if (claim == "theorem1")
    throw CheckError("theorem1 is not checked per program; use demonstrate_theorem1 (demo-theorem1)");
  throw CheckError("unknown claim '" + claim + "'");
}

/// The two counterexamples showing neither transformer implies the other
/// in general: wp(havoc x, x = 0) does not imply wlp, and wlp(abort, x = 0)
/// does not imply wp. `x` is the first variable with at least two values.
inline std::pair<CheckReport, CheckReport> demonstrate_theorem1(const std::vector<VarDecl>& decls,
                                                                const Limits& limits = {}) {
  if (decls.empty()) throw CheckError("demonstrate_theorem1 needs at least one declared variable");
  const VarDecl* x = &decls.front();
  for (const auto& d : decls)
    if (d.domain_size >= 2) {
      x = &d;
      break;
    }
  StateSpace space(decls, limits);
  Formula post = eq(Term::variable(FormulaVar::current(x->name)), Term::constant(0));

  TransitionRelation havoc = build_rho(*Stmt::havoc(x->name), decls, 0, limits);
  CheckReport first = implies(wp_relational(havoc, post), wlp_relational(havoc, post), space);
  first.claim = "theorem1-havoc";
  add_note(first, "havoc " + x->name + " with post " + to_string(post));
  if (x->domain_size < 2) add_note(first, "degenerate: havoc over a single-value domain is deterministic");

  TransitionRelation abort = build_rho(*Stmt::abort(), decls, 0, limits);
  CheckReport second = implies(wlp_relational(abort, post), wp_relational(abort, post), space);
  second.claim = "theorem1-abort";
  add_note(second, "abort with post " + to_string(post));
  return {std::move(first), std::move(second)};
}

}  // namespace predtrans
