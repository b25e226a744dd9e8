// Acceptance gate: runs every criterion and prints one PASS/FAIL line each.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "predtrans/predtrans.hpp"
#include "support/naive.hpp"

using namespace predtrans;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0: no limit
  std::function<Outcome()> run;
};

// Desk-scale programs: two variables over 0..3 or three over 0..2.
GeneratorConfig config(std::uint64_t seed) {
  GeneratorConfig c;
  c.seed = seed;
  c.max_depth = 3;
  if (seed % 2) {
    c.max_vars = 3;
    c.domain_size = 3;
  } else {
    c.max_vars = 2;
    c.domain_size = 4;
  }
  return c;
}

CheckOptions with(Method m) {
  CheckOptions o;
  o.method = m;
  return o;
}

// A fails report's witness must separate lhs and rhs under the reference
// evaluator.
bool witness_sound(const CheckReport& r) {
  if (!r.fails()) return true;
  if (!r.witness) return false;
  naive::Env env;
  for (std::size_t i = 0; i < r.decls.size(); ++i)
    env[FormulaVar::current(r.decls[i].name)] = r.witness->values[i];
  return naive::holds(r.lhs.formula, env) != naive::holds(r.rhs.formula, env);
}

Outcome count(const std::string& what, std::size_t good, std::size_t total, const std::string& first_bad) {
  Outcome o;
  o.ok = good == total;
  o.detail = what + " " + std::to_string(good) + "/" + std::to_string(total);
  if (!o.ok) o.detail += " (first failure: " + first_bad + ")";
  return o;
}

std::string describe(std::uint64_t seed, const CheckReport& r) {
  return "seed " + std::to_string(seed) + " " + r.claim + " " + to_string(r.verdict) + " " + r.notes;
}

Outcome criterion1() {
  std::vector<VarDecl> decls{{"x", 4, {}}};
  StateSpace space(decls);
  auto [havoc, abort] = demonstrate_theorem1(decls);
  bool ok = havoc.fails() && abort.fails() && witness_sound(havoc) && witness_sound(abort);
  ok = ok && havoc.witness && space.to_string(*havoc.witness) == "x=0";
  ok = ok && abort.witness && space.to_string(*abort.witness) == "x=0";

  Formula x0 = parse_formula("x = 0", decls);
  StateSet none(4), all(4, true);
  ok = ok && wlp_set(*Stmt::havoc("x"), x0, decls) == none && wp_set(*Stmt::havoc("x"), x0, decls) == all;
  for (const char* post : {"x = 0", "true", "false", "x < 2"}) {
    Formula phi = parse_formula(post, decls);
    ok = ok && wlp_set(*Stmt::abort(), phi, decls) == all && wp_set(*Stmt::abort(), phi, decls) == none;
  }
  return {ok, std::string("two failing implications, witnesses {") +
                  (havoc.witness ? space.to_string(*havoc.witness) : "-") + "} and {" +
                  (abort.witness ? space.to_string(*abort.witness) : "-") + "}"};
}

Outcome criterion2() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 500; ++i) {
    GeneratorConfig c = config(20000 + i);
    c.allow_abort = true;
    Program p = generate_program(c);
    Formula post = generate_post(p.decls, c.seed);
    for (Method m : {Method::Relational, Method::Structural}) {
      ++total;
      CheckReport r = check_theorem("theorem2", p, post, with(m));
      // Independent: the oracle's sets must agree with the conclusion.
      StateSet wp = wp_set(*p.body, post, p.decls), wlp = wlp_set(*p.body, post, p.decls);
      if (r.holds() && wp.subset_of(wlp))
        ++good;
      else if (bad.empty())
        bad = describe(c.seed, r);
    }
  }
  return count("wp => wlp holds", good, total, bad);
}

Outcome criterion3() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 500; ++i) {
    GeneratorConfig c = config(30000 + i);
    c.allow_havoc = true;
    c.require_termination = true;
    Program p = generate_program(c);
    Formula post = generate_post(p.decls, c.seed);
    for (Method m : {Method::Relational, Method::Structural}) {
      ++total;
      CheckReport r = check_theorem("theorem3", p, post, with(m));
      StateSet wp = wp_set(*p.body, post, p.decls), wlp = wlp_set(*p.body, post, p.decls);
      if (r.holds() && wlp.subset_of(wp))
        ++good;
      else if (bad.empty())
        bad = describe(c.seed, r);
    }
  }
  return count("wlp => wp holds", good, total, bad);
}

GeneratorConfig deterministic_terminating(std::uint64_t seed) {
  GeneratorConfig c = config(seed);
  c.require_termination = true;
  return c;
}

Outcome criterion4() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 500; ++i) {
    GeneratorConfig c = deterministic_terminating(40000 + i);
    Program p = generate_program(c);
    Formula post = generate_post(p.decls, c.seed);
    StateSpace space(p.decls);
    StateSet oracle_wp = wp_set(*p.body, post, p.decls);
    for (Method m : {Method::Relational, Method::Structural}) {
      ++total;
      CheckReport r = check_theorem("theorem4", p, post, with(m));
      bool ok = r.holds() && extension(r.lhs, space) == oracle_wp;
      if (ok)
        ++good;
      else if (bad.empty())
        bad = describe(c.seed, r);
    }
  }
  return count("wp == wlp holds", good, total, bad);
}

Outcome criterion5() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 500; ++i) {
    GeneratorConfig c = deterministic_terminating(40000 + i);
    Program p = generate_program(c);
    Formula post = generate_post(p.decls, c.seed);
    for (const char* claim : {"agreement-wp", "agreement-wlp"}) {
      ++total;
      CheckReport r = check_theorem(claim, p, post);
      if (r.holds())
        ++good;
      else if (bad.empty())
        bad = describe(c.seed, r);
    }
  }
  return count("relational == structural", good, total, bad);
}

Outcome criterion6() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 500; ++i) {
    GeneratorConfig c = config(60000 + i);
    c.allow_havoc = true;
    c.allow_abort = true;
    Program p = generate_program(c);
    Formula post = generate_post(p.decls, c.seed);
    TransitionRelation tr = build_rho(p);
    StateSpace space(p.decls);
    ++total;
    if (extension(wlp_via_duality(tr, post), space) == extension(wlp_relational(tr, post), space))
      ++good;
    else if (bad.empty())
      bad = "seed " + std::to_string(c.seed) + " relational";
    ++total;
    CheckReport r = check_theorem("duality", p, post, with(Method::Structural));
    if (r.holds())
      ++good;
    else if (bad.empty())
      bad = describe(c.seed, r);
  }
  return count("duality holds", good, total, bad);
}

Outcome criterion7() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 100; ++i) {
    GeneratorConfig c = config(70000 + i);
    Program p = generate_assignment(c);
    Formula post = generate_post(p.decls, c.seed);
    const VarDecl& d = *p.find(p.body->target);
    StateSpace space(p.decls);
    // Reference: evaluate the postcondition on the directly computed successor.
    StateSet direct(space.size());
    for (std::size_t s = 0; s < space.size(); ++s) {
      SuccessorSet out = run(*p.body, space.state(s), p.decls);
      if (out.finals.size() == 1 && naive::holds(post, space.valuation(out.finals.front()))) direct.insert(s);
    }
    Formula substituted = substitute(post, FormulaVar::current(d.name),
                                     Term::mod(to_term(*p.body->rhs, StageRef::current()), d.domain_size));
    for (Method m : {Method::Relational, Method::Structural}) {
      ++total;
      CheckReport r = check_theorem("lemma1", p, post, with(m));
      bool ok = r.holds() && extension(substituted, space) == direct &&
                extension(precondition(Transformer::Wp, m, p, post, 0), space) == direct &&
                extension(precondition(Transformer::Wlp, m, p, post, 0), space) == direct;
      if (ok)
        ++good;
      else if (bad.empty())
        bad = describe(c.seed, r);
    }
  }
  return count("wp == wlp == post[x := e]", good, total, bad);
}

Outcome criterion8() {
  std::size_t good = 0, total = 0, tried = 0;
  std::string bad;
  for (std::uint64_t seed = 80000; total < 50 && tried < 1000; ++seed, ++tried) {
    GeneratorConfig c = deterministic_terminating(seed);
    Program p = generate_program(c);
    GeneratorConfig c2 = c;
    c2.seed = seed + 500000;
    c2.max_vars = static_cast<std::uint32_t>(p.decls.size());
    Program q = generate_program(c2);
    if (q.decls.size() != p.decls.size()) continue;
    Formula post = generate_post(p.decls, seed);
    bool each = true;
    for (const Program* part : {&p, &q}) {
      for (Method m : {Method::Relational, Method::Structural})
        each = each && check_theorem("theorem4", *part, post, with(m)).holds();
    }
    if (!each) continue;
    Program both{p.decls, Stmt::seq(p.body, q.body)};
    ++total;
    bool ok = true;
    for (Method m : {Method::Relational, Method::Structural}) {
      CheckReport r = check_theorem("lemma2", both, post, with(m));
      CheckReport t4 = check_theorem("theorem4", both, post, with(m));
      if (!(r.holds() && t4.holds())) {
        ok = false;
        if (bad.empty()) bad = describe(seed, r.holds() ? t4 : r);
      }
    }
    good += ok;
  }
  Outcome o = count("sequence keeps wp == wlp", good, total, bad);
  if (total < 50) {
    o.ok = false;
    o.detail += " (only " + std::to_string(total) + " qualifying pairs)";
  }
  return o;
}

Outcome criterion9() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 100; ++i) {
    GeneratorConfig c = config(90000 + i);
    c.allow_havoc = true;
    c.allow_abort = true;
    Program p = generate_program(c);
    Generator g(c.seed + 777);
    StmtPtr q = g.stmt(c, p.decls, c.max_depth, {}, 0);
    ++total;
    CheckReport r = wp_true_composition_check(*p.body, *q, p.decls);
    // Reference: states from which p then q can finish, by the oracle.
    StateSpace space(p.decls);
    StateSet can_finish = wp_set(*Stmt::seq(p.body, q), Formula::truth(true), p.decls);
    if (r.holds() && extension(r.lhs, space) == can_finish && witness_sound(r))
      ++good;
    else if (bad.empty())
      bad = describe(c.seed, r);
  }
  return count("rho_P && rho_Q == wp(P; Q, true)", good, total, bad);
}

Outcome criterion10() {
  Program p = parse_program("var x in 0..3; var y in 0..1; while (true) do { skip; };");
  StateSpace space(p.decls);
  StateSet none(space.size()), all(space.size(), true);
  bool ok = true;
  for (std::uint64_t bound = 0; bound <= 10; ++bound) {
    TransitionRelation tr = build_rho(p, bound);
    for (const auto& succ : successor_sets(tr, space)) ok = ok && succ.empty();
  }
  std::vector<Formula> posts{Formula::truth(true), Formula::truth(false)};
  for (std::uint64_t seed = 0; seed < 20; ++seed) posts.push_back(generate_post(p.decls, seed));
  Oracle oracle(*p.body, p.decls);
  OracleTable table = oracle.table();
  for (bool d : table.diverges) ok = ok && d;
  for (const auto& phi : posts) {
    StateSet post = extension(phi, space);
    ok = ok && wp_set(table, post) == none && wlp_set(table, post) == all;
    for (Method m : {Method::Relational, Method::Structural}) {
      ok = ok && extension(precondition(Transformer::Wp, m, p, phi, 8), space) == none;
      ok = ok && extension(precondition(Transformer::Wlp, m, p, phi, 8), space) == all;
    }
  }
  return {ok, "rho empty at bounds 0..10; wp = {} and wlp = all for " + std::to_string(posts.size()) + " posts"};
}

Outcome criterion11() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 200; ++i) {
    GeneratorConfig c = config(110000 + i);
    c.allow_abort = true;
    Program p = generate_program(c);
    StateSpace space(p.decls);
    TransitionRelation tr = build_rho(p);
    ++total;
    if (tr.exact && successor_sets(tr, space) == Oracle(*p.body, p.decls).table().finals)
      ++good;
    else if (bad.empty())
      bad = "seed " + std::to_string(c.seed);
  }
  return count("rho == oracle relation", good, total, bad);
}

Outcome criterion12() {
  std::size_t good = 0, total = 0;
  std::string bad;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    std::vector<VarDecl> decls = Generator(i).decls(3, 2 + static_cast<std::int64_t>(i % 3));
    Formula f = generate_formula(decls, 120000 + i);
    Generator g(900000 + i);
    Valuation v;
    for (const auto& var : f->free_vars) {
      std::int64_t d = 0;
      for (const auto& decl : decls)
        if (decl.name == var.base) d = decl.domain_size;
      v[var] = static_cast<std::int64_t>(g.below(static_cast<std::uint64_t>(d)));
    }
    ++total;
    bool expected = naive::holds(f, v);
    bool ok = evaluate(f, v) == expected && evaluate(expand_quantifiers(f), v) == expected &&
              evaluate(simplify(f), v) == expected;
    if (ok)
      ++good;
    else if (bad.empty())
      bad = "formula seed " + std::to_string(120000 + i);
  }
  return count("evaluation preserved", good, total, bad);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Theorem 1 demonstration", 1.0, criterion1},
      {2, "wp implies wlp for deterministic relations", 60.0, criterion2},
      {3, "wlp implies wp for satisfiable relations", 60.0, criterion3},
      {4, "wp equals wlp for deterministic terminating programs", 120.0, criterion4},
      {5, "relational and structural agree", 0.0, criterion5},
      {6, "duality", 0.0, criterion6},
      {7, "assignments", 0.0, criterion7},
      {8, "sequencing", 0.0, criterion8},
      {9, "composition remark", 0.0, criterion9},
      {10, "nontermination", 1.0, criterion10},
      {11, "relation matches oracle", 0.0, criterion11},
      {12, "formula engine", 0.0, criterion12},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = c.time_limit_s == 0.0 || secs < c.time_limit_s;
    bool pass = o.ok && in_time;
    failures += !pass;
    char timing[64];
    if (c.time_limit_s > 0.0)
      std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", secs, c.time_limit_s);
    else
      std::snprintf(timing, sizeof timing, "%.2f s", secs);
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << " " << c.name << ": " << o.detail
              << " (" << timing << ")" << std::endl;
  }
  std::cout << (failures ? "acceptance: FAILED " + std::to_string(failures) + " criteria" : "acceptance: all criteria pass")
            << std::endl;
  return failures ? 1 : 0;
}
