#include <gtest/gtest.h>

#include "predtrans/evaluate.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/generator.hpp"
#include "predtrans/parser.hpp"

#include <functional>
#include "support/naive.hpp"

using namespace predtrans;

namespace {

const std::vector<VarDecl> kXY{{"x", 4, {}}, {"y", 4, {}}};

TermPtr var(const char* n) { return Term::variable(FormulaVar::current(n)); }
TermPtr num(std::int64_t v) { return Term::constant(v); }

}  // namespace

TEST(FormulaVar, Spelling) {
  EXPECT_EQ(FormulaVar::current("x").name(), "x");
  EXPECT_EQ(FormulaVar::primed("x").name(), "x'");
  EXPECT_EQ(FormulaVar::indexed("x", 3).name(), "x#3");
  EXPECT_NE(FormulaVar::current("x"), FormulaVar::primed("x"));
  EXPECT_NE(FormulaVar::indexed("x", 1), FormulaVar::indexed("x", 2));
}

TEST(Formula, CachedFreeVariablesAndSizes) {
  Formula f = Formula::exists(FormulaVar::primed("x"), 4,
                              eq(Term::variable(FormulaVar::primed("x")), Term::binary(ArithOp::Add, var("x"), num(1))));
  ASSERT_EQ(f->free_vars.size(), 1u);
  EXPECT_EQ(f->free_vars[0], FormulaVar::current("x"));
  EXPECT_EQ(Formula::exists(FormulaVar::indexed("y", 7), 2, Formula::truth(true))->max_index, 7u);
  EXPECT_GT(f->tree_size, 2u);
}

TEST(Prime, Examples) {
  EXPECT_TRUE(prime(Formula::truth(true)).is_true());
  Formula f = parse_formula("x < y && y = 2", kXY);
  EXPECT_EQ(to_string(prime(f)), "x' < y' && y' = 2");
}

TEST(Prime, RejectsNonCurrentVariables) {
  Formula f = eq(Term::variable(FormulaVar::primed("x")), num(0));
  EXPECT_THROW(prime(f), FormulaError);
}

TEST(Substitute, Examples) {
  Formula x2 = parse_formula("x = 2", kXY);
  EXPECT_EQ(to_string(substitute(x2, FormulaVar::current("x"), Term::binary(ArithOp::Add, var("x"), num(1)))),
            "x + 1 = 2");
  Formula y0 = parse_formula("y = 0", kXY);
  EXPECT_EQ(substitute(y0, FormulaVar::current("x"), num(5)).get(), y0.get());
  Formula xx = parse_formula("x = x", kXY);
  EXPECT_EQ(to_string(substitute(xx, FormulaVar::current("x"), num(0))), "0 = 0");
}

TEST(Substitute, RespectsBinders) {
  // forall x. x = y  with y := x would capture.
  Formula f = Formula::forall(FormulaVar::current("x"), 4, eq(var("x"), var("y")));
  EXPECT_THROW(substitute(f, FormulaVar::current("y"), var("x")), FormulaError);
  // The bound x is not replaced.
  Formula g = Formula::forall(FormulaVar::current("x"), 4, eq(var("x"), num(1))) && eq(var("x"), num(2));
  EXPECT_EQ(to_string(substitute(g, FormulaVar::current("x"), num(3))), "(forall x in 0..3. x = 1) && 3 = 2");
}

TEST(Prime, UndoneBySubstitution) {
  std::vector<VarDecl> d{{"x", 3, {}}, {"y", 2, {}}};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Formula f = generate_post(d, seed, 3);
    Formula g = prime(f);
    for (const auto& v : d) g = substitute(g, FormulaVar::primed(v.name), var(v.name.c_str()));
    EXPECT_EQ(to_string(g), to_string(f));
  }
}

TEST(Restage, RenamesOneStage) {
  Formula f = parse_formula("x = y", kXY);
  Formula g = restage(f, StageRef::current(), StageRef::indexed(2));
  EXPECT_EQ(to_string(g), "x#2 = y#2");
}

TEST(Simplify, Examples) {
  std::vector<VarDecl> d{{"x", 4, {}}};
  EXPECT_TRUE(simplify(Formula::truth(false) && parse_formula("x = 0", d)).is_false());
  EXPECT_EQ(to_string(simplify(!!parse_formula("x = 0", d))), "x = 0");
  EXPECT_TRUE(simplify(parse_formula("2 = 2", d)).is_true());
  EXPECT_TRUE(simplify(parse_formula("x < x", d)).is_false());
  EXPECT_TRUE(simplify(Formula::implication(parse_formula("x = 1", d), Formula::truth(true))).is_true());
  EXPECT_EQ(to_string(simplify(Formula::implication(parse_formula("x = 1", d), Formula::truth(false)))), "!(x = 1)");
  EXPECT_EQ(to_string(simplify(Formula::exists(FormulaVar::primed("x"), 4, parse_formula("x = 1", d)))), "x = 1");
}

TEST(Simplify, IsIdempotentAndSharesUnchangedNodes) {
  Formula f = parse_formula("x = 1 && (y < 2 || x = y)", kXY);
  Formula s = simplify(f);
  EXPECT_EQ(s.get(), f.get());
  EXPECT_EQ(simplify(s).get(), s.get());
}

TEST(Simplify, ContradictionSurvivesTemporaryNodes) {
  // A regression: simplifying g -> false builds a temporary !g.
  std::vector<VarDecl> d{{"x", 3, {}}, {"y", 3, {}}};
  Formula g = parse_formula("!(x <= y)", d);
  Formula f = Formula::implication(g, Formula::truth(false)) && Formula::implication(!g, Formula::truth(false));
  Formula s = simplify(f);
  for (std::int64_t x = 0; x < 3; ++x)
    for (std::int64_t y = 0; y < 3; ++y)
      EXPECT_FALSE(evaluate(s, {{FormulaVar::current("x"), x}, {FormulaVar::current("y"), y}}));
}

TEST(ExpandQuantifiers, Examples) {
  std::vector<VarDecl> d{{"x", 4, {}}};
  FormulaVar b = FormulaVar::indexed("b", 1);
  Formula ex = Formula::exists(b, 2, eq(var("x"), Term::variable(b)));
  EXPECT_EQ(to_string(expand_quantifiers(ex)), "x = 0 || x = 1");
  Formula all = Formula::forall(b, 2, Formula::atom(CmpOp::Le, var("x"), Term::variable(b)));
  EXPECT_EQ(to_string(expand_quantifiers(all)), "x <= 0 && x <= 1");
  EXPECT_TRUE(expand_quantifiers(Formula::exists(FormulaVar::primed("x"), 2, Formula::truth(false))).is_false());
}

TEST(Printing, Quantifiers) {
  Formula f = Formula::forall(FormulaVar::primed("x"), 4,
                              Formula::implication(eq(Term::variable(FormulaVar::primed("x")), var("x")),
                                                   eq(Term::variable(FormulaVar::primed("x")), num(0))));
  EXPECT_EQ(to_string(f), "forall x' in 0..3. x' = x -> x' = 0");
  EXPECT_EQ(to_string(eq(Term::mod(Term::binary(ArithOp::Add, var("x"), num(1)), 4), num(2))), "(x + 1) mod 4 = 2");
}

TEST(Printing, Budget) {
  Formula f = parse_formula("x = 1 && y = 2 && x < y", kXY);
  std::string s = to_string(f, 10);
  EXPECT_LT(s.size(), to_string(f).size());
  EXPECT_EQ(s.rfind(" ..."), s.size() - 4);
  EXPECT_NE(s.find("..."), std::string::npos);
}

TEST(Transforms, PreserveTruthOnRandomFormulas) {
  std::vector<VarDecl> d{{"x", 3, {}}, {"y", 2, {}}};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Formula f = generate_formula(d, seed);
    Formula s = simplify(f), e = expand_quantifiers(f);
    Generator g(seed * 7 + 1);
    for (int trial = 0; trial < 5; ++trial) {
      naive::Env env;
      for (const auto& v : f->free_vars) env[v] = static_cast<std::int64_t>(g.below(v.base == "x" ? 3 : 2));
      bool expected = naive::holds(f, env);
      EXPECT_EQ(evaluate(s, env), expected) << to_string(f);
      EXPECT_EQ(evaluate(e, env), expected) << to_string(f);
    }
  }
}

TEST(ExpandQuantifiers, RemovesAllBinders) {
  std::vector<VarDecl> d{{"x", 3, {}}, {"y", 2, {}}};
  std::function<bool(const Formula&)> quantifier_free = [&](const Formula& f) {
    if (f->is_quantifier()) return false;
    for (const auto& c : f->children)
      if (!quantifier_free(c)) return false;
    return true;
  };
  for (std::uint64_t seed = 0; seed < 50; ++seed) EXPECT_TRUE(quantifier_free(expand_quantifiers(generate_formula(d, seed))));
}

TEST(Printing, TruncationDropsTrailingSyntax) {
  std::vector<VarDecl> d{{"x", 4, {}}};
  Formula f = parse_formula("x = 1", d);
  for (int i = 0; i < 30; ++i) f = (f || parse_formula("x < 2", d)) && parse_formula("x = 3", d);
  std::string s = to_string(f, 40);
  ASSERT_EQ(s.rfind(" ..."), s.size() - 4);
  std::string head = s.substr(0, s.size() - 4);
  EXPECT_EQ(to_string(f).rfind(head, 0), 0u) << s;
  EXPECT_LT(s.size(), 80u);
}
