#include <gtest/gtest.h>

#include "predtrans/generator.hpp"
#include "predtrans/oracle.hpp"
#include "predtrans/parser.hpp"
#include "predtrans/transition.hpp"
#include "support/naive.hpp"

using namespace predtrans;

namespace {

// All pairs (s, s') the relation accepts, checked by the naive evaluator.
std::vector<StateSet> naive_pairs(const TransitionRelation& tr) {
  StateSpace space(tr.decls);
  std::vector<StateSet> out(space.size(), StateSet(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = 0; j < space.size(); ++j) {
      naive::Env env;
      for (const auto& [v, value] : space.valuation(space.state(i))) env[v] = value;
      for (const auto& [v, value] : space.valuation(space.state(j), StageRef::primed())) env[v] = value;
      if (naive::holds(tr.rho, env)) out[i].insert(j);
    }
  return out;
}

TransitionRelation rho_of(const char* src) { return build_rho(parse_program(src)); }

}  // namespace

TEST(BuildRho, Assignment) {
  auto tr = rho_of("var x in 0..3; x := x + 1;");
  EXPECT_EQ(to_string(simplify(tr.rho)), "x' = (x + 1) mod 4");
  auto succ = successor_sets(tr);
  EXPECT_TRUE(succ[3].contains(0));
  EXPECT_EQ(succ[3].count(), 1u);
}

TEST(BuildRho, SkipAbortHavoc) {
  EXPECT_EQ(to_string(rho_of("var x in 0..3; var y in 0..1; skip;").rho), "x' = x && y' = y");
  EXPECT_TRUE(rho_of("var x in 0..3; abort;").rho.is_false());
  EXPECT_EQ(to_string(rho_of("var x in 0..3; var y in 0..1; havoc x;").rho), "y' = y");
}

TEST(BuildRho, NonterminatingLoopIsEmpty) {
  auto tr = rho_of("var x in 0..3; while (true) do { skip };");
  for (const auto& s : successor_sets(tr)) EXPECT_TRUE(s.empty());
  EXPECT_TRUE(tr.exact);
}

TEST(BuildRho, FreeVariablesAreCurrentAndPrimed) {
  GeneratorConfig c;
  c.allow_havoc = c.allow_abort = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    c.seed = seed;
    Program p = generate_program(c);
    auto tr = build_rho(p, 3);
    for (const auto& v : tr.rho->free_vars) EXPECT_NE(v.stage, Stage::Indexed) << v.name();
  }
}

TEST(BuildRho, ExactnessFlag) {
  Program p = parse_program("var x in 0..3; while (x < 3) do { x := x + 1 };");
  EXPECT_TRUE(build_rho(p).exact);
  EXPECT_FALSE(build_rho(p, 2).exact);
  EXPECT_TRUE(build_rho(parse_program("var x in 0..3; havoc x;"), 0).exact);
  EXPECT_FALSE(build_rho(parse_program("var x in 0..3; while (x < 3) do { havoc x };")).exact);
}

TEST(DefaultUnrollBound, Examples) {
  EXPECT_EQ(default_unroll_bound({{"x", 4, {}}}), 4u);
  EXPECT_EQ(default_unroll_bound({{"x", 4, {}}, {"y", 2, {}}}), 8u);
  EXPECT_THROW(default_unroll_bound({{"x", 1000000, {}}, {"y", 10, {}}}), CeilingExceeded);
}

TEST(PointwiseSatisfiable, Examples) {
  EXPECT_TRUE(is_pointwise_satisfiable(rho_of("var x in 0..3; x := x + 1;")).holds);
  auto ab = is_pointwise_satisfiable(rho_of("var x in 0..3; abort;"));
  EXPECT_FALSE(ab.holds);
  ASSERT_TRUE(ab.witness);
  auto partial = is_pointwise_satisfiable(rho_of("var x in 0..3; if (x = 0) then { abort } else { skip };"));
  EXPECT_FALSE(partial.holds);
  ASSERT_TRUE(partial.witness);
  EXPECT_EQ(partial.witness->values, std::vector<std::int64_t>{0});
}

TEST(SemanticallyDeterministic, Examples) {
  EXPECT_TRUE(is_semantically_deterministic(rho_of("var x in 0..3; x := x + 1;")).holds);
  EXPECT_TRUE(is_semantically_deterministic(rho_of("var x in 0..3; abort;")).holds);
  auto h = is_semantically_deterministic(rho_of("var x in 0..3; havoc x;"));
  EXPECT_FALSE(h.holds);
  ASSERT_TRUE(h.witness);
  EXPECT_EQ(h.witness->values, std::vector<std::int64_t>{0});
  ASSERT_EQ(h.successors.size(), 2u);
  EXPECT_EQ(h.successors[0].values, std::vector<std::int64_t>{0});
  EXPECT_EQ(h.successors[1].values, std::vector<std::int64_t>{1});
}

TEST(GloballySatisfiable, Examples) {
  EXPECT_FALSE(is_globally_satisfiable(rho_of("var x in 0..3; abort;")));
  EXPECT_TRUE(is_globally_satisfiable(rho_of("var x in 0..3; if (x = 0) then { abort } else { skip };")));
}

TEST(SuccessorSets, AgreeWithNaiveEvaluation) {
  GeneratorConfig c;
  c.allow_havoc = c.allow_abort = true;
  c.max_vars = 2;
  c.domain_size = 3;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    c.seed = seed;
    Program p = generate_program(c);
    auto tr = build_rho(p, 2);
    EXPECT_EQ(successor_sets(tr), naive_pairs(tr)) << pretty_print(p);
  }
}

TEST(SuccessorSets, ExactRelationsMatchTheOracle) {
  GeneratorConfig c;
  c.allow_abort = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    c.seed = seed;
    c.allow_havoc = seed % 2 == 0;
    Program p = generate_program(c);
    auto tr = build_rho(p);
    if (!tr.exact) continue;
    EXPECT_EQ(successor_sets(tr), Oracle(*p.body, p.decls).table().finals) << pretty_print(p);
  }
}

TEST(SuccessorSets, MonotoneInTheBound) {
  GeneratorConfig c;
  c.allow_havoc = true;
  c.domain_size = 3;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    c.seed = seed;
    Program p = generate_program(c);
    auto prev = successor_sets(build_rho(p, 0));
    for (std::uint64_t k = 1; k <= 4; ++k) {
      auto next = successor_sets(build_rho(p, k));
      for (std::size_t i = 0; i < prev.size(); ++i) EXPECT_TRUE(prev[i].subset_of(next[i])) << pretty_print(p);
      prev = std::move(next);
    }
  }
}

TEST(SuccessorSets, FixpointAtTheDefaultBound) {
  GeneratorConfig c;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    c.seed = seed;
    Program p = generate_program(c);
    auto k = default_unroll_bound(p.decls);
    EXPECT_EQ(successor_sets(build_rho(p, k)), successor_sets(build_rho(p, k + 1))) << pretty_print(p);
  }
}
