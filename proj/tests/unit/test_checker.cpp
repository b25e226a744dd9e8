#include <gtest/gtest.h>

#include "predtrans/checker.hpp"
#include "predtrans/generator.hpp"
#include "predtrans/parser.hpp"
#include "support/naive.hpp"

using namespace predtrans;

namespace {

const std::vector<VarDecl> kX{{"x", 4, {}}};

Program prog(const char* body) { return parse_program(std::string("var x in 0..3; ") + body); }
Formula post(const char* src) { return parse_formula(src, kX); }

// The witness separates lhs and rhs under the reference evaluator.
void expect_sound_witness(const CheckReport& r) {
  ASSERT_TRUE(r.witness) << r.claim;
  StateSpace space(r.decls);
  naive::Env env;
  for (const auto& [v, value] : space.valuation(*r.witness)) env[v] = value;
  EXPECT_NE(naive::holds(r.lhs.formula, env), naive::holds(r.rhs.formula, env)) << r.claim << ": " << r.notes;
}

CheckReport check(const char* claim, const char* body, const char* q, Method m = Method::Structural) {
  CheckOptions o;
  o.method = m;
  return check_theorem(claim, prog(body), post(q), o);
}

}  // namespace

TEST(Implies, Examples) {
  Precondition f{Formula::truth(false), Method::Relational, Transformer::Wp};
  Precondition x1{post("x = 1"), Method::Relational, Transformer::Wp};
  EXPECT_TRUE(implies(f, x1, kX).holds());

  auto havoc = build_rho(prog("havoc x;"));
  auto r = implies(wp_relational(havoc, post("x = 0")), wlp_relational(havoc, post("x = 0")), kX);
  EXPECT_TRUE(r.fails());
  expect_sound_witness(r);

  auto abort = build_rho(prog("abort;"));
  auto s = implies(wlp_relational(abort, post("x = 0")), wp_relational(abort, post("x = 0")), kX);
  EXPECT_TRUE(s.fails());
  expect_sound_witness(s);
}

TEST(Equivalent, Examples) {
  auto inc = build_rho(prog("x := x + 1;"));
  EXPECT_TRUE(equivalent(wp_relational(inc, post("x = 2")), wlp_relational(inc, post("x = 2")), kX).holds());
  auto havoc = build_rho(prog("havoc x;"));
  auto r = equivalent(wp_relational(havoc, post("x = 0")), wlp_relational(havoc, post("x = 0")), kX);
  EXPECT_TRUE(r.fails());
  expect_sound_witness(r);
  EXPECT_TRUE(equivalent(wlp_relational(havoc, post("x = 0")), wlp_via_duality(havoc, post("x = 0")), kX).holds());
}

TEST(CheckTheorem, Examples) {
  for (auto m : {Method::Relational, Method::Structural}) {
    EXPECT_TRUE(check("theorem2", "x := x + 1;", "x = 2", m).holds());
    EXPECT_TRUE(check("theorem3", "havoc x;", "x = 0", m).holds());
    EXPECT_TRUE(check("theorem4", "while (x < 3) do { x := x + 1 };", "x = 3", m).holds());
    EXPECT_TRUE(check("lemma1", "x := x * 2;", "x = 2", m).holds());
    EXPECT_TRUE(check("duality", "havoc x;", "x = 0", m).holds());
  }
}

TEST(CheckTheorem, SideConditions) {
  auto t2 = check("theorem2", "havoc x;", "x = 0");
  EXPECT_EQ(t2.verdict, Verdict::SideConditionViolated);
  ASSERT_TRUE(t2.witness);
  EXPECT_NE(t2.notes.find("not deterministic"), std::string::npos);

  auto t3 = check("theorem3", "if (x = 0) then { abort } else { skip };", "x = 1");
  EXPECT_EQ(t3.verdict, Verdict::SideConditionViolated);
  ASSERT_TRUE(t3.witness);
  EXPECT_EQ(t3.witness->values, std::vector<std::int64_t>{0});

  EXPECT_EQ(check("theorem3-global", "abort;", "x = 0").verdict, Verdict::SideConditionViolated);
  // Satisfiable somewhere is too weak a hypothesis: wlp = {0, 1}, wp = {1}.
  auto global = check("theorem3-global", "if (x = 0) then { abort } else { skip };", "x = 1");
  EXPECT_TRUE(global.fails());
  expect_sound_witness(global);
  EXPECT_EQ(global.witness->values, std::vector<std::int64_t>{0});

  EXPECT_EQ(check("theorem4", "havoc x;", "x = 0").verdict, Verdict::SideConditionViolated);
  auto spin = check("theorem4", "while (x < 2) do { skip };", "true");
  EXPECT_EQ(spin.verdict, Verdict::SideConditionViolated);
  EXPECT_NE(spin.notes.find("does not terminate"), std::string::npos);
  EXPECT_NE(check("theorem4", "if (x = 1) then { abort } else { skip };", "true").notes.find("aborts"),
            std::string::npos);

  EXPECT_EQ(check("lemma1", "skip;", "x = 0").verdict, Verdict::SideConditionViolated);
  EXPECT_EQ(check("lemma2", "skip;", "x = 0").verdict, Verdict::SideConditionViolated);
  EXPECT_EQ(check("lemma2", "havoc x; skip;", "x = 0").verdict, Verdict::SideConditionViolated);
  EXPECT_TRUE(check("lemma2", "x := x + 1; x := x * 3;", "x = 0").holds());
}

TEST(CheckTheorem, TruncatedAgreementIsInconclusive) {
  auto r = check_theorem("agreement-wp", prog("while (x < 3) do { x := x + 1 };"), post("x = 3"),
                         CheckOptions{Method::Structural, 1, {}});
  EXPECT_EQ(r.verdict, Verdict::InconclusiveTruncated);
  EXPECT_FALSE(r.notes.empty());
}

TEST(CheckTheorem, InexactStructuralBoundIsInconclusive) {
  CheckOptions o;
  o.unroll_bound = 1;
  auto r = check_theorem("theorem4", prog("while (x < 3) do { x := x + 1 };"), post("x = 3"), o);
  EXPECT_EQ(r.verdict, Verdict::InconclusiveTruncated);
}

TEST(CheckTheorem, RejectsTheorem1AndUnknownClaims) {
  EXPECT_THROW(check("theorem1", "skip;", "x = 0"), CheckError);
  EXPECT_THROW(check("theorem9", "skip;", "x = 0"), CheckError);
}

TEST(CheckTheorem, AgreementAndDualityOnRandomPrograms) {
  GeneratorConfig c;
  c.allow_abort = true;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    c.seed = seed;
    c.allow_havoc = seed % 2 == 1;
    Program p = generate_program(c);
    Formula q = generate_post(p.decls, seed);
    for (const char* claim : {"duality", "agreement-wp", "agreement-wlp"}) {
      auto r = check_theorem(claim, p, q);
      EXPECT_NE(r.verdict, Verdict::Fails) << claim << "\n" << pretty_print(p) << r.notes;
    }
  }
}

TEST(Theorem1, Demonstration) {
  auto [first, second] = demonstrate_theorem1(kX);
  EXPECT_TRUE(first.fails());
  EXPECT_TRUE(second.fails());
  expect_sound_witness(first);
  expect_sound_witness(second);
  EXPECT_EQ(first.witness->values, std::vector<std::int64_t>{0});
  EXPECT_EQ(second.witness->values, std::vector<std::int64_t>{0});
}

TEST(Theorem1, SingletonDomainIsDegenerate) {
  auto [first, second] = demonstrate_theorem1({{"x", 1, {}}});
  EXPECT_TRUE(first.holds());
  EXPECT_NE(first.notes.find("degenerate"), std::string::npos);
  EXPECT_TRUE(second.fails());
  EXPECT_THROW(demonstrate_theorem1({}), CheckError);
}

TEST(Composition, Examples) {
  auto skip = Stmt::skip();
  auto inc = Stmt::assign("x", Expr::binary(ArithOp::Add, Expr::variable("x"), Expr::constant(1)));
  auto r1 = wp_true_composition_check(*skip, *skip, kX);
  EXPECT_TRUE(r1.holds());
  EXPECT_EQ(extension(r1.lhs, kX), StateSet(4, true));
  auto r2 = wp_true_composition_check(*inc, *Stmt::abort(), kX);
  EXPECT_TRUE(r2.holds());
  EXPECT_TRUE(extension(r2.lhs, kX).empty());
  auto r3 = wp_true_composition_check(*Stmt::havoc("x"), *inc, kX);
  EXPECT_TRUE(r3.holds());
  EXPECT_EQ(extension(r3.rhs, kX), StateSet(4, true));
}

TEST(Composition, ViaCheckTheorem) {
  EXPECT_TRUE(check("composition", "havoc x; while (x < 2) do { x := x + 1 };", "true").holds());
}

TEST(SupportedClaims, AllDispatch) {
  for (const auto& claim : supported_claims()) EXPECT_NO_THROW(check(claim.c_str(), "x := x + 1; skip;", "x = 1"));
}
