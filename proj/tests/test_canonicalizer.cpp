#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/evaluator.hpp"
#include "reldiag/parsers.hpp"
#include "reldiag/translators.hpp"

using namespace reldiag;

namespace {

std::size_t scope_count(const TrcScope& s) {
  std::size_t n = 1;
  for (const auto& c : s.negations) n += scope_count(c);
  return n;
}

std::size_t var_count(const TrcScope& s) {
  std::size_t n = s.vars.size();
  for (const auto& c : s.negations) n += var_count(c);
  return n;
}

}  // namespace

TEST(Anchoring, AcceptsAnchoredQueries) {
  for (const auto& text : {fixtures::kDivisionTrc1, fixtures::kDivisionTrc2, fixtures::kSailorTrc,
                           fixtures::kAntijoinTrc, fixtures::kLimitsTrc})
    EXPECT_TRUE(check_anchored(parse_trc(text)).empty()) << text;
}

TEST(Anchoring, RejectsSelectionOnOuterTable) {
  TrcQuery q = parse_trc("{q(A) | exists r in R [q.A = r.A and not exists s in S [r.B = 1]]}");
  auto v = check_anchored(q);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].scope_path, std::vector<std::size_t>{0});
  EXPECT_EQ(v[0].pred.lhs.var, "r");
}

TEST(Anchoring, RejectsJoinBetweenOuterTables) {
  TrcQuery q = parse_trc(
      "{q(A) | exists r in R, s in S [q.A = r.A and not exists t in S [t.B = s.B and r.B <> s.B]]}");
  auto v = check_anchored(q);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].pred.op, CompOp::NEQ);
}

TEST(Pullup, HoistsPositiveQuantifiers) {
  TrcFormulaQuery f = parse_trc_formula(
      "{q(A) | exists r in R [q.A = r.A and exists s in S [s.B = r.B and "
      "not exists t in S [exists u in R [u.A = r.A and u.B = t.B]]]]}");
  TrcQuery q = trc_pullup(f);
  EXPECT_EQ(q.root.vars.size(), 2u);
  ASSERT_EQ(q.root.negations.size(), 1u);
  EXPECT_EQ(q.root.negations[0].vars.size(), 2u);
  EXPECT_EQ(scope_count(q.root), 2u);
}

TEST(Pullup, RenamesApartOnCollision) {
  TrcFormulaQuery f = parse_trc_formula(
      "{q(A) | exists r in R [q.A = r.A and exists s in S [s.B = r.B] and exists s in S [s.B = r.A]]}");
  TrcQuery q = trc_pullup(f);
  ASSERT_EQ(q.root.vars.size(), 3u);
  EXPECT_NE(q.root.vars[1].name, q.root.vars[2].name);
  Schema schema = parse_schema(fixtures::kRS);
  EXPECT_TRUE(equiv_check(f, q, schema).equivalent);
}

TEST(SqlCanonical, RewritesSubqueryForms) {
  Schema s = parse_schema(fixtures::kRS);
  TrcQuery base = parse_trc(fixtures::kSemijoinTrc);
  for (const auto& text : fixtures::kSemijoinSql) {
    TrcQuery q = sql_to_trc(parse_sql(text), &s);
    EXPECT_EQ(scope_count(q.root), 1u) << text;
    EXPECT_EQ(var_count(q.root), 2u) << text;
    EXPECT_TRUE(equiv_check(q, base, s).equivalent) << text;
  }
  TrcQuery anti = parse_trc(fixtures::kAntijoinTrc);
  for (const auto& text : fixtures::kAntijoinSql) {
    TrcQuery q = sql_to_trc(parse_sql(text), &s);
    EXPECT_EQ(scope_count(q.root), 2u) << text;
    EXPECT_TRUE(equiv_check(q, anti, s).equivalent) << text;
  }
  TrcQuery mx = parse_trc(fixtures::kMaxTrc);
  for (const auto& text : fixtures::kMaxSql) {
    TrcQuery q = sql_to_trc(parse_sql(text), &s);
    EXPECT_EQ(q.root.negations.at(0).preds.at(0).op, CompOp::LT) << text;
    EXPECT_TRUE(equiv_check(q, mx, s).equivalent) << text;
  }
}

TEST(SqlCanonical, QualifiesAndRenamesApart) {
  Schema s = parse_schema(fixtures::kRS);
  SqlQuery q = sql_canonicalize(
      parse_sql("SELECT DISTINCT A FROM R WHERE not exists (SELECT * FROM R WHERE R.B = 1)"), &s);
  const auto& outer = q.select;
  const auto& inner = outer.where.at(0).sub.at(0);
  EXPECT_EQ(outer.cols.at(0).table, outer.from.at(0).alias);
  EXPECT_NE(outer.from.at(0).alias, inner.from.at(0).alias);
  EXPECT_THROW(sql_canonicalize(parse_sql("SELECT DISTINCT B FROM R, S"), &s), Error);
}

TEST(SqlCanonical, TupleNotInBecomesNegatedScope) {
  Schema s = parse_schema(fixtures::kRS);
  TrcQuery q = sql_to_trc(parse_sql(fixtures::kDivisionSql3), &s);
  EXPECT_EQ(scope_count(q.root), 3u);
  EXPECT_EQ(var_count(q.root), 4u);
  EXPECT_TRUE(equiv_check(q, parse_trc(fixtures::kDivisionTrc2), s).equivalent);
}

TEST(SqlCanonical, UnanchoredInputIsRejected) {
  Schema s = parse_schema(fixtures::kRS);
  EXPECT_THROW(sql_to_trc(parse_sql("SELECT DISTINCT R.A FROM R WHERE not exists "
                                    "(SELECT * FROM S WHERE R.B = 1)"),
                          &s),
               AnchoringFault);
}

TEST(SqlCanonical, Idempotent) {
  Schema s = parse_schema(fixtures::kRS);
  for (const auto& text : {fixtures::kDivisionSql1, fixtures::kDivisionSql2, fixtures::kDivisionSql3}) {
    SqlQuery once = sql_canonicalize(parse_sql(text), &s);
    EXPECT_EQ(sql_canonicalize(once, &s), once) << text;
  }
}
