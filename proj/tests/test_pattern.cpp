#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "reldiag/diagram.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/evaluator.hpp"
#include "reldiag/parsers.hpp"
#include "reldiag/pattern.hpp"
#include "reldiag/query.hpp"

using namespace reldiag;

namespace {

std::vector<AnyQuery> pattern_artifacts(const Schema& s) {
  return {parse_datalog(fixtures::kGuardProgram),  parse_ra(fixtures::kGuardAlgebra, &s),
          load_json(fixtures::kGuardDiagram),      parse_datalog(fixtures::kRejoinProgram),
          parse_ra(fixtures::kRejoinAlgebra, &s),  load_json(fixtures::kRejoinDiagram),
          parse_datalog(fixtures::kDirectProgram), load_json(fixtures::kDirectDiagram)};
}

}  // namespace

TEST(Shatter, FreshNamesPerBase) {
  Schema s = parse_schema(fixtures::kRS);
  ShatteredQuery sq = shatter(parse_datalog(fixtures::kDivisionProgram), s);
  ASSERT_EQ(sq.signature.size(), 4u);
  EXPECT_EQ(sq.signature[0], (std::pair<std::string, std::string>{"R_1", "R"}));
  EXPECT_EQ(sq.signature[1], (std::pair<std::string, std::string>{"S_1", "S"}));
  EXPECT_EQ(sq.signature[2], (std::pair<std::string, std::string>{"R_2", "R"}));
  EXPECT_EQ(sq.schema.size(), 4u);
  EXPECT_EQ(sq.schema.at("R_3").arity(), 2u);
}

TEST(Shatter, AlgebraKeepsQualifiedReferences) {
  Schema s = parse_schema(fixtures::kRS);
  RaExpr e = parse_ra("Join[R.B = S.B](R, S)", &s);
  ShatteredQuery sq = shatter(e, s);
  EXPECT_NO_THROW(ra_attributes(std::get<RaExpr>(sq.query), sq.schema));
}

TEST(PatternIso, ReflexiveOnEveryArtifact) {
  Schema s = parse_schema(fixtures::kRS);
  for (const auto& q : pattern_artifacts(s)) {
    PatternVerdict v = pattern_iso(q, q, s);
    EXPECT_EQ(v.outcome, PatternOutcome::ISOMORPH) << print_query(q);
  }
}

TEST(PatternIso, SymmetricVerdicts) {
  Schema s = parse_schema(fixtures::kRS);
  auto qs = pattern_artifacts(s);
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = i + 1; j < qs.size(); ++j)
      EXPECT_EQ(pattern_iso(qs[i], qs[j], s).outcome, pattern_iso(qs[j], qs[i], s).outcome) << i << "," << j;
}

TEST(PatternIso, DifferentTableCountsAreRejectedEarly) {
  Schema s = parse_schema(fixtures::kRS);
  PatternVerdict v = pattern_iso(parse_datalog(fixtures::kGuardProgram), parse_datalog(fixtures::kDirectProgram), s);
  EXPECT_EQ(v.outcome, PatternOutcome::NOT_ISOMORPH);
  EXPECT_FALSE(v.reason.empty());
  EXPECT_EQ(v.bijections_tried, 0u);
}

TEST(PatternIso, RefutationsReplay) {
  Schema s = parse_schema(fixtures::kRS);
  AnyQuery guard = parse_datalog(fixtures::kGuardProgram);
  AnyQuery rejoin = parse_datalog(fixtures::kRejoinProgram);
  PatternVerdict v = pattern_iso(guard, rejoin, s);
  ASSERT_EQ(v.outcome, PatternOutcome::NOT_ISOMORPH);
  ASSERT_EQ(v.refuted.size(), v.bijections_tried);
  ASSERT_EQ(v.refuted.size(), 2u);
  for (const auto& r : v.refuted) {
    AnyQuery mapped = apply_bijection(v, r.mapping);
    const Database& db = r.counterexample.db;
    EXPECT_FALSE(evaluate(v.first.query, db).same_as(evaluate(mapped, db)));
  }
}

TEST(PatternIso, WitnessBijectionHolds) {
  Schema s = parse_schema(fixtures::kRS);
  PatternVerdict v = pattern_iso(parse_ra(fixtures::kGuardAlgebra, &s), load_json(fixtures::kGuardDiagram), s);
  ASSERT_EQ(v.outcome, PatternOutcome::ISOMORPH);
  ASSERT_EQ(v.bijection.size(), 3u);
  AnyQuery mapped = apply_bijection(v, v.bijection);
  EXPECT_TRUE(equiv_check(v.first.query, mapped, v.first.schema).equivalent);
}

TEST(PatternIso, CapacityGivesUndetermined) {
  Schema s = parse_schema(fixtures::kRS);
  OracleOptions tight;
  tight.ceiling = 10;
  PatternVerdict v = pattern_iso(parse_datalog(fixtures::kGuardProgram), parse_datalog(fixtures::kGuardProgram), s, tight);
  EXPECT_EQ(v.outcome, PatternOutcome::UNDETERMINED);
  EXPECT_FALSE(v.reason.empty());
}

TEST(PatternIso, SchemaMismatchThrows) {
  Schema s = parse_schema(fixtures::kRS);
  EXPECT_THROW(pattern_iso(parse_trc(fixtures::kSailorTrc), parse_trc(fixtures::kSailorTrc), s), SchemaError);
}

TEST(PatternClasses, ThreePatternArtifactsFormThreeClasses) {
  Schema s = parse_schema(fixtures::kRS);
  PatternClasses pc = pattern_classes(pattern_artifacts(s), s);
  EXPECT_TRUE(pc.undetermined.empty());
  std::vector<std::vector<std::size_t>> expected{{0, 1, 2}, {3, 4, 5}, {6, 7}};
  EXPECT_EQ(pc.classes, expected);
}

TEST(PatternClasses, NamesAreStable) {
  EXPECT_EQ(outcome_name(PatternOutcome::ISOMORPH), "ISOMORPH");
  EXPECT_EQ(outcome_name(PatternOutcome::NOT_ISOMORPH), "NOT_ISOMORPH");
  EXPECT_EQ(outcome_name(PatternOutcome::UNDETERMINED), "UNDETERMINED");
}
