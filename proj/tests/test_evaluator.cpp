#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reldiag/driver.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/evaluator.hpp"
#include "reldiag/parsers.hpp"
#include "reldiag/query.hpp"

using namespace reldiag;

namespace {

const char* kSailorDbs[] = {
    // every sailor reserves a red boat
    "Sailor(1)\nSailor(2)\nBoat(10, 'x', 'red')\nBoat(11, 'y', 'blue')\n"
    "Reserves(1, 10)\nReserves(2, 10)\nReserves(2, 11)\n",
    // sailor 2 only reserves a blue boat
    "Sailor(1)\nSailor(2)\nBoat(10, 'x', 'red')\nBoat(11, 'y', 'blue')\n"
    "Reserves(1, 10)\nReserves(2, 11)\n",
    // no sailors at all
    "Boat(10, 'x', 'red')\n",
};

}  // namespace

TEST(Evaluator, SailorSentenceMatchesOracle) {
  Schema s = parse_schema(fixtures::kSailorSchema);
  TrcQuery trc = parse_trc(fixtures::kSailorTrc);
  SqlQuery sql = parse_sql(fixtures::kSailorSql);
  const bool expected[] = {true, false, true};
  for (std::size_t i = 0; i < 3; ++i) {
    Database db = parse_database(kSailorDbs[i], s);
    bool oracle = oracles::every_sailor_reserves_red(db);
    EXPECT_EQ(oracle, expected[i]);
    EvalResult r = eval_trc(trc, db);
    EXPECT_TRUE(r.sentence);
    EXPECT_EQ(r.truth, oracle) << i;
    EXPECT_EQ(eval_sql(sql, db).truth, oracle) << i;
    EXPECT_EQ(oracles::NaiveCalculus(trc, db).truth(), oracle) << i;
  }
}

TEST(Evaluator, DivisionAllLanguagesAgree) {
  Schema s = parse_schema(fixtures::kRS);
  Database db = parse_database("R(1, 1)\nR(1, 2)\nR(2, 1)\nR(3, 3)\nS(1)\nS(2)\n", s);
  std::vector<AnyQuery> forms{parse_trc(fixtures::kDivisionTrc1), parse_trc(fixtures::kDivisionTrc2),
                              parse_sql(fixtures::kDivisionSql1), parse_sql(fixtures::kDivisionSql3),
                              parse_datalog(fixtures::kDivisionProgram),
                              parse_ra(fixtures::kDivisionAlgebra, &s)};
  for (const auto& q : forms) {
    EvalResult r = evaluate(q, db);
    ASSERT_EQ(r.relation.tuples.size(), 1u) << print_query(q);
    EXPECT_EQ(*r.relation.tuples.begin(), Tuple{Value(std::int64_t{1})});
  }
  auto naive = oracles::NaiveCalculus(parse_trc(fixtures::kDivisionTrc1), db).answer();
  EXPECT_EQ(naive, evaluate(forms[0], db).relation.tuples);
}

TEST(Evaluator, PreparedMatchesDirect) {
  Schema s = parse_schema(fixtures::kRS);
  std::vector<AnyQuery> forms{parse_trc(fixtures::kMaxTrc), parse_datalog(fixtures::kGuardProgram),
                              parse_ra(fixtures::kRejoinAlgebra, &s), parse_sql(fixtures::kSemijoinSql[2])};
  std::vector<Value> dom{Value(std::int64_t{0}), Value(std::int64_t{1})};
  for (const auto& q : forms) {
    PreparedQuery p(q, s);
    enumerate_databases(s, dom, 2, [&](const Database& db) {
      EXPECT_TRUE(p.run(db).same_as(evaluate(q, db))) << print_query(q) << database_text(db);
      return true;
    });
  }
}

TEST(Evaluator, EmptyRelationsAndConstants) {
  Schema s = parse_schema(fixtures::kRS);
  Database empty(s);
  EXPECT_TRUE(eval_trc(parse_trc(fixtures::kDivisionTrc1), empty).relation.tuples.empty());
  Database db = parse_database("R(0, 5)\nR(1, 6)\n", s);
  auto r = eval_trc(parse_trc("{q(A) | exists r in R [q.A = r.A and r.B >= 6]}"), db);
  ASSERT_EQ(r.relation.tuples.size(), 1u);
  EXPECT_EQ(*r.relation.tuples.begin(), Tuple{Value(std::int64_t{1})});
}

TEST(Equivalence, PlantedCounterexample) {
  Schema s = parse_schema("R(A)\n");
  AnyQuery q1 = parse_trc("{Q(A) | exists r in R [Q.A = r.A]}");
  AnyQuery q2 = parse_trc("{Q(A) | exists r in R [Q.A = r.A and r.A = 1]}");
  EquivVerdict v = equiv_check(q1, q2, s);
  EXPECT_FALSE(v.equivalent);
  ASSERT_TRUE(v.counterexample.has_value());
  const auto& cx = *v.counterexample;
  EXPECT_EQ(database_text(cx.db), "R(0)\n");
  ASSERT_TRUE(cx.tuple.has_value());
  EXPECT_EQ(*cx.tuple, Tuple{Value(std::int64_t{0})});
  EXPECT_EQ(cx.only_in, 1);
  // replaying the counterexample reproduces the disagreement
  EXPECT_FALSE(evaluate(q1, cx.db).same_as(evaluate(q2, cx.db)));
}

TEST(Equivalence, WorkerCountDoesNotChangeVerdict) {
  Schema s = parse_schema(fixtures::kRS);
  AnyQuery q1 = parse_trc(fixtures::kAntijoinTrc);
  AnyQuery q2 = parse_trc(fixtures::kMaxTrc);
  OracleOptions one, four;
  four.workers = 4;
  EquivVerdict a = equiv_check(q1, q2, s, one);
  EquivVerdict b = equiv_check(q1, q2, s, four);
  ASSERT_FALSE(a.equivalent);
  ASSERT_FALSE(b.equivalent);
  EXPECT_EQ(a.counterexample->index, b.counterexample->index);
  EXPECT_EQ(a.counterexample->db, b.counterexample->db);
  EXPECT_EQ(a.bound, b.bound);
}

TEST(Equivalence, CeilingAndArityMismatch) {
  Schema s = parse_schema(fixtures::kRS2);
  OracleOptions tight;
  tight.ceiling = 100;
  AnyQuery q = parse_sql(fixtures::kDisjunctionSql2);
  EXPECT_THROW(equiv_check(q, q, s, tight), CapacityFault);
  Schema rs = parse_schema(fixtures::kRS);
  EXPECT_THROW(equiv_check(parse_trc(fixtures::kAntijoinTrc), parse_datalog(fixtures::kDirectProgram), rs),
               SchemaError);
  EXPECT_THROW(equiv_check(parse_trc(fixtures::kAntijoinTrc), parse_trc(fixtures::kSailorTrc), rs), Error);
}

TEST(Equivalence, BoundTextNamesTheDomain) {
  OracleOptions o;
  TypedDomain d = oracle_domain({}, o);
  std::string b = bound_text(d, o);
  EXPECT_NE(b.find("4"), std::string::npos);
  EXPECT_NE(b.find("0"), std::string::npos);
}
