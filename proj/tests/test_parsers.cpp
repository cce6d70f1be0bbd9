#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"
#include "reldiag/query.hpp"

using namespace reldiag;

TEST(TrcParser, ScopesAndPredicates) {
  TrcQuery q = parse_trc(fixtures::kDivisionTrc1);
  EXPECT_EQ(q.kind, QueryKind::QUERY);
  EXPECT_EQ(q.out_attrs, std::vector<std::string>{"A"});
  ASSERT_EQ(q.root.vars.size(), 1u);
  EXPECT_EQ(q.root.vars[0].relation, "R");
  ASSERT_EQ(q.root.negations.size(), 1u);
  ASSERT_EQ(q.root.negations[0].negations.size(), 1u);
  EXPECT_EQ(q.root.negations[0].negations[0].preds.size(), 2u);
}

TEST(TrcParser, SentenceAndOperators) {
  TrcQuery q = parse_trc(fixtures::kSailorTrc);
  EXPECT_EQ(q.kind, QueryKind::SENTENCE);
  TrcQuery n = parse_trc("{q(A) | exists r in R [q.A = r.A and r.B <> 1 and r.B != 0]}");
  EXPECT_EQ(n.root.preds[1].op, CompOp::NEQ);
  EXPECT_EQ(n.root.preds[2].op, CompOp::NEQ);
  TrcQuery s = parse_trc("{q(A) | exists r in R [q.A = r.A and r.B = \"x\"]}");
  EXPECT_EQ(s.root.preds[1].rhs_value(), Value(std::string("x")));
}

TEST(TrcParser, RoundTripsThroughPrinter) {
  for (const auto& text : {fixtures::kDivisionTrc1, fixtures::kDivisionTrc2, fixtures::kSailorTrc,
                           fixtures::kMaxTrc, fixtures::kLimitsTrc}) {
    TrcQuery q = parse_trc(text);
    EXPECT_EQ(parse_trc(print_trc(q)), q) << text;
  }
}

TEST(TrcParser, Errors) {
  try {
    parse_trc("{q(A) | exists r in R [q.A = r.A and ]}");
    FAIL() << "expected SourceError";
  } catch (const SourceError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_GT(e.column(), 1u);
  }
  EXPECT_THROW(parse_trc("{q(A) | exists r in R [q.A = s.A]}"), ScopeError);
  EXPECT_THROW(parse_trc("{q(A) | exists r in R [r.B = 1]}"), SafetyFault);
  EXPECT_THROW(parse_trc("{q(A) | exists r in R [q.A = r.A or r.B = 1]}"), Error);
  EXPECT_NO_THROW(parse_trc_formula("{q(A) | exists r in R [q.A = r.A and (r.B = 1 or r.B = 0)]}",
                                    ParseOptions{true}));
}

TEST(DatalogParser, ProgramStructure) {
  DatalogProgram p = parse_datalog(fixtures::kDivisionProgram);
  EXPECT_EQ(p.answer, "Q");
  ASSERT_EQ(p.rules.size(), 2u);
  EXPECT_EQ(p.rules[0].body[2].kind, DlLiteral::Kind::NEG);
  EXPECT_EQ(idb_names(p), (std::vector<std::string>{"I", "Q"}));
  EXPECT_EQ(print_datalog(p), fixtures::kDivisionProgram);
  EXPECT_EQ(parse_datalog(print_datalog(parse_datalog(fixtures::kLimitsProgram))),
            parse_datalog(fixtures::kLimitsProgram));
}

TEST(DatalogParser, StructuralFaults) {
  EXPECT_THROW(parse_datalog("Q(x) :- R(x,_), not Q(x).\n"), RecursionFault);
  EXPECT_THROW(parse_datalog("I(x) :- R(x,_).\nI(x) :- S(x).\nQ(x) :- I(x).\n"), DuplicateHeadFault);
  EXPECT_THROW(parse_datalog("Q(x,y) :- R(x,_).\n"), SafetyFault);
  EXPECT_THROW(parse_datalog("Q(x) :- R(x,_), not S(y).\n"), SafetyFault);
  EXPECT_THROW(parse_datalog("Q(x) :- R(x,_)\n"), SourceError);
}

TEST(AlgebraParser, OperatorsAndAttributes) {
  Schema s = parse_schema(fixtures::kRS);
  RaExpr e = parse_ra(fixtures::kDivisionAlgebra, &s);
  EXPECT_EQ(e.kind, RaExpr::Kind::MINUS);
  EXPECT_EQ(ra_attributes(e, s).size(), 1u);
  EXPECT_EQ(parse_ra(print_ra(e), &s), e);
  RaExpr j = parse_ra("Join[R.B = S.B](R, S)", &s);
  EXPECT_EQ(ra_attributes(j, s).size(), 3u);
  RaExpr n = parse_ra(fixtures::kRejoinAlgebra, &s);
  EXPECT_EQ(ra_attributes(n, s).size(), 2u);
  EXPECT_THROW(parse_ra("Project[C](R)", &s), AttributeFault);
  EXPECT_THROW(parse_ra("Union(R, R)", &s), Error);
  EXPECT_NO_THROW(parse_ra("Union(R, R)", &s, ParseOptions{true}));
  EXPECT_THROW(parse_ra("Minus(R, S)", &s), AttributeFault);
}

TEST(SqlParser, ShapesAndHeads) {
  SqlQuery q = parse_sql(fixtures::kDivisionSql3);
  EXPECT_EQ(q.head, SqlQuery::Head::DISTINCT);
  ASSERT_EQ(q.select.where.size(), 1u);
  EXPECT_EQ(q.select.where[0].kind, SqlCond::Kind::NOT_IN);
  SqlQuery s = parse_sql(fixtures::kSailorSql);
  EXPECT_TRUE(is_sentence(s));
  for (const auto& text : fixtures::kSemijoinSql) EXPECT_EQ(parse_sql(print_sql(parse_sql(text))), parse_sql(text));
  EXPECT_THROW(parse_sql(fixtures::kDisjunctionOrSql), Error);
  EXPECT_NO_THROW(parse_sql(fixtures::kDisjunctionOrSql, ParseOptions{true}));
  EXPECT_THROW(parse_sql("SELECT R.A FROM"), SourceError);
}

TEST(Languages, NamesAndExtensions) {
  EXPECT_EQ(parse_language("dlg"), Language::DATALOG);
  EXPECT_EQ(parse_language("rdjson"), Language::DIAGRAM);
  EXPECT_FALSE(parse_language("cobol").has_value());
  EXPECT_EQ(language_for_path("a/b.sql"), Language::SQL);
  EXPECT_EQ(language_for_path("x.ra"), Language::RA);
  EXPECT_FALSE(language_for_path("x.txt").has_value());
}

TEST(Occurrences, OrderAndConstants) {
  auto occ = extensional_tables(parse_datalog(fixtures::kDivisionProgram));
  ASSERT_EQ(occ.size(), 4u);
  EXPECT_EQ(occ[0].relation, "R");
  EXPECT_EQ(occ[1].relation, "S");
  Schema s = parse_schema(fixtures::kSailorSchema);
  auto consts = query_constants(parse_query(fixtures::kSailorTrc, Language::TRC, &s));
  ASSERT_EQ(consts.size(), 1u);
  EXPECT_EQ(consts[0], Value(std::string("red")));
}
