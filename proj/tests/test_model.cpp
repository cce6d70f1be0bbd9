#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/evaluator.hpp"
#include "reldiag/model.hpp"

using namespace reldiag;

TEST(CompOp, FlipAndComplement) {
  EXPECT_EQ(flip(CompOp::LT), CompOp::GT);
  EXPECT_EQ(flip(CompOp::GEQ), CompOp::LEQ);
  EXPECT_EQ(flip(CompOp::EQ), CompOp::EQ);
  EXPECT_EQ(complement(CompOp::LT), CompOp::GEQ);
  EXPECT_EQ(complement(CompOp::EQ), CompOp::NEQ);
  for (auto op : {CompOp::EQ, CompOp::NEQ, CompOp::LT, CompOp::LEQ, CompOp::GT, CompOp::GEQ}) {
    EXPECT_EQ(flip(flip(op)), op);
    EXPECT_EQ(complement(complement(op)), op);
    EXPECT_EQ(parse_op(op_text(op)), op);
  }
  EXPECT_TRUE(is_symmetric(CompOp::NEQ));
  EXPECT_FALSE(is_symmetric(CompOp::LEQ));
}

TEST(Value, ComparisonSemantics) {
  for (std::int64_t a = -1; a <= 1; ++a) {
    for (std::int64_t b = -1; b <= 1; ++b) {
      Value va = a, vb = b;
      for (auto op : {CompOp::EQ, CompOp::NEQ, CompOp::LT, CompOp::LEQ, CompOp::GT, CompOp::GEQ}) {
        EXPECT_EQ(compare(va, op, vb), compare(vb, flip(op), va));
        EXPECT_NE(compare(va, op, vb), compare(va, complement(op), vb));
      }
    }
  }
  EXPECT_TRUE(compare(Value(std::string("a")), CompOp::LT, Value(std::string("b"))));
  EXPECT_THROW(compare(Value(std::int64_t{1}), CompOp::EQ, Value(std::string("1"))), TypeFault);
  EXPECT_EQ(value_text(Value(std::string("it's"))), "'it''s'");
}

TEST(Schema, ParseAndPrint) {
  Schema s = parse_schema("R(A, B)\n# comment\nBoat(bid, color: string)\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at("R").arity(), 2u);
  EXPECT_EQ(s.at("Boat").types[1], AttrType::STRING);
  EXPECT_EQ(parse_schema(schema_text(s)), s);
  EXPECT_THROW(s.at("T"), SchemaError);
}

TEST(Database, ParseChecksArityAndTypes) {
  Schema s = parse_schema("R(A, B)\nBoat(bid, color: string)\n");
  Database db = parse_database("R(1, 2)\nR(1, 2)\nBoat(3, 'red')\n", s);
  EXPECT_EQ(db.rows("R").size(), 1u);
  EXPECT_EQ(db.total_rows(), 2u);
  EXPECT_THROW(parse_database("R(1)\n", s), Error);
  EXPECT_THROW(parse_database("Boat('x', 'red')\n", s), Error);
  EXPECT_THROW(parse_database("T(1)\n", s), Error);
  EXPECT_EQ(parse_database(database_text(db), s), db);
}

struct CountCase {
  const char* schema;
  std::vector<std::size_t> arities;
  std::uint64_t expected;
};

TEST(Enumeration, CountsMatchClosedForm) {
  const CountCase cases[] = {
      {"R(A)\n", {1}, 4},
      {"R(A, B)\n", {2}, 16},
      {"R(A, B)\nS(B)\n", {2, 1}, 64},
  };
  std::vector<Value> dom{Value(std::int64_t{0}), Value(std::int64_t{1})};
  for (const auto& c : cases) {
    Schema s = parse_schema(c.schema);
    EXPECT_EQ(oracles::closed_form_count(c.arities, 2, 4), c.expected);
    EXPECT_EQ(database_count(s, dom, 4), c.expected);
    std::uint64_t seen = enumerate_databases(s, dom, 4, [](const Database&) { return true; });
    EXPECT_EQ(seen, c.expected);
  }
}

TEST(Enumeration, RowLimitAndDistinctness) {
  Schema s = parse_schema("R(A, B)\n");
  std::vector<Value> dom{Value(std::int64_t{0}), Value(std::int64_t{1}), Value(std::int64_t{2})};
  std::set<std::string> seen;
  std::uint64_t n = enumerate_databases(s, dom, 2, [&](const Database& db) {
    EXPECT_LE(db.rows("R").size(), 2u);
    EXPECT_TRUE(seen.insert(database_text(db)).second);
    return true;
  });
  EXPECT_EQ(n, oracles::closed_form_count({2}, 3, 2));
  EXPECT_EQ(n, 1u + 9u + 36u);
}

TEST(Enumeration, CeilingRaisesCapacityFault) {
  Schema s = parse_schema("R(A, B, C)\nS(A, B, C)\n");
  std::vector<Value> dom{Value(std::int64_t{0}), Value(std::int64_t{1}), Value(std::int64_t{2})};
  EXPECT_THROW(enumerate_databases(s, dom, 4, [](const Database&) { return true; }, 1000), CapacityFault);
}

TEST(Enumeration, RangeMatchesFullStream) {
  Schema s = parse_schema("R(A)\nS(A)\n");
  TypedDomain dom{{Value(std::int64_t{0}), Value(std::int64_t{1})}, {}};
  std::vector<std::string> full;
  enumerate_databases(s, dom, 4, [&](const Database& db) {
    full.push_back(database_text(db));
    return true;
  });
  std::vector<std::string> parts(full.size());
  for (std::uint64_t b = 0; b < full.size(); b += 5)
    enumerate_databases_range(s, dom, 4, b, std::min<std::uint64_t>(b + 5, full.size()),
                              [&](std::uint64_t i, const Database& db) {
                                parts[i] = database_text(db);
                                return true;
                              });
  EXPECT_EQ(parts, full);
}

TEST(Enumeration, TypedDomainsKeepTagsApart) {
  Schema s = parse_schema("Boat(bid, color: string)\n");
  TypedDomain dom{{Value(std::int64_t{0})}, {Value(std::string("red")), Value(std::string("v0"))}};
  enumerate_databases(s, dom, 2, [](const Database& db) {
    for (const auto& t : db.rows("Boat")) {
      EXPECT_TRUE(is_int(t[0]));
      EXPECT_TRUE(is_string(t[1]));
    }
    return true;
  });
  EXPECT_EQ(database_count(s, dom, 2), oracles::closed_form_count({1}, 2, 2));
}

TEST(OracleDomain, PaddingOnlyForOutsideConstants) {
  OracleOptions o;
  TypedDomain d = oracle_domain({}, o);
  EXPECT_EQ(d.ints.size(), 2u);
  d = oracle_domain({Value(std::int64_t{1})}, o);
  EXPECT_EQ(d.ints.size(), 2u);
  d = oracle_domain({Value(std::int64_t{7})}, o);
  // {0, 1, 7} plus one padding value above the largest
  EXPECT_EQ(d.ints.size(), 4u);
  EXPECT_EQ(d.ints.back(), Value(std::int64_t{8}));
  d = oracle_domain({Value(std::string("red"))}, o);
  EXPECT_EQ(d.strings.size(), 3u);
}
