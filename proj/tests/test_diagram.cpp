#include <gtest/gtest.h>

#include <regex>

#include "fixtures.hpp"
#include "mutations.hpp"
#include "reldiag/diagram.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/evaluator.hpp"
#include "reldiag/parsers.hpp"
#include "reldiag/query.hpp"
#include "reldiag/translators.hpp"

using namespace reldiag;

namespace {

std::size_t count_class(const std::string& svg, const std::string& cls) {
  std::regex re("class=\"" + cls + "\"");
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(svg.begin(), svg.end(), re),
                                                std::sregex_iterator()));
}

}  // namespace

TEST(DiagramBuild, DivisionLayout) {
  Diagram d = trc_to_diagram(parse_trc(fixtures::kDivisionTrc1));
  ASSERT_EQ(d.cells.size(), 1u);
  const Cell& c = d.cells[0];
  EXPECT_EQ(c.partitions.size(), 3u);
  EXPECT_EQ(c.tables.size(), 3u);
  EXPECT_EQ(c.edges.size(), 2u);
  ASSERT_TRUE(c.output.has_value());
  EXPECT_EQ(c.output->attrs.size(), 1u);
  EXPECT_TRUE(validate_diagram(d).empty());
}

TEST(DiagramBuild, SelectionsAndArrows) {
  Diagram d = trc_to_diagram(parse_trc(
      "{q(A) | exists r in R [q.A = r.A and r.B > 0 and not exists s in S [r.B < s.B]]}"));
  const Cell& c = d.cells[0];
  const TableBox* r = c.table(0);
  ASSERT_NE(r, nullptr);
  ASSERT_EQ(r->rows.size(), 3u);
  EXPECT_TRUE(r->rows[1].is_join_row());
  EXPECT_FALSE(r->rows[2].is_join_row());
  ASSERT_EQ(c.edges.size(), 1u);
  EXPECT_TRUE(c.edges[0].directed);
  EXPECT_EQ(c.edges[0].op, CompOp::LT);
}

TEST(DiagramBuild, RejectsUnanchoredAndConstantOutput) {
  EXPECT_THROW(trc_to_diagram(parse_trc("{q(A) | exists r in R [q.A = r.A and not exists s in S [r.B = 1]]}")),
               AnchoringFault);
}

TEST(DiagramRoundTrip, HandBuiltDiagramsReadBack) {
  Schema s = parse_schema(fixtures::kRS);
  const std::pair<const std::string*, const std::string*> cases[] = {
      {&fixtures::kGuardDiagram, &fixtures::kGuardProgram},
      {&fixtures::kRejoinDiagram, &fixtures::kRejoinProgram},
      {&fixtures::kDirectDiagram, &fixtures::kDirectProgram},
  };
  for (const auto& [json, program] : cases) {
    Diagram d = load_json(*json);
    EXPECT_TRUE(validate_diagram(d).empty());
    TrcQuery q = diagram_to_single_trc(d);
    EXPECT_EQ(trc_to_diagram(q), d);
    EXPECT_TRUE(equiv_check(q, parse_datalog(*program), s).equivalent);
  }
}

TEST(DiagramRoundTrip, CalculusThroughDiagramIsStable) {
  for (const auto& text : {fixtures::kDivisionTrc1, fixtures::kDivisionTrc2, fixtures::kSailorTrc,
                           fixtures::kLimitsTrc, fixtures::kMaxTrc}) {
    TrcQuery q = parse_trc(text);
    Diagram d = trc_to_diagram(q);
    TrcQuery back = diagram_to_single_trc(d);
    EXPECT_EQ(trc_to_diagram(back), d) << text;
    EXPECT_EQ(extensional_tables(back).size(), extensional_tables(q).size());
  }
}

TEST(DiagramJson, EmitLoadRoundTrip) {
  Diagram d = trc_to_diagram(parse_trc(fixtures::kDivisionTrc2));
  std::string j = emit_json(d);
  EXPECT_EQ(load_json(j), d);
  EXPECT_EQ(emit_json(load_json(j)), j);
}

TEST(DiagramJson, SchemaViolationsNamePaths) {
  try {
    load_json(R"({"format": "reldiag-diagram", "version": 1, "mode": "query",
                  "cells": [{"root": 0, "partitions": [], "tables": [{"id": 0}], "edges": []}]})");
    FAIL() << "expected SchemaViolation";
  } catch (const SchemaViolation& e) {
    EXPECT_EQ(e.path(), "$.cells[0].tables[0].relation");
  }
  EXPECT_THROW(load_json("{"), SchemaViolation);
  EXPECT_THROW(load_json(R"({"format": "other", "version": 1, "mode": "query", "cells": []})"), SchemaViolation);
}

TEST(DiagramValidation, EachMutationViolatesItsCondition) {
  Diagram base = load_json(fixtures::kGuardDiagram);
  ASSERT_TRUE(validate_diagram(base).empty());
  for (const auto& m : mutations::all()) {
    Diagram d = base;
    m.apply(d);
    auto v = validate_diagram(d);
    ASSERT_FALSE(v.empty()) << m.name;
    for (const auto& x : v) EXPECT_EQ(x.condition, m.condition) << m.name << ": " << x.message;
    try {
      diagram_to_trc(d);
      ADD_FAILURE() << m.name << " was read back";
    } catch (const ValidityFault& e) {
      EXPECT_NE(std::string(e.what()).find("(" + std::to_string(m.condition) + ")"), std::string::npos) << e.what();
    }
  }
}

TEST(DiagramValidation, EmptyDiagramIsInvalid) {
  Diagram d;
  auto v = validate_diagram(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].condition, 3);
}

TEST(DiagramSvg, ElementCounts) {
  Diagram d = trc_to_diagram(parse_trc(
      "{q(A) | exists r in R [q.A = r.A and not exists s in S [r.B < s.B and "
      "not exists t in R [t.A = r.A]]]}"));
  std::string svg = emit_svg(d);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count_class(svg, "negation"), 2u);
  EXPECT_EQ(count_class(svg, "table-header"), 3u);
  EXPECT_EQ(count_class(svg, "edge"), 2u);
  EXPECT_EQ(count_class(svg, "edge-label"), 1u);
  EXPECT_EQ(count_class(svg, "output-header"), 1u);
  EXPECT_EQ(count_class(svg, "output-link"), 1u);
  EXPECT_EQ(emit_svg(d), svg);
}

TEST(DiagramSvg, SentenceHasNoOutputBox) {
  std::string svg = emit_svg(trc_to_diagram(parse_trc(fixtures::kSailorTrc)));
  EXPECT_EQ(count_class(svg, "output-header"), 0u);
  EXPECT_EQ(count_class(svg, "negation"), 2u);
}

TEST(DiagramUnion, CellsShareSignature) {
  Schema s = parse_schema(fixtures::kRST);
  UnionQuery u = eliminate_disjunction(
      sql_to_trc_formula(parse_sql(fixtures::kDisjunctionOrSql, ParseOptions{true}), &s));
  Diagram d = trc_to_diagram(u);
  EXPECT_EQ(d.cells.size(), 2u);
  EXPECT_TRUE(validate_diagram(d).empty());
  EXPECT_TRUE(equiv_check(diagram_to_trc(d), u, s).equivalent);
  EXPECT_THROW(diagram_to_single_trc(d), TranslationError);
}
