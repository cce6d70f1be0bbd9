#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "reldiag/ast.hpp"
#include "reldiag/model.hpp"

namespace reldiag {

/// An attribute row; a selection row carries its comparison, a join row
/// does not.
struct AttrRow {
  std::string attr;
  std::optional<std::pair<CompOp, Value>> selection;
  bool is_join_row() const { return !selection.has_value(); }
  bool operator==(const AttrRow&) const = default;
};

struct TableBox {
  int id = 0;
  std::string relation;
  std::vector<AttrRow> rows;
  bool operator==(const TableBox&) const = default;
};

/// A canvas partition: the main canvas or one dashed negation box.
struct Partition {
  int id = 0;
  std::vector<int> tables;    // table ids
  std::vector<int> children;  // partition ids
  bool operator==(const Partition&) const = default;
};

struct RowRef {
  int table = 0;
  int row = 0;
  bool operator==(const RowRef&) const = default;
  auto operator<=>(const RowRef&) const = default;
};

/// Reads `from op to`; asymmetric operators are drawn as arrows.
struct JoinEdge {
  RowRef from;
  RowRef to;
  CompOp op = CompOp::EQ;
  bool directed = false;
  bool operator==(const JoinEdge&) const = default;
};

struct OutputAttr {
  std::string name;
  std::vector<RowRef> links;  // exactly one in a valid diagram
  bool operator==(const OutputAttr&) const = default;
};

struct OutputBox {
  std::string name = "Q";
  std::vector<OutputAttr> attrs;
  bool operator==(const OutputBox&) const = default;
};

struct Cell {
  int root = 0;
  std::vector<Partition> partitions;
  std::vector<TableBox> tables;
  std::vector<JoinEdge> edges;
  std::optional<OutputBox> output;
  bool operator==(const Cell&) const = default;

  const Partition* partition(int id) const;
  const TableBox* table(int id) const;
};

struct Diagram {
  QueryKind mode = QueryKind::QUERY;
  std::vector<Cell> cells;
  bool operator==(const Diagram&) const = default;
};

struct Violation {
  int condition = 0;  // 1..6
  std::size_t cell = 0;
  std::vector<int> elements;  // partition, table or edge ids as the message says
  std::string message;
};

/// Throws AnchoringFault or SafetyFault for input outside the fragment.
Diagram trc_to_diagram(const TrcQuery& q);
Diagram trc_to_diagram(const UnionQuery& q);

/// Tuple variables are named <relation lowercase><k> in partition pre-order.
/// Throws ValidityFault listing the violated conditions.
UnionQuery diagram_to_trc(const Diagram& d);
/// Single-cell convenience; throws TranslationError for several cells.
TrcQuery diagram_to_single_trc(const Diagram& d);

std::vector<Violation> validate_diagram(const Diagram& d);

std::string emit_json(const Diagram& d);
/// Throws SchemaViolation naming the JSON path of the first problem.
Diagram load_json(const std::string& text);

std::string emit_svg(const Diagram& d);

}  // namespace reldiag
