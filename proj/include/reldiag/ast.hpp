#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "reldiag/model.hpp"

namespace reldiag {

// ---------------------------------------------------------------- TRC

struct AttrRef {
  std::string var;
  std::string attr;
  bool operator==(const AttrRef&) const = default;
  auto operator<=>(const AttrRef&) const = default;
};

std::string ref_text(const AttrRef& r);

using Operand = std::variant<AttrRef, Value>;

/// JOIN when the right side is an attribute, SELECT when it is a constant.
struct TrcPred {
  AttrRef lhs;
  CompOp op = CompOp::EQ;
  Operand rhs;

  bool is_join() const { return std::holds_alternative<AttrRef>(rhs); }
  const AttrRef& rhs_ref() const { return std::get<AttrRef>(rhs); }
  const Value& rhs_value() const { return std::get<Value>(rhs); }
  bool operator==(const TrcPred&) const = default;
};

struct TrcVar {
  std::string name;
  std::string relation;
  bool operator==(const TrcVar&) const = default;
};

/// One negation scope: ∃ vars [ preds ∧ ¬(child_1) ∧ ... ].
struct TrcScope {
  std::vector<TrcVar> vars;
  std::vector<TrcPred> preds;
  std::vector<TrcScope> negations;
  bool operator==(const TrcScope&) const = default;
};

enum class QueryKind { QUERY, SENTENCE };

struct TrcQuery {
  QueryKind kind = QueryKind::QUERY;
  std::string out_name = "Q";
  std::vector<std::string> out_attrs;
  TrcScope root;
  bool operator==(const TrcQuery&) const = default;
};

/// Unrestricted calculus formula, used before quantifier pull-up and for
/// queries with disjunction.
struct TrcFormula {
  enum class Kind { ATOM, AND, OR, NOT, EXISTS };
  Kind kind = Kind::AND;
  TrcPred atom;                 // ATOM
  std::vector<TrcVar> vars;     // EXISTS
  std::vector<TrcFormula> kids; // AND/OR: operands; NOT/EXISTS: one body

  static TrcFormula make_atom(TrcPred p);
  static TrcFormula make_and(std::vector<TrcFormula> kids);
  static TrcFormula make_or(std::vector<TrcFormula> kids);
  static TrcFormula make_not(TrcFormula body);
  static TrcFormula make_exists(std::vector<TrcVar> vars, TrcFormula body);
  bool operator==(const TrcFormula&) const = default;
};

struct TrcFormulaQuery {
  QueryKind kind = QueryKind::QUERY;
  std::string out_name = "Q";
  std::vector<std::string> out_attrs;
  TrcFormula body;
  bool operator==(const TrcFormulaQuery&) const = default;
};

bool has_disjunction(const TrcFormula& f);
TrcFormula to_formula(const TrcScope& scope);
TrcFormulaQuery to_formula(const TrcQuery& q);

/// Union cells sharing one output signature.
struct UnionQuery {
  std::vector<TrcQuery> cells;
  bool operator==(const UnionQuery&) const = default;
};

// ------------------------------------------------------------ Datalog

struct DlAtom {
  std::string pred;
  std::vector<std::string> args;
  bool operator==(const DlAtom&) const = default;
};

struct DlBuiltin {
  std::string lhs;
  CompOp op = CompOp::EQ;
  std::variant<std::string, Value> rhs;  // variable or constant
  bool rhs_is_var() const { return std::holds_alternative<std::string>(rhs); }
  bool operator==(const DlBuiltin&) const = default;
};

struct DlLiteral {
  enum class Kind { POS, NEG, BUILTIN };
  Kind kind = Kind::POS;
  DlAtom atom;
  DlBuiltin builtin;
  bool operator==(const DlLiteral&) const = default;
};

struct DlRule {
  DlAtom head;
  std::vector<DlLiteral> body;
  bool operator==(const DlRule&) const = default;
};

/// Variables whose names start with '_' are anonymous.
struct DatalogProgram {
  std::vector<DlRule> rules;
  std::string answer;
  bool operator==(const DatalogProgram&) const = default;
};

bool is_anonymous(const std::string& var);
/// Names of predicates that head a rule.
std::vector<std::string> idb_names(const DatalogProgram& p);
const DlRule* rule_for(const DatalogProgram& p, const std::string& idb);

// ----------------------------------------------------------------- RA

struct RaRef {
  std::string qual;  // may be empty
  std::string name;
  bool operator==(const RaRef&) const = default;
};

std::string ra_ref_text(const RaRef& r);

struct RaCond {
  RaRef lhs;
  CompOp op = CompOp::EQ;
  std::variant<RaRef, Value> rhs;
  bool operator==(const RaCond&) const = default;
};

struct RaExpr {
  enum class Kind { REL, PROJECT, SELECT, PRODUCT, JOIN, MINUS, RENAME, UNION };
  Kind kind = Kind::REL;
  std::string relation;                                // REL
  std::vector<RaRef> attrs;                            // PROJECT
  std::vector<RaCond> conds;                           // SELECT, JOIN (empty = natural)
  std::vector<std::pair<std::string, std::string>> renames;  // RENAME attribute map
  std::string alias;                                   // RENAME qualifier
  std::vector<RaExpr> kids;

  static RaExpr rel(std::string name);
  static RaExpr project(std::vector<RaRef> attrs, RaExpr e);
  static RaExpr select(std::vector<RaCond> conds, RaExpr e);
  static RaExpr product(RaExpr a, RaExpr b);
  static RaExpr join(std::vector<RaCond> conds, RaExpr a, RaExpr b);
  static RaExpr minus(RaExpr a, RaExpr b);
  static RaExpr rename_attrs(std::vector<std::pair<std::string, std::string>> map, RaExpr e);
  static RaExpr rename_qual(std::string alias, RaExpr e);
  static RaExpr unite(RaExpr a, RaExpr b);
  bool operator==(const RaExpr&) const = default;
};

struct RaAttr {
  std::string qual;
  std::string name;
  bool operator==(const RaAttr&) const = default;
};

/// Output attributes of `e`; throws AttributeFault/SchemaError on
/// unresolvable or ambiguous references anywhere in the tree.
std::vector<RaAttr> ra_attributes(const RaExpr& e, const Schema& schema);
/// Index of `ref` among `attrs`; throws AttributeFault when unknown or
/// ambiguous.
std::size_t resolve_ra_ref(const std::vector<RaAttr>& attrs, const RaRef& ref);

// ---------------------------------------------------------------- SQL

struct SqlCol {
  std::string table;  // alias; empty until resolved
  std::string attr;
  bool operator==(const SqlCol&) const = default;
};

struct SqlFrom {
  std::string relation;
  std::string alias;  // equals relation when no alias was written
  bool operator==(const SqlFrom&) const = default;
};

struct SqlCond;

struct SqlSelect {
  bool star = false;
  std::vector<SqlCol> cols;
  std::vector<SqlFrom> from;
  std::vector<SqlCond> where;  // zero or one condition
  bool operator==(const SqlSelect&) const;
};

struct SqlCond {
  enum class Kind { AND, OR, CMP, NOT, EXISTS, NOT_EXISTS, IN, NOT_IN, ALL, ANY };
  Kind kind = Kind::AND;
  std::vector<SqlCond> kids;             // AND/OR operands, NOT body
  std::vector<SqlCol> lhs;               // CMP: one; IN: one or more; ALL/ANY: one
  CompOp op = CompOp::EQ;                // CMP/ALL/ANY
  std::variant<SqlCol, Value> rhs;       // CMP
  std::vector<SqlSelect> sub;            // EXISTS/IN/ALL/ANY: exactly one
  bool operator==(const SqlCond&) const = default;
};

struct SqlQuery {
  /// SELECT DISTINCT ..., or a sentence head SELECT NOT (P) / SELECT [NOT] EXISTS (S).
  enum class Head { DISTINCT, NOT, EXISTS, NOT_EXISTS };
  Head head = Head::DISTINCT;
  SqlSelect select;           // DISTINCT, EXISTS, NOT_EXISTS
  std::vector<SqlCond> pred;  // NOT: one condition
  bool operator==(const SqlQuery&) const = default;
};

bool is_sentence(const SqlQuery& q);

// ------------------------------------------------------- occurrences

struct Occurrence {
  std::size_t id;  // 1-based position in the occurrence order
  std::string relation;
  bool operator==(const Occurrence&) const = default;
};

std::vector<Occurrence> extensional_tables(const TrcQuery& q);
std::vector<Occurrence> extensional_tables(const TrcFormulaQuery& q);
std::vector<Occurrence> extensional_tables(const UnionQuery& q);
std::vector<Occurrence> extensional_tables(const DatalogProgram& p);
std::vector<Occurrence> extensional_tables(const RaExpr& e);
std::vector<Occurrence> extensional_tables(const SqlQuery& q);

/// Same, checking every relation against the schema.
template <typename Q>
std::vector<Occurrence> extensional_tables(const Q& q, const Schema& schema) {
  auto occ = extensional_tables(q);
  for (const auto& o : occ) schema.at(o.relation);
  return occ;
}

/// Smallest unused name among base, base2, base3, ...
std::string fresh_name(const std::string& base, const std::vector<std::string>& used);

}  // namespace reldiag
