#pragma once

#include <string>

#include "reldiag/ast.hpp"
#include "reldiag/model.hpp"

namespace reldiag {

/// `full` admits disjunction (OR in SQL and calculus, Union in algebra).
struct ParseOptions {
  bool full = false;
};

SqlQuery parse_sql(const std::string& text, ParseOptions opts = {});

/// Canonical scope tree; rejects disjunction.
TrcQuery parse_trc(const std::string& text);
/// Raw formula with quantifiers where written; disjunction only when full.
TrcFormulaQuery parse_trc_formula(const std::string& text, ParseOptions opts = {});

/// Verifies acyclicity, one rule per head, and rule safety.
DatalogProgram parse_datalog(const std::string& text);
void validate_datalog(const DatalogProgram& p);

/// With a schema, every attribute reference is resolved and checked.
RaExpr parse_ra(const std::string& text, const Schema* schema = nullptr, ParseOptions opts = {});

std::string print_sql(const SqlQuery& q);
std::string print_trc(const TrcQuery& q);
std::string print_trc(const TrcFormulaQuery& q);
/// Cells separated by a line holding `union`.
std::string print_trc(const UnionQuery& q);
std::string print_datalog(const DatalogProgram& p);
std::string print_ra(const RaExpr& e);

std::string pred_text(const TrcPred& p);

/// Throws ScopeError for references to unquantified variables and
/// SafetyFault for output attributes not bound by exactly one root equality.
void check_trc(const TrcQuery& q);
void check_trc(const TrcFormulaQuery& q);

}  // namespace reldiag
