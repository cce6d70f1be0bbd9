#pragma once

#include <string>
#include <vector>

#include "reldiag/ast.hpp"

namespace reldiag {

struct AnchorViolation {
  /// Child indices from the root scope down to the offending scope.
  std::vector<std::size_t> scope_path;
  TrcPred pred;
  std::string message;
};

std::vector<AnchorViolation> check_anchored(const TrcQuery& q);

/// Hoists every positive quantifier to the head of its negation scope,
/// renaming variables apart on collision. Throws FragmentFault if the
/// formula still contains disjunction.
TrcQuery trc_pullup(const TrcFormulaQuery& q);
TrcQuery trc_pullup(const TrcQuery& q);

/// Qualifies every column, renames aliases apart, rewrites IN / ALL / ANY
/// into EXISTS forms and flattens positive EXISTS into the enclosing FROM.
/// Unqualified columns need the schema unless the FROM list is a single
/// table. Throws AnchoringFault when the result is not anchored.
SqlQuery sql_canonicalize(const SqlQuery& q, const Schema* schema = nullptr);

/// First two steps only (qualification, renaming apart, subquery rewrites);
/// keeps disjunction. Used for full-mode input.
SqlQuery sql_normalize_subqueries(const SqlQuery& q, const Schema* schema = nullptr);

}  // namespace reldiag
