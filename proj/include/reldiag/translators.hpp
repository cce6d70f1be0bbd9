#pragma once

#include <cstddef>
#include <vector>

#include "reldiag/ast.hpp"

namespace reldiag {

/// One IDB per operator node (renamings excepted); a bare relation gets a
/// copy rule so there is always an answer IDB.
DatalogProgram ra_to_datalog(const RaExpr& e, const Schema& schema);

/// IDBs are inlined. Each negated atom becomes a difference, padded with a
/// projection of the positive part when it does not cover all variables.
/// Nullary IDBs become empty projections; a nullary answer is rejected.
RaExpr datalog_to_ra(const DatalogProgram& p, const Schema& schema);

/// One rule per negation scope, built inside out. Outer references that a
/// scope does not bind by equality get a guard copy of the referenced
/// relation. Output is normalized (see normalize_datalog).
DatalogProgram trc_to_datalog(const TrcQuery& q, const Schema& schema);

/// Rules are inlined into nested negation scopes; one scope per negated atom.
TrcQuery datalog_to_trc(const DatalogProgram& p, const Schema& schema);

/// Canonicalizes first. Tuple variables carry the SQL aliases.
TrcQuery sql_to_trc(const SqlQuery& q, const Schema* schema = nullptr);
/// For full-mode SQL: subqueries rewritten, disjunction kept.
TrcFormulaQuery sql_to_trc_formula(const SqlQuery& q, const Schema* schema = nullptr);
/// Aliases carry the tuple variable names.
SqlQuery trc_to_sql(const TrcQuery& q);

/// DNF inside every scope, De Morgan with duplicated tables below negation,
/// one union cell per remaining top-level disjunct. Throws CapacityFault
/// when a DNF exceeds `max_disjuncts`.
UnionQuery eliminate_disjunction(const TrcFormulaQuery& q, std::size_t max_disjuncts = 64);
std::vector<SqlQuery> union_to_sql(const UnionQuery& q);

/// Canonical presentation for comparisons: positive atoms sorted by
/// predicate, then built-ins, then negated atoms; IDBs renamed I (or I1..In)
/// with the answer Q; variables renamed x, y, z, w, v, u, then x1, x2, ...
/// by first occurrence; built-ins oriented by variable order.
DatalogProgram normalize_datalog(const DatalogProgram& p);

}  // namespace reldiag
