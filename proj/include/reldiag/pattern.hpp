#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "reldiag/evaluator.hpp"
#include "reldiag/query.hpp"

namespace reldiag {

/// A query whose extensional tables carry distinct fresh relation names.
struct ShatteredQuery {
  AnyQuery query;
  /// (fresh name, base relation) in occurrence order.
  std::vector<std::pair<std::string, std::string>> signature;
  /// The fresh relations, each cloned from its base relation.
  Schema schema;
};

/// Fresh names are <base>_1, <base>_2, ... per base relation in occurrence
/// order. Diagrams are read as calculus first; IDB names are kept.
ShatteredQuery shatter(const AnyQuery& q, const Schema& schema);

/// Renames the i-th extensional table to names[i]. Algebra leaves become
/// Rename[base](name) so qualified references still resolve.
AnyQuery rebind_tables(const AnyQuery& q, const std::vector<std::string>& names);

enum class PatternOutcome { ISOMORPH, NOT_ISOMORPH, UNDETERMINED };

std::string outcome_name(PatternOutcome o);

/// Pairs (fresh table of the first query, fresh table of the second).
using Bijection = std::vector<std::pair<std::string, std::string>>;

struct RefutedBijection {
  Bijection mapping;
  Counterexample counterexample;
};

struct PatternVerdict {
  PatternOutcome outcome = PatternOutcome::UNDETERMINED;
  Bijection bijection;  // ISOMORPH
  std::string bound;
  std::vector<RefutedBijection> refuted;  // NOT_ISOMORPH by the oracle
  std::string reason;  // NOT_ISOMORPH before any oracle call, or UNDETERMINED
  ShatteredQuery first;
  ShatteredQuery second;
  std::uint64_t bijections_tried = 0;
};

/// Tries every base-preserving bijection in lexicographic order and stops
/// at the first one under which the shattered queries agree on every
/// database of the bound. Throws SchemaError when a query does not fit the
/// schema.
PatternVerdict pattern_iso(const AnyQuery& q1, const AnyQuery& q2, const Schema& schema,
                           const OracleOptions& opts = {});

/// Evaluates the second shattered query with its tables renamed by `h`
/// into the first query's fresh names.
AnyQuery apply_bijection(const PatternVerdict& v, const Bijection& h);

struct PatternClasses {
  std::vector<std::vector<std::size_t>> classes;  // sorted, ordered by first member
  std::vector<std::pair<std::size_t, std::size_t>> undetermined;
  std::map<std::pair<std::size_t, std::size_t>, PatternOutcome> verdicts;
};

/// Each query joins the first class whose representative it is isomorphic
/// to; pairs the oracle cannot decide are listed instead of merged.
PatternClasses pattern_classes(const std::vector<AnyQuery>& queries, const Schema& schema,
                               const OracleOptions& opts = {});

}  // namespace reldiag
