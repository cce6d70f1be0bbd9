#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reldiag/query.hpp"

namespace reldiag {

struct Relation {
  std::vector<std::string> attrs;
  std::set<Tuple> tuples;
};

/// A query answer: a relation, or a truth value for sentences.
struct EvalResult {
  bool sentence = false;
  bool truth = false;
  Relation relation;

  /// Compares truth values or tuple sets; attribute names are ignored.
  bool same_as(const EvalResult& other) const;
  std::string text() const;
};

EvalResult eval_trc(const TrcQuery& q, const Database& db);
EvalResult eval_trc(const TrcFormulaQuery& q, const Database& db);
EvalResult eval_union(const UnionQuery& q, const Database& db);
EvalResult eval_datalog(const DatalogProgram& p, const Database& db);
EvalResult eval_ra(const RaExpr& e, const Database& db);
/// Full-mode SQL (with OR) is evaluated through its calculus formula.
EvalResult eval_sql(const SqlQuery& q, const Database& db);
EvalResult eval_diagram(const Diagram& d, const Database& db);
EvalResult evaluate(const AnyQuery& q, const Database& db);

/// A query compiled once against a schema and run on many databases.
/// Calculus forms become nested loops over tuple slots with each predicate
/// checked as soon as its variables are bound.
class PreparedQuery {
 public:
  PreparedQuery(const AnyQuery& q, const Schema& schema);
  ~PreparedQuery();
  PreparedQuery(PreparedQuery&&) noexcept;
  PreparedQuery& operator=(PreparedQuery&&) noexcept;

  EvalResult run(const Database& db) const;
  bool is_sentence() const;
  std::size_t arity() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

struct OracleOptions {
  int k = 2;
  std::size_t max_rows = 4;
  std::uint64_t ceiling = kDefaultCeiling;
  std::vector<Value> extra;
  unsigned workers = 1;
};

/// {0..k-1} plus the constants and extra values. A padding integer one
/// above the largest is added when some integer lies outside {0..k-1};
/// text attributes get the text constants plus k fresh strings.
TypedDomain oracle_domain(const std::vector<Value>& constants, const OracleOptions& opts);
std::string bound_text(const TypedDomain& domain, const OracleOptions& opts);

struct Counterexample {
  std::uint64_t index = 0;  // position in the enumeration stream
  Database db;
  /// Smallest tuple in the symmetric difference; empty for sentences.
  std::optional<Tuple> tuple;
  /// 1 when the tuple is only in the first answer, 2 when only in the second.
  int only_in = 0;
  EvalResult first;
  EvalResult second;
};

struct EquivVerdict {
  bool equivalent = false;  // up to the bound
  std::string bound;
  std::uint64_t databases = 0;
  std::optional<Counterexample> counterexample;
};

/// Exhaustive over every database of the bounded stream; returns the first
/// counterexample in stream order whatever the worker count. Throws
/// CapacityFault when the stream exceeds the ceiling and SchemaError when
/// the answers cannot be compared.
EquivVerdict equiv_check(const AnyQuery& q1, const AnyQuery& q2, const Schema& schema,
                         const OracleOptions& opts = {});
EquivVerdict equiv_check(const PreparedQuery& q1, const PreparedQuery& q2, const Schema& schema,
                         const TypedDomain& domain, const OracleOptions& opts);

}  // namespace reldiag
