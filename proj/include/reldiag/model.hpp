#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace reldiag {

enum class CompOp { EQ, NEQ, LT, LEQ, GT, GEQ };

/// Swaps operand sides: a < b iff b > a.
CompOp flip(CompOp op);
/// Logical negation: not (a < b) iff a >= b.
CompOp complement(CompOp op);
bool is_symmetric(CompOp op);
std::string op_text(CompOp op);
std::optional<CompOp> parse_op(const std::string& text);

using Value = std::variant<std::int64_t, std::string>;

bool is_int(const Value& v);
bool is_string(const Value& v);
/// Literal form: integers bare, strings single-quoted with '' escaping.
std::string value_text(const Value& v);

/// Throws TypeFault when the tags differ.
bool compare(const Value& left, CompOp op, const Value& right);

enum class AttrType { INT, STRING };

struct RelationSchema {
  std::string name;
  std::vector<std::string> attrs;
  std::vector<AttrType> types;

  std::size_t arity() const { return attrs.size(); }
  /// -1 when absent.
  int index_of(const std::string& attr) const;
  bool operator==(const RelationSchema&) const = default;
};

class Schema {
 public:
  Schema() = default;
  Schema(std::initializer_list<RelationSchema> rels);

  /// Attributes default to INT when `types` is empty.
  void add(RelationSchema rel);
  void add(const std::string& name, std::vector<std::string> attrs);

  const RelationSchema* find(const std::string& name) const;
  /// Throws SchemaError for unknown relations.
  const RelationSchema& at(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }
  const std::vector<RelationSchema>& relations() const { return relations_; }
  std::size_t size() const { return relations_.size(); }
  bool operator==(const Schema&) const = default;

 private:
  std::vector<RelationSchema> relations_;
};

using Tuple = std::vector<Value>;

std::string tuple_text(const Tuple& t);

struct Database {
  Schema schema;
  std::map<std::string, std::set<Tuple>> relations;

  /// Empty set for relations without tuples.
  const std::set<Tuple>& rows(const std::string& relation) const;
  /// Checks arity and tags against the schema.
  void insert(const std::string& relation, Tuple t);
  std::size_t total_rows() const;
  bool operator==(const Database&) const = default;
};

/// Deterministic text form: relations in schema order, tuples sorted.
std::string database_text(const Database& db);

/// Per-type candidate values for enumeration.
struct TypedDomain {
  std::vector<Value> ints;
  std::vector<Value> strings;
};

inline constexpr std::uint64_t kDefaultCeiling = 10'000'000;

/// Closed-form count of databases enumerate_databases would produce.
/// Saturates at UINT64_MAX.
std::uint64_t database_count(const Schema& schema, const TypedDomain& domain,
                             std::size_t max_rows);
std::uint64_t database_count(const Schema& schema, const std::vector<Value>& domain,
                             std::size_t max_rows);

/// Visitor returns false to stop early. The Database reference is reused
/// between calls; copy it to keep it.
using DatabaseVisitor = std::function<bool(const Database&)>;

/// Relations vary in schema order with the last relation fastest; tuples
/// are ordered lexicographically by domain position; subsets of a relation
/// follow the binary counter over its tuple list. Returns how many
/// databases were visited.
std::uint64_t enumerate_databases(const Schema& schema, const std::vector<Value>& domain,
                                  std::size_t max_rows, const DatabaseVisitor& visit,
                                  std::uint64_t ceiling = kDefaultCeiling);
std::uint64_t enumerate_databases(const Schema& schema, const TypedDomain& domain,
                                  std::size_t max_rows, const DatabaseVisitor& visit,
                                  std::uint64_t ceiling = kDefaultCeiling);

/// Same stream, restricted to indices in [begin, end). Used by parallel
/// callers; the index passed to the visitor is the global position.
using IndexedDatabaseVisitor = std::function<bool(std::uint64_t, const Database&)>;
void enumerate_databases_range(const Schema& schema, const TypedDomain& domain,
                               std::size_t max_rows, std::uint64_t begin, std::uint64_t end,
                               const IndexedDatabaseVisitor& visit,
                               std::uint64_t ceiling = kDefaultCeiling);

/// `R(A, B)` per line; `attr: string` marks a text column.
Schema parse_schema(const std::string& text);
std::string schema_text(const Schema& schema);

/// `R(1, "red")` per line; `#` starts a comment.
Database parse_database(const std::string& text, const Schema& schema);

}  // namespace reldiag
