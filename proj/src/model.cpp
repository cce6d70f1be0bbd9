#include "reldiag/model.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "lexer.hpp"
#include "reldiag/errors.hpp"

namespace reldiag {

CompOp flip(CompOp op) {
  switch (op) {
    case CompOp::LT: return CompOp::GT;
    case CompOp::GT: return CompOp::LT;
    case CompOp::LEQ: return CompOp::GEQ;
    case CompOp::GEQ: return CompOp::LEQ;
    default: return op;
  }
}

CompOp complement(CompOp op) {
  switch (op) {
    case CompOp::EQ: return CompOp::NEQ;
    case CompOp::NEQ: return CompOp::EQ;
    case CompOp::LT: return CompOp::GEQ;
    case CompOp::GEQ: return CompOp::LT;
    case CompOp::GT: return CompOp::LEQ;
    case CompOp::LEQ: return CompOp::GT;
  }
  return op;
}

bool is_symmetric(CompOp op) { return op == CompOp::EQ || op == CompOp::NEQ; }

std::string op_text(CompOp op) {
  switch (op) {
    case CompOp::EQ: return "=";
    case CompOp::NEQ: return "!=";
    case CompOp::LT: return "<";
    case CompOp::LEQ: return "<=";
    case CompOp::GT: return ">";
    case CompOp::GEQ: return ">=";
  }
  return "?";
}

std::optional<CompOp> parse_op(const std::string& text) {
  if (text == "=") return CompOp::EQ;
  if (text == "!=" || text == "<>") return CompOp::NEQ;
  if (text == "<") return CompOp::LT;
  if (text == "<=") return CompOp::LEQ;
  if (text == ">") return CompOp::GT;
  if (text == ">=") return CompOp::GEQ;
  return std::nullopt;
}

bool is_int(const Value& v) { return std::holds_alternative<std::int64_t>(v); }
bool is_string(const Value& v) { return std::holds_alternative<std::string>(v); }

std::string value_text(const Value& v) {
  if (is_int(v)) return std::to_string(std::get<std::int64_t>(v));
  std::string out = "'";
  for (char c : std::get<std::string>(v)) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

namespace {

template <typename T>
bool apply(const T& a, CompOp op, const T& b) {
  switch (op) {
    case CompOp::EQ: return a == b;
    case CompOp::NEQ: return a != b;
    case CompOp::LT: return a < b;
    case CompOp::LEQ: return a <= b;
    case CompOp::GT: return a > b;
    case CompOp::GEQ: return a >= b;
  }
  return false;
}

}  // namespace

bool compare(const Value& left, CompOp op, const Value& right) {
  if (left.index() != right.index())
    throw TypeFault("cannot compare " + value_text(left) + " with " + value_text(right));
  if (is_int(left)) return apply(std::get<std::int64_t>(left), op, std::get<std::int64_t>(right));
  // std::string comparison is byte-wise through char_traits<char>::compare,
  // which is specified as memcmp-like on unsigned char.
  return apply(std::get<std::string>(left), op, std::get<std::string>(right));
}

int RelationSchema::index_of(const std::string& attr) const {
  for (std::size_t i = 0; i < attrs.size(); ++i)
    if (attrs[i] == attr) return static_cast<int>(i);
  return -1;
}

Schema::Schema(std::initializer_list<RelationSchema> rels) {
  for (const auto& r : rels) add(r);
}

void Schema::add(RelationSchema rel) {
  if (rel.attrs.empty()) throw SchemaError("relation " + rel.name + " needs at least one attribute");
  if (find(rel.name)) throw SchemaError("relation " + rel.name + " declared twice");
  for (std::size_t i = 0; i < rel.attrs.size(); ++i)
    for (std::size_t j = i + 1; j < rel.attrs.size(); ++j)
      if (rel.attrs[i] == rel.attrs[j])
        throw SchemaError("attribute " + rel.attrs[i] + " repeated in " + rel.name);
  if (rel.types.empty()) rel.types.assign(rel.attrs.size(), AttrType::INT);
  if (rel.types.size() != rel.attrs.size())
    throw SchemaError("type list of " + rel.name + " does not match its attributes");
  relations_.push_back(std::move(rel));
}

void Schema::add(const std::string& name, std::vector<std::string> attrs) {
  add(RelationSchema{name, std::move(attrs), {}});
}

const RelationSchema* Schema::find(const std::string& name) const {
  for (const auto& r : relations_)
    if (r.name == name) return &r;
  return nullptr;
}

const RelationSchema& Schema::at(const std::string& name) const {
  const RelationSchema* r = find(name);
  if (!r) throw SchemaError("unknown relation " + name);
  return *r;
}

std::string tuple_text(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += value_text(t[i]);
  }
  return out + ")";
}

const std::set<Tuple>& Database::rows(const std::string& relation) const {
  static const std::set<Tuple> kEmpty;
  auto it = relations.find(relation);
  return it == relations.end() ? kEmpty : it->second;
}

void Database::insert(const std::string& relation, Tuple t) {
  const RelationSchema& rel = schema.at(relation);
  if (t.size() != rel.arity())
    throw SchemaError(relation + " expects " + std::to_string(rel.arity()) + " values, got " +
                      std::to_string(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    bool want_int = rel.types[i] == AttrType::INT;
    if (want_int != is_int(t[i]))
      throw TypeFault(relation + "." + rel.attrs[i] + " does not accept " + value_text(t[i]));
  }
  relations[relation].insert(std::move(t));
}

std::size_t Database::total_rows() const {
  std::size_t n = 0;
  for (const auto& [name, rows] : relations) n += rows.size();
  return n;
}

std::string database_text(const Database& db) {
  std::string out;
  for (const auto& rel : db.schema.relations()) {
    for (const auto& t : db.rows(rel.name)) out += rel.name + tuple_text(t) + "\n";
  }
  return out;
}

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

/// sum_{i <= m} C(n, i), saturating.
std::uint64_t bounded_subsets(std::uint64_t n, std::uint64_t m) {
  std::uint64_t total = 0;
  unsigned __int128 c = 1;  // C(n, i)
  for (std::uint64_t i = 0; i <= std::min(n, m); ++i) {
    if (i > 0) c = c * (n - i + 1) / i;
    if (c > kSaturated) return kSaturated;
    total = sat_add(total, static_cast<std::uint64_t>(c));
  }
  return total;
}

using AttrDomains = std::vector<const std::vector<Value>*>;

AttrDomains domains_for(const RelationSchema& rel, const TypedDomain& d) {
  AttrDomains out;
  for (auto t : rel.types) out.push_back(t == AttrType::INT ? &d.ints : &d.strings);
  return out;
}

std::uint64_t tuple_count(const AttrDomains& doms) {
  std::uint64_t n = 1;
  for (auto* d : doms) n = sat_mul(n, d->size());
  return n;
}

std::vector<Tuple> all_tuples(const AttrDomains& doms) {
  std::vector<Tuple> out;
  std::vector<std::size_t> idx(doms.size(), 0);
  for (auto* d : doms)
    if (d->empty()) return out;
  while (true) {
    Tuple t;
    for (std::size_t i = 0; i < doms.size(); ++i) t.push_back((*doms[i])[idx[i]]);
    out.push_back(std::move(t));
    std::size_t k = doms.size();
    while (k > 0) {
      --k;
      if (++idx[k] < doms[k]->size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
  }
}

/// Subsets of {0..n-1} with at most m members, by increasing bit mask.
std::vector<std::vector<std::uint32_t>> counter_subsets(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::uint32_t>> subsets{{}};
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t cur = subsets.size();
    for (std::size_t i = 0; i < cur; ++i) {
      if (subsets[i].size() >= m) continue;
      auto s = subsets[i];
      s.push_back(static_cast<std::uint32_t>(t));
      subsets.push_back(std::move(s));
    }
  }
  return subsets;
}

TypedDomain untyped(const std::vector<Value>& domain) { return TypedDomain{domain, domain}; }

struct Plan {
  std::vector<std::string> names;
  std::vector<std::vector<Tuple>> tuples;
  std::vector<std::vector<std::vector<std::uint32_t>>> subsets;
  std::uint64_t total = 1;
};

Plan make_plan(const Schema& schema, const TypedDomain& domain, std::size_t max_rows,
               std::uint64_t ceiling) {
  std::uint64_t total = database_count(schema, domain, max_rows);
  if (total > ceiling)
    throw CapacityFault("enumeration would visit " +
                        (total == kSaturated ? std::string("more than 2^64")
                                             : std::to_string(total)) +
                        " databases, above the ceiling of " + std::to_string(ceiling));
  Plan plan;
  plan.total = total;
  for (const auto& rel : schema.relations()) {
    auto doms = domains_for(rel, domain);
    plan.names.push_back(rel.name);
    plan.tuples.push_back(all_tuples(doms));
    plan.subsets.push_back(counter_subsets(plan.tuples.back().size(), max_rows));
  }
  return plan;
}

void load(Database& db, const Plan& plan, std::size_t r, std::size_t choice) {
  std::set<Tuple> rows;
  for (auto i : plan.subsets[r][choice]) rows.insert(plan.tuples[r][i]);
  db.relations[plan.names[r]] = std::move(rows);
}

}  // namespace

std::uint64_t database_count(const Schema& schema, const TypedDomain& domain,
                             std::size_t max_rows) {
  std::uint64_t total = 1;
  for (const auto& rel : schema.relations())
    total = sat_mul(total, bounded_subsets(tuple_count(domains_for(rel, domain)), max_rows));
  return total;
}

std::uint64_t database_count(const Schema& schema, const std::vector<Value>& domain,
                             std::size_t max_rows) {
  return database_count(schema, untyped(domain), max_rows);
}

void enumerate_databases_range(const Schema& schema, const TypedDomain& domain,
                               std::size_t max_rows, std::uint64_t begin, std::uint64_t end,
                               const IndexedDatabaseVisitor& visit, std::uint64_t ceiling) {
  Plan plan = make_plan(schema, domain, max_rows, ceiling);
  end = std::min(end, plan.total);
  if (begin >= end) return;
  std::size_t nrel = plan.names.size();
  // Mixed-radix digits of `begin`, last relation least significant.
  std::vector<std::size_t> digit(nrel, 0);
  std::uint64_t rest = begin;
  for (std::size_t r = nrel; r-- > 0;) {
    std::uint64_t radix = plan.subsets[r].size();
    digit[r] = static_cast<std::size_t>(rest % radix);
    rest /= radix;
  }
  Database db;
  db.schema = schema;
  for (std::size_t r = 0; r < nrel; ++r) load(db, plan, r, digit[r]);
  for (std::uint64_t index = begin; index < end; ++index) {
    if (!visit(index, db)) return;
    std::size_t r = nrel;
    while (r > 0) {
      --r;
      if (++digit[r] < plan.subsets[r].size()) {
        load(db, plan, r, digit[r]);
        break;
      }
      digit[r] = 0;
      load(db, plan, r, 0);
    }
  }
}

std::uint64_t enumerate_databases(const Schema& schema, const TypedDomain& domain,
                                  std::size_t max_rows, const DatabaseVisitor& visit,
                                  std::uint64_t ceiling) {
  std::uint64_t visited = 0;
  enumerate_databases_range(
      schema, domain, max_rows, 0, kSaturated,
      [&](std::uint64_t, const Database& db) {
        ++visited;
        return visit(db);
      },
      ceiling);
  return visited;
}

std::uint64_t enumerate_databases(const Schema& schema, const std::vector<Value>& domain,
                                  std::size_t max_rows, const DatabaseVisitor& visit,
                                  std::uint64_t ceiling) {
  if (domain.empty()) throw SchemaError("enumeration domain must not be empty");
  return enumerate_databases(schema, untyped(domain), max_rows, visit, ceiling);
}

Schema parse_schema(const std::string& text) {
  using namespace detail;
  TokenStream ts(tokenize(text));
  Schema schema;
  while (!ts.at_end()) {
    const Token& start = ts.peek();
    RelationSchema rel;
    rel.name = ts.expect_ident("relation name");
    ts.expect_sym("(");
    do {
      rel.attrs.push_back(ts.expect_ident("attribute name"));
      AttrType type = AttrType::INT;
      if (ts.accept_sym(":")) {
        if (ts.accept_kw("string") || ts.accept_kw("text")) {
          type = AttrType::STRING;
        } else if (ts.accept_kw("int") || ts.accept_kw("integer")) {
          type = AttrType::INT;
        } else {
          ts.fail("expected attribute type 'int' or 'string'");
        }
      }
      rel.types.push_back(type);
    } while (ts.accept_sym(","));
    ts.expect_sym(")");
    ts.accept_sym(".");
    try {
      schema.add(std::move(rel));
    } catch (const SchemaError& e) {
      TokenStream::fail_at(start, e.what());
    }
  }
  return schema;
}

std::string schema_text(const Schema& schema) {
  std::string out;
  for (const auto& rel : schema.relations()) {
    out += rel.name + "(";
    for (std::size_t i = 0; i < rel.attrs.size(); ++i) {
      if (i) out += ", ";
      out += rel.attrs[i];
      if (rel.types[i] == AttrType::STRING) out += ": string";
    }
    out += ")\n";
  }
  return out;
}

Database parse_database(const std::string& text, const Schema& schema) {
  using namespace detail;
  TokenStream ts(tokenize(text));
  Database db;
  db.schema = schema;
  while (!ts.at_end()) {
    const Token& start = ts.peek();
    std::string name = ts.expect_ident("relation name");
    if (!schema.contains(name)) TokenStream::fail_at(start, "unknown relation " + name);
    ts.expect_sym("(");
    Tuple t;
    if (!ts.is_sym(")")) {
      do {
        t.push_back(ts.expect_value());
      } while (ts.accept_sym(","));
    }
    ts.expect_sym(")");
    ts.accept_sym(".");
    try {
      db.insert(name, std::move(t));
    } catch (const Error& e) {
      TokenStream::fail_at(start, e.what());
    }
  }
  return db;
}

}  // namespace reldiag
