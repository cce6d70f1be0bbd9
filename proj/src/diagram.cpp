#include "reldiag/diagram.hpp"

#include <algorithm>
#include <functional>
#include <tuple>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "lexer.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"

namespace reldiag {

const Partition* Cell::partition(int id) const {
  for (const auto& p : partitions)
    if (p.id == id) return &p;
  return nullptr;
}

const TableBox* Cell::table(int id) const {
  for (const auto& t : tables)
    if (t.id == id) return &t;
  return nullptr;
}

// --------------------------------------------------------- TRC -> diagram

namespace {

struct Placed {
  int table;
  const TrcVar* var;
};

class Builder {
 public:
  explicit Builder(const TrcQuery& q) : q_(q) {}

  Cell run() {
    collect_uses(q_.root);
    cell_.root = place(q_.root);
    std::sort(cell_.partitions.begin(), cell_.partitions.end(),
              [](const Partition& a, const Partition& b) { return a.id < b.id; });
    edges(q_.root);
    std::sort(cell_.edges.begin(), cell_.edges.end(), [](const JoinEdge& a, const JoinEdge& b) {
      return std::tie(a.from, a.to, a.op) < std::tie(b.from, b.to, b.op);
    });
    if (q_.kind == QueryKind::QUERY) {
      OutputBox box;
      box.name = q_.out_name;
      for (const auto& attr : q_.out_attrs) {
        OutputAttr oa;
        oa.name = attr;
        for (const auto& p : q_.root.preds) {
          if (p.lhs.var != q_.out_name || p.lhs.attr != attr) continue;
          if (!p.is_join()) throw SafetyFault("output attribute " + attr + " is bound to a constant");
          oa.links.push_back(join_row(p.rhs_ref()));
        }
        box.attrs.push_back(std::move(oa));
      }
      cell_.output = std::move(box);
    }
    return cell_;
  }

 private:
  bool is_out(const AttrRef& r) const { return q_.kind == QueryKind::QUERY && r.var == q_.out_name; }

  void collect_uses(const TrcScope& s) {
    for (const auto& p : s.preds) {
      if (p.is_join()) {
        if (!is_out(p.lhs)) join_attrs_[p.lhs.var].insert(p.lhs.attr);
        join_attrs_[p.rhs_ref().var].insert(p.rhs_ref().attr);
      }
    }
    for (const auto& c : s.negations) collect_uses(c);
  }

  int place(const TrcScope& s) {
    int id = next_partition_++;
    Partition part;
    part.id = id;
    std::size_t env_before = env_.size();
    for (const auto& v : s.vars) {
      TableBox t;
      t.id = static_cast<int>(cell_.tables.size());
      t.relation = v.relation;
      std::set<std::string> attrs = join_attrs_[v.name];
      std::map<std::string, std::vector<std::pair<CompOp, Value>>> sel;
      for (const auto& p : s.preds) {
        if (p.is_join() || p.lhs.var != v.name) continue;
        attrs.insert(p.lhs.attr);
        sel[p.lhs.attr].emplace_back(p.op, p.rhs_value());
      }
      for (const auto& a : attrs) {
        if (join_attrs_[v.name].count(a)) t.rows.push_back(AttrRow{a, std::nullopt});
        auto& list = sel[a];
        std::sort(list.begin(), list.end());
        for (const auto& s2 : list) t.rows.push_back(AttrRow{a, s2});
      }
      env_.push_back(Placed{t.id, &v});
      part.tables.push_back(t.id);
      cell_.tables.push_back(std::move(t));
    }
    scopes_.push_back(env_);
    std::size_t slot = cell_.partitions.size();
    cell_.partitions.push_back(part);
    std::vector<int> kids;
    for (const auto& c : s.negations) kids.push_back(place(c));
    cell_.partitions[slot].children = std::move(kids);
    env_.resize(env_before);
    return id;
  }

  RowRef join_row(const AttrRef& r) const {
    for (auto it = cur_.rbegin(); it != cur_.rend(); ++it) {
      if (it->var->name != r.var) continue;
      const TableBox& t = cell_.tables[it->table];
      for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.rows[i].attr == r.attr && t.rows[i].is_join_row()) return RowRef{t.id, static_cast<int>(i)};
    }
    throw ScopeError(r.var);
  }

  void edges(const TrcScope& s) {
    cur_ = scopes_[scope_index_++];
    for (const auto& p : s.preds) {
      if (!p.is_join() || is_out(p.lhs)) continue;
      JoinEdge e;
      e.from = join_row(p.lhs);
      e.to = join_row(p.rhs_ref());
      e.op = p.op;
      e.directed = !is_symmetric(p.op);
      if (!e.directed && e.to < e.from) std::swap(e.from, e.to);
      cell_.edges.push_back(e);
    }
    for (const auto& c : s.negations) edges(c);
  }

  const TrcQuery& q_;
  Cell cell_;
  int next_partition_ = 0;
  std::map<std::string, std::set<std::string>> join_attrs_;
  std::vector<Placed> env_;
  std::vector<std::vector<Placed>> scopes_;
  std::vector<Placed> cur_;
  std::size_t scope_index_ = 0;
};

[[noreturn]] void throw_violations(const std::vector<Violation>& vs) {
  std::set<int> conds;
  std::string msg = "invalid diagram:";
  for (const auto& v : vs) {
    conds.insert(v.condition);
    msg += " (" + std::to_string(v.condition) + ") " + v.message + ";";
  }
  msg.pop_back();
  throw ValidityFault(msg, std::vector<int>(conds.begin(), conds.end()));
}

Cell build_cell(const TrcQuery& q) {
  check_trc(q);
  auto violations = check_anchored(q);
  if (!violations.empty()) throw AnchoringFault(violations.front().message);
  return Builder(q).run();
}

}  // namespace

Diagram trc_to_diagram(const TrcQuery& q) {
  Diagram d;
  d.mode = q.kind;
  d.cells.push_back(build_cell(q));
  auto vs = validate_diagram(d);
  if (!vs.empty()) throw_violations(vs);
  return d;
}

Diagram trc_to_diagram(const UnionQuery& q) {
  Diagram d;
  if (q.cells.empty()) throw TranslationError("a union needs at least one cell");
  d.mode = q.cells[0].kind;
  for (const auto& c : q.cells) {
    if (c.kind != d.mode) throw TranslationError("union cells mix sentences and queries");
    d.cells.push_back(build_cell(c));
  }
  auto vs = validate_diagram(d);
  if (!vs.empty()) throw_violations(vs);
  return d;
}

// ------------------------------------------------------------- validity

namespace {

class Validator {
 public:
  Validator(const Diagram& d, std::vector<Violation>& out) : d_(d), out_(out) {}

  void run() {
    if (d_.cells.empty()) {
      add(3, 0, {}, "the diagram has no cell, so its canvas is empty");
      return;
    }
    for (std::size_t i = 0; i < d_.cells.size(); ++i) cell(i);
    signatures();
  }

 private:
  void add(int cond, std::size_t cell, std::vector<int> ids, std::string msg) {
    out_.push_back(Violation{cond, cell, std::move(ids), std::move(msg)});
  }

  void cell(std::size_t ci) {
    const Cell& c = d_.cells[ci];
    // (1) the partitions form a tree under the root
    std::map<int, int> parents;
    std::set<int> ids;
    bool tree_ok = true;
    for (const auto& p : c.partitions) {
      if (!ids.insert(p.id).second) {
        add(1, ci, {p.id}, "partition " + std::to_string(p.id) + " is declared twice");
        tree_ok = false;
      }
    }
    if (!ids.count(c.root)) {
      add(1, ci, {c.root}, "root partition " + std::to_string(c.root) + " does not exist");
      tree_ok = false;
    }
    for (const auto& p : c.partitions) {
      for (int k : p.children) {
        if (!ids.count(k)) {
          add(1, ci, {p.id, k}, "partition " + std::to_string(p.id) + " nests unknown partition " + std::to_string(k));
          tree_ok = false;
        } else if (k == c.root) {
          add(1, ci, {p.id, k}, "the root partition is nested in partition " + std::to_string(p.id));
          tree_ok = false;
        } else if (parents.count(k)) {
          add(1, ci, {parents[k], p.id, k},
              "partition " + std::to_string(k) + " is nested in two partitions");
          tree_ok = false;
        } else {
          parents[k] = p.id;
        }
      }
    }
    std::map<int, int> depth;
    if (tree_ok) {
      std::vector<int> stack{c.root};
      depth[c.root] = 0;
      while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        for (int k : c.partition(id)->children) {
          if (depth.count(k)) continue;
          depth[k] = depth[id] + 1;
          stack.push_back(k);
        }
      }
      for (const auto& p : c.partitions) {
        if (!depth.count(p.id)) {
          add(1, ci, {p.id}, "partition " + std::to_string(p.id) + " is not reachable from the root");
          tree_ok = false;
        }
      }
    }
    // (2) every table sits in exactly one partition; rows are not duplicated
    std::map<int, int> home;
    std::set<int> table_ids;
    for (const auto& t : c.tables) {
      if (!table_ids.insert(t.id).second) add(2, ci, {t.id}, "table " + std::to_string(t.id) + " is declared twice");
      std::set<std::string> join_rows;
      for (const auto& r : t.rows)
        if (r.is_join_row() && !join_rows.insert(r.attr).second)
          add(2, ci, {t.id}, "table " + std::to_string(t.id) + " shows join attribute " + r.attr + " twice");
    }
    for (const auto& p : c.partitions) {
      for (int t : p.tables) {
        if (!table_ids.count(t)) {
          add(2, ci, {p.id, t}, "partition " + std::to_string(p.id) + " holds unknown table " + std::to_string(t));
        } else if (home.count(t)) {
          add(2, ci, {home[t], p.id, t}, "table " + std::to_string(t) + " is placed in two partitions");
        } else {
          home[t] = p.id;
        }
      }
    }
    for (int t : table_ids)
      if (!home.count(t)) add(2, ci, {t}, "table " + std::to_string(t) + " is placed in no partition");
    // (3) leaves hold tables
    for (const auto& p : c.partitions) {
      if (p.children.empty() && p.tables.empty()) {
        add(3, ci, {p.id},
            p.id == c.root ? std::string("the canvas is empty")
                           : "negation box " + std::to_string(p.id) + " contains no table");
      }
    }
    // (4) joins connect join rows of nested partitions, with arrows exactly on asymmetric operators
    auto row_ok = [&](const RowRef& r) {
      const TableBox* t = c.table(r.table);
      return t && r.row >= 0 && r.row < static_cast<int>(t->rows.size()) && t->rows[r.row].is_join_row();
    };
    auto ancestor = [&](int a, int b) {  // a is b or an ancestor of b
      for (int x = b;;) {
        if (x == a) return true;
        auto it = parents.find(x);
        if (it == parents.end()) return false;
        x = it->second;
      }
    };
    for (std::size_t i = 0; i < c.edges.size(); ++i) {
      const JoinEdge& e = c.edges[i];
      int id = static_cast<int>(i);
      if (!row_ok(e.from) || !row_ok(e.to)) {
        add(4, ci, {id}, "edge " + std::to_string(i) + " does not connect two join rows");
        continue;
      }
      if (e.directed == is_symmetric(e.op))
        add(4, ci, {id}, "edge " + std::to_string(i) + (e.directed ? " has an arrow on the symmetric operator "
                                                                   : " lacks an arrow for the operator ") +
                             op_text(e.op));
      if (!tree_ok || !home.count(e.from.table) || !home.count(e.to.table)) continue;
      int pa = home[e.from.table];
      int pb = home[e.to.table];
      if (!ancestor(pa, pb) && !ancestor(pb, pa))
        add(4, ci, {id}, "edge " + std::to_string(i) + " joins partitions " + std::to_string(pa) + " and " +
                             std::to_string(pb) + ", neither of which contains the other");
    }
    // (5) output box
    if (d_.mode == QueryKind::SENTENCE) {
      if (c.output) add(5, ci, {}, "a sentence has no output table");
      return;
    }
    if (!c.output) {
      add(5, ci, {}, "the cell has no output table");
      return;
    }
    std::set<std::string> names;
    for (const auto& a : c.output->attrs) {
      if (!names.insert(a.name).second) add(5, ci, {}, "output attribute " + a.name + " appears twice");
      if (a.links.size() != 1) {
        add(5, ci, {}, "output attribute " + a.name + " connects to " + std::to_string(a.links.size()) +
                           " attributes instead of one");
        continue;
      }
      const RowRef& r = a.links[0];
      if (!row_ok(r)) {
        add(5, ci, {r.table}, "output attribute " + a.name + " does not connect to a join row");
      } else if (!home.count(r.table) || home[r.table] != c.root) {
        add(5, ci, {r.table}, "output attribute " + a.name + " connects to a table outside the root partition");
      }
    }
  }

  void signatures() {
    if (d_.mode != QueryKind::QUERY) return;
    const Cell& first = d_.cells[0];
    if (!first.output) return;
    auto sig = [](const OutputBox& b) {
      std::set<std::string> s;
      for (const auto& a : b.attrs) s.insert(a.name);
      return std::make_pair(b.name, s);
    };
    for (std::size_t i = 1; i < d_.cells.size(); ++i) {
      const auto& o = d_.cells[i].output;
      if (o && sig(*o) != sig(*first.output))
        add(6, i, {}, "union cell " + std::to_string(i) + " has a different output name or attribute set");
    }
  }

  const Diagram& d_;
  std::vector<Violation>& out_;
};

}  // namespace

std::vector<Violation> validate_diagram(const Diagram& d) {
  std::vector<Violation> out;
  Validator(d, out).run();
  return out;
}

// --------------------------------------------------------- diagram -> TRC

namespace {

TrcQuery read_cell(const Cell& c, QueryKind mode) {
  TrcQuery q;
  q.kind = mode;
  std::map<int, std::string> names;
  std::map<int, int> home;
  std::map<int, int> depth;
  std::map<std::string, int> counts;
  std::vector<int> order;  // partitions in pre-order
  std::vector<std::pair<int, int>> stack{{c.root, 0}};
  while (!stack.empty()) {
    auto [id, dep] = stack.back();
    stack.pop_back();
    order.push_back(id);
    depth[id] = dep;
    const Partition* p = c.partition(id);
    for (int t : p->tables) {
      const TableBox* tb = c.table(t);
      names[t] = detail::to_lower(tb->relation) + std::to_string(++counts[tb->relation]);
      home[t] = id;
    }
    for (auto it = p->children.rbegin(); it != p->children.rend(); ++it) stack.emplace_back(*it, dep + 1);
  }
  std::map<int, TrcScope> scopes;
  for (int id : order) {
    for (int t : c.partition(id)->tables) scopes[id].vars.push_back(TrcVar{names[t], c.table(t)->relation});
  }
  auto ref = [&](const RowRef& r) { return AttrRef{names[r.table], c.table(r.table)->rows[r.row].attr}; };
  if (mode == QueryKind::QUERY) {
    q.out_name = c.output->name;
    for (const auto& a : c.output->attrs) {
      q.out_attrs.push_back(a.name);
      TrcPred p;
      p.lhs = AttrRef{q.out_name, a.name};
      p.rhs = ref(a.links[0]);
      scopes[c.root].preds.push_back(std::move(p));
    }
  }
  for (int id : order) {
    for (int t : c.partition(id)->tables) {
      const TableBox* tb = c.table(t);
      for (const auto& r : tb->rows) {
        if (!r.selection) continue;
        TrcPred p;
        p.lhs = AttrRef{names[t], r.attr};
        p.op = r.selection->first;
        p.rhs = r.selection->second;
        scopes[id].preds.push_back(std::move(p));
      }
    }
  }
  for (const auto& e : c.edges) {
    int pa = home[e.from.table];
    int pb = home[e.to.table];
    TrcPred p;
    p.lhs = ref(e.from);
    p.op = e.op;
    p.rhs = ref(e.to);
    scopes[depth[pa] >= depth[pb] ? pa : pb].preds.push_back(std::move(p));
  }
  // Assemble the tree bottom-up.
  std::function<TrcScope(int)> assemble = [&](int id) {
    TrcScope s = std::move(scopes[id]);
    for (int k : c.partition(id)->children) s.negations.push_back(assemble(k));
    return s;
  };
  q.root = assemble(c.root);
  return q;
}

}  // namespace

UnionQuery diagram_to_trc(const Diagram& d) {
  auto vs = validate_diagram(d);
  if (!vs.empty()) throw_violations(vs);
  UnionQuery u;
  for (const auto& c : d.cells) u.cells.push_back(read_cell(c, d.mode));
  return u;
}

TrcQuery diagram_to_single_trc(const Diagram& d) {
  UnionQuery u = diagram_to_trc(d);
  if (u.cells.size() != 1)
    throw TranslationError("the diagram has " + std::to_string(u.cells.size()) + " union cells");
  return u.cells[0];
}

// ----------------------------------------------------------------- JSON

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

ojson value_json(const Value& v) {
  if (is_int(v)) return std::get<std::int64_t>(v);
  return std::get<std::string>(v);
}

ojson row_ref_json(const RowRef& r) { return ojson{{"table", r.table}, {"row", r.row}}; }

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaViolation(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaViolation(at(path, key), "missing field");
  return *it;
}

int int_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_number_integer()) throw SchemaViolation(at(path, key), "expected an integer");
  return v.get<int>();
}

std::string str_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_string()) throw SchemaViolation(at(path, key), "expected a string");
  return v.get<std::string>();
}

const json& array_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_array()) throw SchemaViolation(at(path, key), "expected an array");
  return v;
}

CompOp op_field(const json& j, const std::string& key, const std::string& path) {
  auto op = parse_op(str_field(j, key, path));
  if (!op) throw SchemaViolation(at(path, key), "unknown comparison operator");
  return *op;
}

RowRef row_ref(const json& j, const std::string& path) {
  return RowRef{int_field(j, "table", path), int_field(j, "row", path)};
}

std::vector<int> int_list(const json& j, const std::string& key, const std::string& path) {
  std::vector<int> out;
  const json& a = array_field(j, key, path);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number_integer()) throw SchemaViolation(at(at(path, key), i), "expected an integer");
    out.push_back(a[i].get<int>());
  }
  return out;
}

}  // namespace

std::string emit_json(const Diagram& d) {
  ojson root;
  root["format"] = "reldiag-diagram";
  root["version"] = 1;
  root["mode"] = d.mode == QueryKind::QUERY ? "query" : "sentence";
  ojson cells = ojson::array();
  for (const auto& c : d.cells) {
    ojson cj;
    cj["root"] = c.root;
    ojson parts = ojson::array();
    for (const auto& p : c.partitions)
      parts.push_back(ojson{{"id", p.id}, {"tables", p.tables}, {"children", p.children}});
    cj["partitions"] = parts;
    ojson tables = ojson::array();
    for (const auto& t : c.tables) {
      ojson rows = ojson::array();
      for (const auto& r : t.rows) {
        ojson rj{{"attr", r.attr}};
        if (r.selection) {
          rj["op"] = op_text(r.selection->first);
          rj["value"] = value_json(r.selection->second);
        }
        rows.push_back(rj);
      }
      tables.push_back(ojson{{"id", t.id}, {"relation", t.relation}, {"rows", rows}});
    }
    cj["tables"] = tables;
    ojson edges = ojson::array();
    for (const auto& e : c.edges)
      edges.push_back(ojson{{"from", row_ref_json(e.from)},
                            {"to", row_ref_json(e.to)},
                            {"op", op_text(e.op)},
                            {"directed", e.directed}});
    cj["edges"] = edges;
    if (c.output) {
      ojson attrs = ojson::array();
      for (const auto& a : c.output->attrs) {
        ojson links = ojson::array();
        for (const auto& l : a.links) links.push_back(row_ref_json(l));
        attrs.push_back(ojson{{"name", a.name}, {"links", links}});
      }
      cj["output"] = ojson{{"name", c.output->name}, {"attrs", attrs}};
    }
    cells.push_back(cj);
  }
  root["cells"] = cells;
  return root.dump(2) + "\n";
}

Diagram load_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation("$", std::string("malformed JSON: ") + e.what());
  }
  const std::string p0 = "$";
  if (!root.is_object()) throw SchemaViolation(p0, "expected an object");
  if (root.contains("format") && root["format"] != "reldiag-diagram")
    throw SchemaViolation("$.format", "expected \"reldiag-diagram\"");
  Diagram d;
  std::string mode = str_field(root, "mode", p0);
  if (mode == "query") {
    d.mode = QueryKind::QUERY;
  } else if (mode == "sentence") {
    d.mode = QueryKind::SENTENCE;
  } else {
    throw SchemaViolation("$.mode", "expected \"query\" or \"sentence\"");
  }
  const json& cells = array_field(root, "cells", p0);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    std::string cp = at("$.cells", ci);
    const json& cj = cells[ci];
    Cell c;
    c.root = int_field(cj, "root", cp);
    const json& parts = array_field(cj, "partitions", cp);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      std::string pp = at(at(cp, "partitions"), i);
      Partition p;
      p.id = int_field(parts[i], "id", pp);
      p.tables = int_list(parts[i], "tables", pp);
      p.children = int_list(parts[i], "children", pp);
      c.partitions.push_back(std::move(p));
    }
    const json& tables = array_field(cj, "tables", cp);
    for (std::size_t i = 0; i < tables.size(); ++i) {
      std::string tp = at(at(cp, "tables"), i);
      TableBox t;
      t.id = int_field(tables[i], "id", tp);
      t.relation = str_field(tables[i], "relation", tp);
      const json& rows = array_field(tables[i], "rows", tp);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        std::string rp = at(at(tp, "rows"), r);
        AttrRow row;
        row.attr = str_field(rows[r], "attr", rp);
        bool has_op = rows[r].contains("op");
        bool has_value = rows[r].contains("value");
        if (has_op != has_value)
          throw SchemaViolation(rp, "a selection row needs both \"op\" and \"value\"");
        if (has_op) {
          const json& v = rows[r]["value"];
          Value val;
          if (v.is_number_integer()) {
            val = v.get<std::int64_t>();
          } else if (v.is_string()) {
            val = v.get<std::string>();
          } else {
            throw SchemaViolation(at(rp, "value"), "expected an integer or a string");
          }
          row.selection = std::make_pair(op_field(rows[r], "op", rp), val);
        }
        t.rows.push_back(std::move(row));
      }
      c.tables.push_back(std::move(t));
    }
    const json& edges = array_field(cj, "edges", cp);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      std::string ep = at(at(cp, "edges"), i);
      JoinEdge e;
      e.from = row_ref(field(edges[i], "from", ep), at(ep, "from"));
      e.to = row_ref(field(edges[i], "to", ep), at(ep, "to"));
      e.op = op_field(edges[i], "op", ep);
      const json& dir = field(edges[i], "directed", ep);
      if (!dir.is_boolean()) throw SchemaViolation(at(ep, "directed"), "expected a boolean");
      e.directed = dir.get<bool>();
      c.edges.push_back(e);
    }
    if (cj.contains("output")) {
      std::string op = at(cp, "output");
      const json& oj = cj["output"];
      OutputBox box;
      box.name = str_field(oj, "name", op);
      const json& attrs = array_field(oj, "attrs", op);
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        std::string ap = at(at(op, "attrs"), i);
        OutputAttr a;
        a.name = str_field(attrs[i], "name", ap);
        const json& links = array_field(attrs[i], "links", ap);
        for (std::size_t l = 0; l < links.size(); ++l) a.links.push_back(row_ref(links[l], at(at(ap, "links"), l)));
        box.attrs.push_back(std::move(a));
      }
      c.output = std::move(box);
    }
    d.cells.push_back(std::move(c));
  }
  return d;
}

// ------------------------------------------------------------------ SVG

namespace {

constexpr int kPad = 14;
constexpr int kGap = 24;
constexpr int kHeader = 22;
constexpr int kRow = 20;
constexpr int kChar = 8;

std::string esc(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string row_label(const AttrRow& r) {
  if (!r.selection) return r.attr;
  return r.attr + " " + op_text(r.selection->first) + " " + value_text(r.selection->second);
}

struct Box {
  int x = 0, y = 0, w = 0, h = 0;
};

class Layout {
 public:
  explicit Layout(const Cell& c) : c_(c) {}

  void run(int x, int y) {
    measure(c_.root);
    position(c_.root, x, y);
  }

  std::map<int, Box> parts;
  std::map<int, Box> tables;

  int table_width(const TableBox& t) const {
    std::size_t len = t.relation.size();
    for (const auto& r : t.rows) len = std::max(len, row_label(r).size());
    return std::max<int>(60, static_cast<int>(len) * kChar + 16);
  }
  static int table_height(const TableBox& t) { return kHeader + kRow * static_cast<int>(t.rows.size()); }

 private:
  void measure(int id) {
    const Partition* p = c_.partition(id);
    int row_w = 0, row_h = 0;
    for (std::size_t i = 0; i < p->tables.size(); ++i) {
      const TableBox* t = c_.table(p->tables[i]);
      row_w += (i ? kGap : 0) + table_width(*t);
      row_h = std::max(row_h, table_height(*t));
    }
    int kids_w = 0, kids_h = 0;
    for (std::size_t i = 0; i < p->children.size(); ++i) {
      measure(p->children[i]);
      const Box& b = parts[p->children[i]];
      kids_w = std::max(kids_w, b.w);
      kids_h += (i ? kPad : 0) + b.h;
    }
    Box b;
    b.w = std::max(row_w, kids_w) + 2 * kPad;
    b.h = kPad + row_h + (row_h && kids_h ? kPad : 0) + kids_h + kPad;
    b.w = std::max(b.w, 2 * kPad + 20);
    b.h = std::max(b.h, 2 * kPad + 10);
    parts[id] = b;
  }

  void position(int id, int x, int y) {
    const Partition* p = c_.partition(id);
    Box& b = parts[id];
    b.x = x;
    b.y = y;
    int cx = x + kPad;
    int row_h = 0;
    for (int t : p->tables) {
      const TableBox* tb = c_.table(t);
      tables[t] = Box{cx, y + kPad, table_width(*tb), table_height(*tb)};
      cx += table_width(*tb) + kGap;
      row_h = std::max(row_h, table_height(*tb));
    }
    int cy = y + kPad + row_h + (row_h ? kPad : 0);
    for (int k : p->children) {
      position(k, x + kPad, cy);
      cy += parts[k].h + kPad;
    }
  }

  const Cell& c_;
};

struct Anchor {
  int x_left, x_right, y;
};

}  // namespace

std::string emit_svg(const Diagram& d) {
  std::string body;
  int x = 20;
  int height = 0;
  auto num = [](int v) { return std::to_string(v); };
  for (std::size_t ci = 0; ci < d.cells.size(); ++ci) {
    const Cell& c = d.cells[ci];
    Layout lay(c);
    lay.run(x, 20);
    const Box& root = lay.parts[c.root];
    body += "<g class=\"cell\" id=\"cell" + num(static_cast<int>(ci)) + "\">\n";
    for (const auto& p : c.partitions) {
      if (p.id == c.root) continue;
      const Box& b = lay.parts[p.id];
      body += "<rect class=\"negation\" x=\"" + num(b.x) + "\" y=\"" + num(b.y) + "\" width=\"" + num(b.w) +
              "\" height=\"" + num(b.h) +
              "\" rx=\"12\" ry=\"12\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"6,4\"/>\n";
    }
    auto anchor = [&](const RowRef& r) {
      const Box& b = lay.tables[r.table];
      int y = b.y + kHeader + r.row * kRow + kRow / 2;
      return Anchor{b.x, b.x + b.w, y};
    };
    for (const auto& t : c.tables) {
      const Box& b = lay.tables[t.id];
      body += "<rect class=\"table-header\" x=\"" + num(b.x) + "\" y=\"" + num(b.y) + "\" width=\"" + num(b.w) +
              "\" height=\"" + num(kHeader) + "\" fill=\"#333\"/>\n";
      body += "<text class=\"table-name\" x=\"" + num(b.x + 8) + "\" y=\"" + num(b.y + 15) +
              "\" fill=\"#fff\" font-family=\"monospace\" font-size=\"13\">" + esc(t.relation) + "</text>\n";
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        int ry = b.y + kHeader + static_cast<int>(i) * kRow;
        body += "<rect class=\"table-row\" x=\"" + num(b.x) + "\" y=\"" + num(ry) + "\" width=\"" + num(b.w) +
                "\" height=\"" + num(kRow) + "\" fill=\"#f2f2f2\" stroke=\"#999\"/>\n";
        body += "<text class=\"row-label\" x=\"" + num(b.x + 8) + "\" y=\"" + num(ry + 14) +
                "\" font-family=\"monospace\" font-size=\"12\">" + esc(row_label(t.rows[i])) + "</text>\n";
      }
    }
    for (const auto& e : c.edges) {
      RowRef from = e.from;
      RowRef to = e.to;
      CompOp op = e.op;
      Anchor a = anchor(from);
      Anchor b = anchor(to);
      if (e.directed && (a.x_left > b.x_left || (a.x_left == b.x_left && a.y > b.y))) {
        std::swap(from, to);
        std::swap(a, b);
        op = flip(op);
      }
      int x1, x2;
      if (from.table == to.table) {
        x1 = a.x_right;
        x2 = b.x_right;
      } else if (a.x_left <= b.x_left) {
        x1 = a.x_right;
        x2 = b.x_left;
      } else {
        x1 = a.x_left;
        x2 = b.x_right;
      }
      body += "<line class=\"edge\" x1=\"" + num(x1) + "\" y1=\"" + num(a.y) + "\" x2=\"" + num(x2) + "\" y2=\"" +
              num(b.y) + "\" stroke=\"#000\" stroke-width=\"1.5\"" +
              (e.directed ? " marker-end=\"url(#arrow)\"" : "") + "/>\n";
      if (op != CompOp::EQ)
        body += "<text class=\"edge-label\" x=\"" + num((x1 + x2) / 2) + "\" y=\"" + num((a.y + b.y) / 2 - 4) +
                "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">" + esc(op_text(op)) +
                "</text>\n";
    }
    int right = root.x + root.w;
    if (c.output) {
      int ow = static_cast<int>(c.output->name.size()) * kChar + 16;
      for (const auto& a : c.output->attrs) ow = std::max(ow, static_cast<int>(a.name.size()) * kChar + 16);
      ow = std::max(ow, 60);
      int ox = right + 40;
      int oy = root.y + kPad;
      body += "<rect class=\"output-header\" x=\"" + num(ox) + "\" y=\"" + num(oy) + "\" width=\"" + num(ow) +
              "\" height=\"" + num(kHeader) + "\" fill=\"#888\"/>\n";
      body += "<text class=\"output-name\" x=\"" + num(ox + 8) + "\" y=\"" + num(oy + 15) +
              "\" fill=\"#fff\" font-family=\"monospace\" font-size=\"13\">" + esc(c.output->name) + "</text>\n";
      for (std::size_t i = 0; i < c.output->attrs.size(); ++i) {
        const auto& a = c.output->attrs[i];
        int ry = oy + kHeader + static_cast<int>(i) * kRow;
        body += "<rect class=\"output-row\" x=\"" + num(ox) + "\" y=\"" + num(ry) + "\" width=\"" + num(ow) +
                "\" height=\"" + num(kRow) + "\" fill=\"#d9d9d9\" stroke=\"#999\"/>\n";
        body += "<text class=\"row-label\" x=\"" + num(ox + 8) + "\" y=\"" + num(ry + 14) +
                "\" font-family=\"monospace\" font-size=\"12\">" + esc(a.name) + "</text>\n";
        for (const auto& l : a.links) {
          if (!c.table(l.table)) continue;
          Anchor an = anchor(l);
          body += "<line class=\"output-link\" x1=\"" + num(an.x_right) + "\" y1=\"" + num(an.y) + "\" x2=\"" +
                  num(ox) + "\" y2=\"" + num(ry + kRow / 2) + "\" stroke=\"#888\" stroke-width=\"1.5\"/>\n";
        }
      }
      right = ox + ow;
      height = std::max(height, oy + kHeader + kRow * static_cast<int>(c.output->attrs.size()));
    }
    body += "</g>\n";
    height = std::max(height, root.y + root.h);
    x = right + 60;
  }
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(x - 40) + "\" height=\"" +
                    num(height + 20) + "\">\n";
  out +=
      "<defs><marker id=\"arrow\" markerWidth=\"10\" markerHeight=\"8\" refX=\"9\" refY=\"4\" "
      "orient=\"auto\"><path d=\"M0,0 L10,4 L0,8 z\" fill=\"#000\"/></marker></defs>\n";
  return out + body + "</svg>\n";
}

}  // namespace reldiag
