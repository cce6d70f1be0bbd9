#include "reldiag/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/translators.hpp"

namespace reldiag {

bool EvalResult::same_as(const EvalResult& other) const {
  if (sentence != other.sentence) return false;
  if (sentence) return truth == other.truth;
  return relation.tuples == other.relation.tuples;
}

std::string EvalResult::text() const {
  if (sentence) return truth ? "true" : "false";
  std::string out = "{";
  bool first = true;
  for (const auto& t : relation.tuples) {
    if (!first) out += ", ";
    first = false;
    out += tuple_text(t);
  }
  return out + "}";
}

namespace {

// ------------------------------------------------------------ calculus

struct Term {
  int slot = -1;  // -1 for constants; slot 0 is the output tuple
  int col = 0;
  Value constant;
};

struct Node {
  TrcFormula::Kind kind = TrcFormula::Kind::AND;
  Term lhs;
  Term rhs;
  CompOp op = CompOp::EQ;
  std::vector<int> slots;  // EXISTS
  std::vector<int> rels;   // EXISTS, parallel to slots
  std::vector<Node> items;
  std::vector<std::vector<int>> staged;  // EXISTS: items checked once `level` variables are bound
  std::vector<int> free;                 // sorted slots referenced and not bound here
};

struct State {
  std::vector<const Tuple*> slots;
  std::vector<const std::set<Tuple>*> rels;
};

const Value& value_of(const Term& t, const State& st) {
  return t.slot < 0 ? t.constant : (*st.slots[t.slot])[t.col];
}

bool eval_node(const Node& n, State& st);

bool exists_from(const Node& n, std::size_t level, State& st) {
  for (int idx : n.staged[level])
    if (!eval_node(n.items[idx], st)) return false;
  if (level == n.slots.size()) return true;
  for (const Tuple& t : *st.rels[n.rels[level]]) {
    st.slots[n.slots[level]] = &t;
    if (exists_from(n, level + 1, st)) return true;
  }
  return false;
}

bool eval_node(const Node& n, State& st) {
  using K = TrcFormula::Kind;
  switch (n.kind) {
    case K::ATOM: return compare(value_of(n.lhs, st), n.op, value_of(n.rhs, st));
    case K::AND:
      for (const auto& k : n.items)
        if (!eval_node(k, st)) return false;
      return true;
    case K::OR:
      for (const auto& k : n.items)
        if (eval_node(k, st)) return true;
      return false;
    case K::NOT: return !eval_node(n.items[0], st);
    case K::EXISTS: return exists_from(n, 0, st);
  }
  return false;
}

void merge_free(std::vector<int>& into, const std::vector<int>& more) {
  std::vector<int> out;
  std::set_union(into.begin(), into.end(), more.begin(), more.end(), std::back_inserter(out));
  into = std::move(out);
}

void atom_free(Node& n) {
  n.free.clear();
  if (n.lhs.slot >= 0) n.free.push_back(n.lhs.slot);
  if (n.rhs.slot >= 0 && n.rhs.slot != n.lhs.slot) n.free.push_back(n.rhs.slot);
  std::sort(n.free.begin(), n.free.end());
}

/// Recomputes free slots and the level at which each item can be checked.
void stage(Node& n) {
  n.free.clear();
  for (const auto& it : n.items) merge_free(n.free, it.free);
  n.staged.assign(n.slots.size() + 1, {});
  std::vector<std::pair<std::size_t, int>> order;  // (level, item) with atoms first per level
  for (std::size_t i = 0; i < n.items.size(); ++i) {
    std::size_t level = 0;
    for (std::size_t j = 0; j < n.slots.size(); ++j)
      if (std::binary_search(n.items[i].free.begin(), n.items[i].free.end(), n.slots[j]))
        level = j + 1;
    order.emplace_back(level, static_cast<int>(i));
  }
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& [level, i] : order)
      if ((n.items[i].kind == TrcFormula::Kind::ATOM) == (pass == 0)) n.staged[level].push_back(i);
  std::vector<int> bound = n.slots;
  std::sort(bound.begin(), bound.end());
  std::vector<int> out;
  std::set_difference(n.free.begin(), n.free.end(), bound.begin(), bound.end(),
                      std::back_inserter(out));
  n.free = std::move(out);
}

struct CompiledTrc {
  bool sentence = false;
  std::vector<std::string> out_attrs;
  std::vector<std::optional<AttrType>> out_types;
  std::vector<std::string> rel_names;
  std::size_t slot_count = 1;
  Node root;
  bool direct = false;       // output read off root bindings
  std::vector<Term> output;  // direct mode: one term per output attribute
  std::vector<Value> constants;
};

class TrcCompiler {
 public:
  TrcCompiler(const Schema& schema, CompiledTrc& out, const std::string& out_name)
      : schema_(schema), out_(out), out_name_(out_name) {}

  Node compile(const TrcFormula& f) {
    using K = TrcFormula::Kind;
    Node n;
    n.kind = f.kind;
    switch (f.kind) {
      case K::ATOM: {
        n.lhs = term(f.atom.lhs);
        n.op = f.atom.op;
        if (f.atom.is_join()) {
          n.rhs = term(f.atom.rhs_ref());
        } else {
          n.rhs.constant = f.atom.rhs_value();
          add_constant(n.rhs.constant);
        }
        if (n.rhs.slot == 0 && n.lhs.slot != 0) {
          std::swap(n.lhs, n.rhs);
          n.op = flip(n.op);
        }
        if (n.lhs.slot == 0 && n.rhs.slot > 0 && n.op == CompOp::EQ)
          out_.out_types[n.lhs.col] = slot_types_[n.rhs.slot][n.rhs.col];
        atom_free(n);
        return n;
      }
      case K::AND:
      case K::OR:
        for (const auto& k : f.kids) {
          n.items.push_back(compile(k));
          merge_free(n.free, n.items.back().free);
        }
        return n;
      case K::NOT:
        n.items.push_back(compile(f.kids[0]));
        n.free = n.items[0].free;
        return n;
      case K::EXISTS: {
        std::size_t env_before = env_.size();
        for (const auto& v : f.vars) {
          const RelationSchema& rel = schema_.at(v.relation);
          int slot = static_cast<int>(out_.slot_count++);
          slot_rel_.push_back(&rel);
          slot_types_.push_back(rel.types);
          env_.emplace_back(v.name, slot);
          n.slots.push_back(slot);
          n.rels.push_back(rel_index(v.relation));
        }
        flatten(f.kids[0], n.items);
        env_.resize(env_before);
        stage(n);
        return n;
      }
    }
    return n;
  }

 private:
  void flatten(const TrcFormula& f, std::vector<Node>& items) {
    if (f.kind == TrcFormula::Kind::AND) {
      for (const auto& k : f.kids) flatten(k, items);
      return;
    }
    items.push_back(compile(f));
  }

  int rel_index(const std::string& name) {
    auto it = std::find(out_.rel_names.begin(), out_.rel_names.end(), name);
    if (it != out_.rel_names.end()) return static_cast<int>(it - out_.rel_names.begin());
    out_.rel_names.push_back(name);
    return static_cast<int>(out_.rel_names.size() - 1);
  }

  void add_constant(const Value& v) {
    if (std::find(out_.constants.begin(), out_.constants.end(), v) == out_.constants.end())
      out_.constants.push_back(v);
  }

  Term term(const AttrRef& r) {
    Term t;
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first != r.var) continue;
      const RelationSchema* rel = slot_rel_[it->second];
      int col = rel->index_of(r.attr);
      if (col < 0) throw AttributeFault("relation " + rel->name + " has no attribute " + r.attr);
      t.slot = it->second;
      t.col = col;
      return t;
    }
    if (!out_.sentence && r.var == out_name_) {
      auto at = std::find(out_.out_attrs.begin(), out_.out_attrs.end(), r.attr);
      if (at == out_.out_attrs.end())
        throw AttributeFault("output " + out_name_ + " has no attribute " + r.attr);
      t.slot = 0;
      t.col = static_cast<int>(at - out_.out_attrs.begin());
      return t;
    }
    throw ScopeError(r.var);
  }

  const Schema& schema_;
  CompiledTrc& out_;
  std::string out_name_;
  std::vector<std::pair<std::string, int>> env_;
  std::vector<const RelationSchema*> slot_rel_{nullptr};
  std::vector<std::vector<AttrType>> slot_types_{{}};
};

/// Moves root output bindings out of the predicate list when every output
/// attribute is bound at the root and referenced nowhere else.
void try_direct(CompiledTrc& c) {
  Node& root = c.root;
  if (root.kind != TrcFormula::Kind::EXISTS) return;
  std::vector<std::optional<Term>> first(c.out_attrs.size());
  std::vector<Node> kept;
  for (const auto& it : root.items) {
    bool binding = it.kind == TrcFormula::Kind::ATOM && it.lhs.slot == 0 && it.op == CompOp::EQ &&
                   it.rhs.slot != 0;
    if (!binding) {
      if (std::binary_search(it.free.begin(), it.free.end(), 0)) return;
      kept.push_back(it);
      continue;
    }
    auto& f = first[it.lhs.col];
    if (!f) {
      f = it.rhs;
      continue;
    }
    Node eq;
    eq.kind = TrcFormula::Kind::ATOM;
    eq.lhs = *f;
    eq.rhs = it.rhs;
    atom_free(eq);
    kept.push_back(std::move(eq));
  }
  for (const auto& f : first)
    if (!f) return;
  root.items = std::move(kept);
  stage(root);
  c.direct = true;
  for (const auto& f : first) c.output.push_back(*f);
}

CompiledTrc compile_trc(const TrcFormulaQuery& q, const Schema& schema) {
  CompiledTrc c;
  c.sentence = q.kind == QueryKind::SENTENCE;
  if (!c.sentence) c.out_attrs = q.out_attrs;
  c.out_types.resize(c.out_attrs.size());
  TrcCompiler comp(schema, c, q.out_name);
  c.root = comp.compile(q.body);
  if (!c.sentence) try_direct(c);
  return c;
}

void collect_rows(const CompiledTrc& c, const Node& n, std::size_t level, State& st,
                  std::set<Tuple>& out) {
  for (int idx : n.staged[level])
    if (!eval_node(n.items[idx], st)) return;
  if (level == n.slots.size()) {
    Tuple t;
    t.reserve(c.output.size());
    for (const auto& term : c.output) t.push_back(value_of(term, st));
    out.insert(std::move(t));
    return;
  }
  for (const Tuple& t : *st.rels[n.rels[level]]) {
    st.slots[n.slots[level]] = &t;
    collect_rows(c, n, level + 1, st, out);
  }
}

bool same_type(const Value& v, AttrType t) {
  return t == AttrType::INT ? is_int(v) : is_string(v);
}

EvalResult run_trc(const CompiledTrc& c, const Database& db) {
  State st;
  st.slots.assign(c.slot_count, nullptr);
  for (const auto& name : c.rel_names) st.rels.push_back(&db.rows(name));
  EvalResult r;
  r.sentence = c.sentence;
  if (c.sentence) {
    r.truth = eval_node(c.root, st);
    return r;
  }
  r.relation.attrs = c.out_attrs;
  if (c.direct) {
    collect_rows(c, c.root, 0, st, r.relation.tuples);
    return r;
  }
  // Output bound inside a disjunction or a nested scope: test every
  // candidate tuple over the active domain.
  std::set<Value> active(c.constants.begin(), c.constants.end());
  for (const auto& [name, rows] : db.relations)
    for (const auto& t : rows) active.insert(t.begin(), t.end());
  std::vector<std::vector<Value>> cand(c.out_attrs.size());
  for (std::size_t i = 0; i < cand.size(); ++i)
    for (const auto& v : active)
      if (!c.out_types[i] || same_type(v, *c.out_types[i])) cand[i].push_back(v);
  Tuple t(cand.size());
  std::vector<std::size_t> pos(cand.size(), 0);
  for (const auto& cv : cand)
    if (cv.empty()) return r;
  st.slots[0] = &t;
  while (true) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = cand[i][pos[i]];
    if (eval_node(c.root, st)) r.relation.tuples.insert(t);
    std::size_t i = pos.size();
    while (i > 0) {
      --i;
      if (++pos[i] < cand[i].size()) break;
      pos[i] = 0;
      if (i == 0) return r;
    }
    if (pos.empty()) return r;
  }
}

EvalResult run_cells(const std::vector<CompiledTrc>& cells, const Database& db) {
  EvalResult out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EvalResult r = run_trc(cells[i], db);
    if (i == 0) {
      out = std::move(r);
      continue;
    }
    out.truth = out.truth || r.truth;
    out.relation.tuples.insert(r.relation.tuples.begin(), r.relation.tuples.end());
  }
  return out;
}

// ------------------------------------------------------------- Datalog

struct RuleRunner {
  const DlRule& rule;
  const Database& db;
  const std::map<std::string, std::set<Tuple>>& idb;
  std::map<std::string, int> index;
  std::vector<const DlLiteral*> positives;
  std::vector<std::optional<Value>> env;
  std::set<Tuple> out;

  RuleRunner(const DlRule& r, const Database& d, const std::map<std::string, std::set<Tuple>>& i)
      : rule(r), db(d), idb(i) {
    auto note = [&](const std::string& v) { index.emplace(v, static_cast<int>(index.size())); };
    for (const auto& a : rule.head.args) note(a);
    for (const auto& l : rule.body) {
      if (l.kind == DlLiteral::Kind::BUILTIN) {
        note(l.builtin.lhs);
        if (l.builtin.rhs_is_var()) note(std::get<std::string>(l.builtin.rhs));
      } else {
        for (const auto& a : l.atom.args) note(a);
      }
      if (l.kind == DlLiteral::Kind::POS) positives.push_back(&l);
    }
    env.resize(index.size());
  }

  const std::set<Tuple>& rows(const DlAtom& a) const {
    auto it = idb.find(a.pred);
    const std::set<Tuple>& rs = it != idb.end() ? it->second : db.rows(a.pred);
    if (it == idb.end()) {
      const RelationSchema& rel = db.schema.at(a.pred);
      if (rel.arity() != a.args.size())
        throw SchemaError("atom " + a.pred + " has arity " + std::to_string(a.args.size()) +
                          ", relation has " + std::to_string(rel.arity()));
    }
    return rs;
  }

  void run(std::size_t i) {
    if (i == positives.size()) {
      finish();
      return;
    }
    const DlAtom& a = positives[i]->atom;
    for (const Tuple& t : rows(a)) {
      std::vector<int> bound_here;
      bool ok = true;
      for (std::size_t j = 0; j < a.args.size() && ok; ++j) {
        int v = index.at(a.args[j]);
        if (env[v]) {
          ok = *env[v] == t[j];
        } else {
          env[v] = t[j];
          bound_here.push_back(v);
        }
      }
      if (ok) run(i + 1);
      for (int v : bound_here) env[v].reset();
    }
  }

  bool negated_match(const DlAtom& a, std::vector<std::optional<Value>>& e) const {
    for (const Tuple& t : rows(a)) {
      std::vector<int> bound_here;
      bool ok = true;
      for (std::size_t j = 0; j < a.args.size() && ok; ++j) {
        int v = index.at(a.args[j]);
        if (e[v]) {
          ok = *e[v] == t[j];
        } else {
          e[v] = t[j];
          bound_here.push_back(v);
        }
      }
      for (int v : bound_here) e[v].reset();
      if (ok) return true;
    }
    return false;
  }

  void finish() {
    auto e = env;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& l : rule.body) {
        if (l.kind != DlLiteral::Kind::BUILTIN || l.builtin.op != CompOp::EQ) continue;
        int lv = index.at(l.builtin.lhs);
        if (l.builtin.rhs_is_var()) {
          int rv = index.at(std::get<std::string>(l.builtin.rhs));
          if (e[lv] && !e[rv]) {
            e[rv] = e[lv];
            changed = true;
          } else if (!e[lv] && e[rv]) {
            e[lv] = e[rv];
            changed = true;
          }
        } else if (!e[lv]) {
          e[lv] = std::get<Value>(l.builtin.rhs);
          changed = true;
        }
      }
    }
    for (const auto& l : rule.body) {
      if (l.kind != DlLiteral::Kind::BUILTIN) continue;
      const auto& lv = e[index.at(l.builtin.lhs)];
      if (!lv) throw SafetyFault("variable " + l.builtin.lhs + " is not bound by a positive atom");
      Value rv;
      if (l.builtin.rhs_is_var()) {
        const auto& name = std::get<std::string>(l.builtin.rhs);
        const auto& b = e[index.at(name)];
        if (!b) throw SafetyFault("variable " + name + " is not bound by a positive atom");
        rv = *b;
      } else {
        rv = std::get<Value>(l.builtin.rhs);
      }
      if (!compare(*lv, l.builtin.op, rv)) return;
    }
    for (const auto& l : rule.body)
      if (l.kind == DlLiteral::Kind::NEG && negated_match(l.atom, e)) return;
    Tuple t;
    for (const auto& a : rule.head.args) {
      const auto& v = e[index.at(a)];
      if (!v) throw SafetyFault("head variable " + a + " is not bound by a positive atom");
      t.push_back(*v);
    }
    out.insert(std::move(t));
  }
};

void datalog_order(const DatalogProgram& p, const std::string& pred, std::vector<std::string>& done,
                   std::vector<std::string>& active) {
  const DlRule* r = rule_for(p, pred);
  if (!r || std::find(done.begin(), done.end(), pred) != done.end()) return;
  if (std::find(active.begin(), active.end(), pred) != active.end())
    throw RecursionFault("predicate " + pred + " depends on itself");
  active.push_back(pred);
  for (const auto& l : r->body)
    if (l.kind != DlLiteral::Kind::BUILTIN) datalog_order(p, l.atom.pred, done, active);
  active.pop_back();
  done.push_back(pred);
}

// ------------------------------------------------------------ algebra

struct RaCondPlan {
  std::size_t lhs = 0;
  CompOp op = CompOp::EQ;
  bool rhs_attr = false;
  std::size_t rhs = 0;
  Value value;
};

struct RaPlan {
  RaExpr::Kind kind = RaExpr::Kind::REL;
  std::string relation;
  std::vector<std::string> names;
  std::vector<std::size_t> project;
  std::vector<RaCondPlan> conds;
  std::vector<std::pair<std::size_t, std::size_t>> natural;
  std::vector<std::size_t> keep_right;
  std::vector<RaPlan> kids;
};

std::vector<RaCondPlan> plan_conds(const std::vector<RaCond>& conds, const std::vector<RaAttr>& in) {
  std::vector<RaCondPlan> out;
  for (const auto& c : conds) {
    RaCondPlan p;
    p.lhs = resolve_ra_ref(in, c.lhs);
    p.op = c.op;
    if (auto* r = std::get_if<RaRef>(&c.rhs)) {
      p.rhs_attr = true;
      p.rhs = resolve_ra_ref(in, *r);
    } else {
      p.value = std::get<Value>(c.rhs);
    }
    out.push_back(std::move(p));
  }
  return out;
}

RaPlan plan_ra(const RaExpr& e, const Schema& schema) {
  using K = RaExpr::Kind;
  RaPlan p;
  p.kind = e.kind;
  p.relation = e.relation;
  for (const auto& a : ra_attributes(e, schema)) p.names.push_back(a.name);
  for (const auto& k : e.kids) p.kids.push_back(plan_ra(k, schema));
  switch (e.kind) {
    case K::PROJECT: {
      auto in = ra_attributes(e.kids[0], schema);
      for (const auto& r : e.attrs) p.project.push_back(resolve_ra_ref(in, r));
      break;
    }
    case K::SELECT: p.conds = plan_conds(e.conds, ra_attributes(e.kids[0], schema)); break;
    case K::JOIN: {
      auto a = ra_attributes(e.kids[0], schema);
      auto b = ra_attributes(e.kids[1], schema);
      if (!e.conds.empty()) {
        auto all = a;
        all.insert(all.end(), b.begin(), b.end());
        p.conds = plan_conds(e.conds, all);
        break;
      }
      for (std::size_t j = 0; j < b.size(); ++j) {
        bool hit = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (a[i].name == b[j].name) {
            p.natural.emplace_back(i, j);
            hit = true;
          }
        }
        if (!hit) p.keep_right.push_back(j);
      }
      break;
    }
    default: break;
  }
  return p;
}

bool conds_hold(const std::vector<RaCondPlan>& conds, const Tuple& t) {
  for (const auto& c : conds)
    if (!compare(t[c.lhs], c.op, c.rhs_attr ? t[c.rhs] : c.value)) return false;
  return true;
}

std::set<Tuple> run_ra(const RaPlan& p, const Database& db) {
  using K = RaExpr::Kind;
  switch (p.kind) {
    case K::REL: return db.rows(p.relation);
    case K::RENAME: return run_ra(p.kids[0], db);
    case K::PROJECT: {
      std::set<Tuple> out;
      for (const auto& t : run_ra(p.kids[0], db)) {
        Tuple u;
        for (auto i : p.project) u.push_back(t[i]);
        out.insert(std::move(u));
      }
      return out;
    }
    case K::SELECT: {
      std::set<Tuple> out;
      for (const auto& t : run_ra(p.kids[0], db))
        if (conds_hold(p.conds, t)) out.insert(t);
      return out;
    }
    case K::PRODUCT:
    case K::JOIN: {
      auto a = run_ra(p.kids[0], db);
      auto b = run_ra(p.kids[1], db);
      std::set<Tuple> out;
      bool natural = p.kind == K::JOIN && p.conds.empty();
      for (const auto& x : a) {
        for (const auto& y : b) {
          Tuple u = x;
          if (natural) {
            bool ok = std::all_of(p.natural.begin(), p.natural.end(),
                                  [&](const auto& pr) { return x[pr.first] == y[pr.second]; });
            if (!ok) continue;
            for (auto j : p.keep_right) u.push_back(y[j]);
          } else {
            u.insert(u.end(), y.begin(), y.end());
            if (!conds_hold(p.conds, u)) continue;
          }
          out.insert(std::move(u));
        }
      }
      return out;
    }
    case K::MINUS: {
      auto a = run_ra(p.kids[0], db);
      for (const auto& t : run_ra(p.kids[1], db)) a.erase(t);
      return a;
    }
    case K::UNION: {
      auto a = run_ra(p.kids[0], db);
      auto b = run_ra(p.kids[1], db);
      a.insert(b.begin(), b.end());
      return a;
    }
  }
  return {};
}

std::vector<CompiledTrc> compile_union(const UnionQuery& u, const Schema& schema) {
  if (u.cells.empty()) throw TranslationError("a union needs at least one cell");
  std::vector<CompiledTrc> out;
  for (const auto& c : u.cells) out.push_back(compile_trc(to_formula(c), schema));
  for (const auto& c : out)
    if (c.sentence != out[0].sentence || c.out_attrs.size() != out[0].out_attrs.size())
      throw SchemaError("union cells disagree on their output signature");
  return out;
}

}  // namespace

// ------------------------------------------------------------ prepared

struct PreparedQuery::Impl {
  enum class Mode { CALCULUS, DATALOG, ALGEBRA };
  Mode mode = Mode::CALCULUS;
  std::vector<CompiledTrc> cells;
  DatalogProgram program;
  RaPlan plan;
  bool sentence = false;
  std::size_t arity = 0;
};

PreparedQuery::PreparedQuery(const AnyQuery& q, const Schema& schema)
    : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TrcQuery>) {
          m.cells.push_back(compile_trc(to_formula(x), schema));
        } else if constexpr (std::is_same_v<T, TrcFormulaQuery>) {
          m.cells.push_back(compile_trc(x, schema));
        } else if constexpr (std::is_same_v<T, UnionQuery>) {
          m.cells = compile_union(x, schema);
        } else if constexpr (std::is_same_v<T, SqlQuery>) {
          m.cells.push_back(compile_trc(sql_to_trc_formula(x, &schema), schema));
        } else if constexpr (std::is_same_v<T, Diagram>) {
          m.cells = compile_union(diagram_to_trc(x), schema);
        } else if constexpr (std::is_same_v<T, DatalogProgram>) {
          m.mode = Impl::Mode::DATALOG;
          m.program = x;
          const DlRule* r = rule_for(x, x.answer);
          if (!r) throw SchemaError("answer predicate " + x.answer + " has no rule");
          m.arity = r->head.args.size();
          m.sentence = m.arity == 0;
        } else {
          m.mode = Impl::Mode::ALGEBRA;
          m.plan = plan_ra(x, schema);
          m.arity = m.plan.names.size();
        }
      },
      q);
  if (m.mode == Impl::Mode::CALCULUS) {
    m.sentence = m.cells[0].sentence;
    m.arity = m.cells[0].out_attrs.size();
  }
}

PreparedQuery::~PreparedQuery() = default;
PreparedQuery::PreparedQuery(PreparedQuery&&) noexcept = default;
PreparedQuery& PreparedQuery::operator=(PreparedQuery&&) noexcept = default;

bool PreparedQuery::is_sentence() const { return impl_->sentence; }
std::size_t PreparedQuery::arity() const { return impl_->arity; }

EvalResult PreparedQuery::run(const Database& db) const {
  const Impl& m = *impl_;
  switch (m.mode) {
    case Impl::Mode::CALCULUS: return run_cells(m.cells, db);
    case Impl::Mode::DATALOG: {
      std::vector<std::string> order;
      std::vector<std::string> active;
      datalog_order(m.program, m.program.answer, order, active);
      std::map<std::string, std::set<Tuple>> idb;
      for (const auto& pred : order) {
        const DlRule& r = *rule_for(m.program, pred);
        RuleRunner runner(r, db, idb);
        runner.run(0);
        idb[pred] = std::move(runner.out);
      }
      EvalResult res;
      res.sentence = m.sentence;
      auto& rows = idb[m.program.answer];
      res.truth = !rows.empty();
      if (!m.sentence) {
        res.relation.attrs = rule_for(m.program, m.program.answer)->head.args;
        res.relation.tuples = std::move(rows);
      }
      return res;
    }
    case Impl::Mode::ALGEBRA: {
      EvalResult res;
      res.relation.attrs = m.plan.names;
      res.relation.tuples = run_ra(m.plan, db);
      return res;
    }
  }
  return {};
}

EvalResult evaluate(const AnyQuery& q, const Database& db) { return PreparedQuery(q, db.schema).run(db); }
EvalResult eval_trc(const TrcQuery& q, const Database& db) { return evaluate(q, db); }
EvalResult eval_trc(const TrcFormulaQuery& q, const Database& db) { return evaluate(q, db); }
EvalResult eval_union(const UnionQuery& q, const Database& db) { return evaluate(q, db); }
EvalResult eval_datalog(const DatalogProgram& p, const Database& db) { return evaluate(p, db); }
EvalResult eval_ra(const RaExpr& e, const Database& db) { return evaluate(e, db); }
EvalResult eval_sql(const SqlQuery& q, const Database& db) { return evaluate(q, db); }
EvalResult eval_diagram(const Diagram& d, const Database& db) { return evaluate(d, db); }

// -------------------------------------------------------------- oracle

TypedDomain oracle_domain(const std::vector<Value>& constants, const OracleOptions& opts) {
  if (opts.k <= 0) throw CapacityFault("the oracle domain size must be positive");
  std::set<std::int64_t> ints;
  std::set<std::string> strings;
  for (int i = 0; i < opts.k; ++i) ints.insert(i);
  bool outside = false;
  auto take = [&](const Value& v) {
    if (is_int(v)) {
      auto x = std::get<std::int64_t>(v);
      outside = outside || x < 0 || x >= opts.k;
      ints.insert(x);
    } else {
      strings.insert(std::get<std::string>(v));
    }
  };
  for (const auto& v : constants) take(v);
  for (const auto& v : opts.extra) take(v);
  if (outside) ints.insert(*ints.rbegin() + 1);
  for (int i = 0, made = 0; made < opts.k; ++i) {
    std::string s = "v" + std::to_string(i);
    if (strings.insert(s).second) ++made;
  }
  TypedDomain d;
  for (auto x : ints) d.ints.emplace_back(x);
  for (const auto& s : strings) d.strings.emplace_back(s);
  return d;
}

std::string bound_text(const TypedDomain& domain, const OracleOptions& opts) {
  auto list = [](const std::vector<Value>& vs) {
    std::string out = "{";
    for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? ", " : "") + value_text(vs[i]);
    return out + "}";
  };
  std::string out = "k=" + std::to_string(opts.k) + ", rows<=" + std::to_string(opts.max_rows) +
                    ", int domain " + list(domain.ints);
  return out + ", text domain " + list(domain.strings);
}

namespace {

std::optional<Counterexample> differ(std::uint64_t index, const Database& db, const PreparedQuery& a,
                                     const PreparedQuery& b) {
  EvalResult ra = a.run(db);
  EvalResult rb = b.run(db);
  if (ra.same_as(rb)) return std::nullopt;
  Counterexample c;
  c.index = index;
  c.db = db;
  if (!ra.sentence) {
    std::vector<Tuple> only_a;
    std::vector<Tuple> only_b;
    std::set_difference(ra.relation.tuples.begin(), ra.relation.tuples.end(),
                        rb.relation.tuples.begin(), rb.relation.tuples.end(),
                        std::back_inserter(only_a));
    std::set_difference(rb.relation.tuples.begin(), rb.relation.tuples.end(),
                        ra.relation.tuples.begin(), ra.relation.tuples.end(),
                        std::back_inserter(only_b));
    if (!only_a.empty() && (only_b.empty() || only_a[0] < only_b[0])) {
      c.tuple = only_a[0];
      c.only_in = 1;
    } else {
      c.tuple = only_b[0];
      c.only_in = 2;
    }
  }
  c.first = std::move(ra);
  c.second = std::move(rb);
  return c;
}

}  // namespace

EquivVerdict equiv_check(const PreparedQuery& q1, const PreparedQuery& q2, const Schema& schema,
                         const TypedDomain& domain, const OracleOptions& opts) {
  if (q1.is_sentence() != q2.is_sentence())
    throw SchemaError("a sentence cannot be compared with a query that returns tuples");
  if (q1.arity() != q2.arity())
    throw SchemaError("output arities differ: " + std::to_string(q1.arity()) + " vs " +
                      std::to_string(q2.arity()));
  EquivVerdict v;
  v.bound = bound_text(domain, opts);
  std::uint64_t total = database_count(schema, domain, opts.max_rows);
  if (total > opts.ceiling)
    throw CapacityFault("the bound yields " + std::to_string(total) +
                        " databases, above the ceiling of " + std::to_string(opts.ceiling));
  unsigned workers = std::max(1u, opts.workers);
  if (workers == 1 || total < 2 * workers) {
    std::uint64_t index = 0;
    enumerate_databases(
        schema, domain, opts.max_rows,
        [&](const Database& db) {
          v.counterexample = differ(index++, db, q1, q2);
          return !v.counterexample;
        },
        opts.ceiling);
    v.databases = index;
  } else {
    std::atomic<std::uint64_t> best{total};
    std::mutex lock;
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::uint64_t begin = w * chunk;
      std::uint64_t end = std::min(total, begin + chunk);
      pool.emplace_back([&, begin, end] {
        try {
          enumerate_databases_range(
              schema, domain, opts.max_rows, begin, end,
              [&](std::uint64_t index, const Database& db) {
                if (index >= best.load()) return false;
                auto c = differ(index, db, q1, q2);
                if (!c) return true;
                std::lock_guard<std::mutex> g(lock);
                if (index < best.load()) {
                  best = index;
                  v.counterexample = std::move(c);
                }
                return false;
              },
              opts.ceiling);
        } catch (...) {
          std::lock_guard<std::mutex> g(lock);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    v.databases = v.counterexample ? v.counterexample->index + 1 : total;
  }
  v.equivalent = !v.counterexample;
  return v;
}

EquivVerdict equiv_check(const AnyQuery& q1, const AnyQuery& q2, const Schema& schema,
                         const OracleOptions& opts) {
  std::vector<Value> constants = query_constants(q1);
  for (const auto& c : query_constants(q2))
    if (std::find(constants.begin(), constants.end(), c) == constants.end()) constants.push_back(c);
  TypedDomain domain = oracle_domain(constants, opts);
  PreparedQuery a(q1, schema);
  PreparedQuery b(q2, schema);
  return equiv_check(a, b, schema, domain, opts);
}

}  // namespace reldiag
