#include <algorithm>
#include <map>
#include <numeric>

#include "internal.hpp"
#include "lexer.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"
#include "reldiag/translators.hpp"

namespace reldiag {

namespace {

DlLiteral pos_lit(DlAtom a) {
  DlLiteral l;
  l.kind = DlLiteral::Kind::POS;
  l.atom = std::move(a);
  return l;
}

DlLiteral neg_lit(DlAtom a) {
  DlLiteral l = pos_lit(std::move(a));
  l.kind = DlLiteral::Kind::NEG;
  return l;
}

DlLiteral builtin_lit(std::string lhs, CompOp op, std::variant<std::string, Value> rhs) {
  DlLiteral l;
  l.kind = DlLiteral::Kind::BUILTIN;
  l.builtin = DlBuiltin{std::move(lhs), op, std::move(rhs)};
  return l;
}

bool declares(const TrcScope& s, const std::string& var) {
  return std::any_of(s.vars.begin(), s.vars.end(), [&](const TrcVar& v) { return v.name == var; });
}

/// References in the subtree of `s` to variables declared outside it, in
/// first-occurrence order.
void outer_refs(const TrcScope& s, std::vector<std::string>& bound, std::vector<AttrRef>& out) {
  std::size_t before = bound.size();
  for (const auto& v : s.vars) bound.push_back(v.name);
  auto note = [&](const AttrRef& r) {
    if (std::find(bound.begin(), bound.end(), r.var) != bound.end()) return;
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  };
  for (const auto& p : s.preds) {
    note(p.lhs);
    if (p.is_join()) note(p.rhs_ref());
  }
  for (const auto& c : s.negations) outer_refs(c, bound, out);
  bound.resize(before);
}

std::vector<AttrRef> outer_refs(const TrcScope& s) {
  std::vector<std::string> bound;
  std::vector<AttrRef> out;
  outer_refs(s, bound, out);
  return out;
}

void substitute(TrcScope& s, const AttrRef& from, const AttrRef& to, std::size_t skip_from = 0,
                std::size_t skip_to = 0) {
  for (std::size_t i = 0; i < s.preds.size(); ++i) {
    if (i >= skip_from && i < skip_to) continue;
    auto& p = s.preds[i];
    if (p.lhs == from) p.lhs = to;
    if (p.is_join() && p.rhs_ref() == from) p.rhs = to;
  }
  for (auto& c : s.negations) substitute(c, from, to);
}

// ------------------------------------------------------------ guard repair

class GuardRepair {
 public:
  explicit GuardRepair(const TrcQuery& q) { detail::collect_var_names(q.root, used_); }

  void scope(TrcScope& s, std::vector<TrcVar>& outer) {
    std::size_t before = outer.size();
    outer.insert(outer.end(), s.vars.begin(), s.vars.end());
    for (auto& c : s.negations) {
      repair(c, outer);
      scope(c, outer);
    }
    outer.resize(before);
  }

 private:
  void repair(TrcScope& d, const std::vector<TrcVar>& outer) {
    auto needed = outer_refs(d);
    std::vector<AttrRef> uncovered;
    for (const auto& o : needed) {
      bool covered = std::any_of(d.preds.begin(), d.preds.end(), [&](const TrcPred& p) {
        if (p.op != CompOp::EQ || !p.is_join()) return false;
        return (p.rhs_ref() == o && declares(d, p.lhs.var)) || (p.lhs == o && declares(d, p.rhs_ref().var));
      });
      if (!covered) uncovered.push_back(o);
    }
    std::vector<std::string> done;
    for (const auto& o : uncovered) {
      if (std::find(done.begin(), done.end(), o.var) != done.end()) continue;
      done.push_back(o.var);
      auto v = std::find_if(outer.rbegin(), outer.rend(), [&](const TrcVar& t) { return t.name == o.var; });
      if (v == outer.rend()) throw ScopeError(o.var);
      std::string g = fresh_name(detail::to_lower(v->relation), used_);
      used_.push_back(g);
      d.vars.push_back(TrcVar{g, v->relation});
      std::size_t first = d.preds.size();
      for (const auto& u : uncovered) {
        if (u.var != o.var) continue;
        TrcPred p;
        p.lhs = AttrRef{g, u.attr};
        p.op = CompOp::EQ;
        p.rhs = u;
        d.preds.push_back(std::move(p));
      }
      std::size_t last = d.preds.size();
      for (const auto& u : uncovered)
        if (u.var == o.var) substitute(d, u, AttrRef{g, u.attr}, first, last);
    }
  }

  std::vector<std::string> used_;
};

// -------------------------------------------------------------- emission

struct UnionFind {
  std::vector<AttrRef> keys;
  std::vector<int> parent;

  int id(const AttrRef& r) {
    auto it = std::find(keys.begin(), keys.end(), r);
    if (it != keys.end()) return find(static_cast<int>(it - keys.begin()));
    keys.push_back(r);
    parent.push_back(static_cast<int>(parent.size()));
    return static_cast<int>(parent.size() - 1);
  }
  bool has(const AttrRef& r) const { return std::find(keys.begin(), keys.end(), r) != keys.end(); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

class TrcToDatalog {
 public:
  TrcToDatalog(const TrcQuery& q, const Schema& schema) : q_(q), schema_(schema) {}

  DatalogProgram run() {
    emit(q_.root, true, {});
    prog_.answer = "Q";
    return prog_;
  }

 private:
  bool inlinable(const TrcScope& d) const {
    if (d.vars.size() != 1 || !d.negations.empty()) return false;
    std::vector<std::string> seen;
    for (const auto& p : d.preds) {
      if (p.op != CompOp::EQ || !p.is_join()) return false;
      const AttrRef& l = p.lhs;
      const AttrRef& r = p.rhs_ref();
      bool l_local = l.var == d.vars[0].name;
      bool r_local = r.var == d.vars[0].name;
      if (l_local == r_local) return false;
      const std::string& attr = l_local ? l.attr : r.attr;
      if (std::find(seen.begin(), seen.end(), attr) != seen.end()) return false;
      seen.push_back(attr);
    }
    return true;
  }

  std::string anon() { return "_" + std::to_string(++anon_); }

  /// Emits the rule for `s` (after its children's rules).
  void emit(const TrcScope& s, bool root, const std::vector<AttrRef>& params) {
    UnionFind uf;
    std::map<int, std::string> names;
    int next = 0;
    auto var_of = [&](const AttrRef& r) {
      int c = uf.id(r);
      auto it = names.find(c);
      if (it != names.end()) return it->second;
      std::string n = "v" + std::to_string(++next);
      names[c] = n;
      return n;
    };
    std::vector<const TrcPred*> bindings;
    std::vector<const TrcPred*> rest;
    for (const auto& p : s.preds) {
      if (root && q_.kind == QueryKind::QUERY && p.lhs.var == q_.out_name) {
        bindings.push_back(&p);
        if (p.is_join()) uf.id(p.rhs_ref());
        continue;
      }
      rest.push_back(&p);
      uf.id(p.lhs);
      if (p.is_join()) {
        uf.id(p.rhs_ref());
        if (p.op == CompOp::EQ) uf.unite(uf.id(p.lhs), uf.id(p.rhs_ref()));
      }
    }
    for (const auto& p : params) uf.id(p);
    struct Child {
      bool inline_atom;
      std::string pred;
      std::vector<AttrRef> args;  // inline: per attribute, empty var for unbound
    };
    std::vector<Child> kids;
    for (const auto& d : s.negations) {
      Child k;
      k.inline_atom = inlinable(d);
      if (k.inline_atom) {
        const auto& rel = schema_.at(d.vars[0].relation);
        k.pred = rel.name;
        k.args.resize(rel.arity());
        for (const auto& p : d.preds) {
          bool l_local = p.lhs.var == d.vars[0].name;
          const AttrRef& local = l_local ? p.lhs : p.rhs_ref();
          const AttrRef& outer = l_local ? p.rhs_ref() : p.lhs;
          int col = rel.index_of(local.attr);
          if (col < 0) throw AttributeFault("relation " + rel.name + " has no attribute " + local.attr);
          k.args[col] = outer;
          uf.id(outer);
        }
      } else {
        k.args = outer_refs(d);
        for (const auto& a : k.args) uf.id(a);
        emit(d, false, k.args);
        k.pred = last_idb_;
      }
      kids.push_back(std::move(k));
    }

    DlRule rule;
    for (const auto& v : s.vars) {
      const auto& rel = schema_.at(v.relation);
      DlAtom a{rel.name, {}};
      for (const auto& attr : rel.attrs) {
        AttrRef r{v.name, attr};
        a.args.push_back(uf.has(r) ? var_of(r) : anon());
      }
      rule.body.push_back(pos_lit(std::move(a)));
    }
    for (const TrcPred* p : rest) {
      if (p->is_join()) {
        if (p->op == CompOp::EQ) continue;
        rule.body.push_back(builtin_lit(var_of(p->lhs), p->op, var_of(p->rhs_ref())));
      } else {
        rule.body.push_back(builtin_lit(var_of(p->lhs), p->op, p->rhs_value()));
      }
    }
    for (const auto& k : kids) {
      DlAtom a{k.pred, {}};
      for (const auto& r : k.args) a.args.push_back(r.var.empty() ? anon() : var_of(r));
      rule.body.push_back(neg_lit(std::move(a)));
    }
    std::vector<std::string> head;
    auto add_head = [&](const std::string& v) {
      if (std::find(head.begin(), head.end(), v) == head.end()) {
        head.push_back(v);
        return;
      }
      std::string fresh = "v" + std::to_string(++next);
      rule.body.push_back(builtin_lit(fresh, CompOp::EQ, v));
      head.push_back(fresh);
    };
    if (root) {
      for (const auto& attr : q_.out_attrs) {
        for (const TrcPred* b : bindings) {
          if (b->lhs.attr != attr) continue;
          if (b->is_join()) {
            add_head(var_of(b->rhs_ref()));
          } else {
            std::string fresh = "v" + std::to_string(++next);
            rule.body.push_back(builtin_lit(fresh, CompOp::EQ, b->rhs_value()));
            head.push_back(fresh);
          }
          break;
        }
      }
      rule.head = DlAtom{"Q", head};
    } else {
      for (const auto& p : params) add_head(var_of(p));
      last_idb_ = "I" + std::to_string(++idb_);
      rule.head = DlAtom{last_idb_, head};
    }
    prog_.rules.push_back(std::move(rule));
  }

  const TrcQuery& q_;
  const Schema& schema_;
  DatalogProgram prog_;
  std::string last_idb_;
  int idb_ = 0;
  int anon_ = 0;
};

// ------------------------------------------------------- rules -> calculus

class DatalogToTrc {
 public:
  DatalogToTrc(const DatalogProgram& p, const Schema& schema) : prog_(p), schema_(schema) {}

  TrcQuery run() {
    const DlRule* r = rule_for(prog_, prog_.answer);
    if (!r) throw TranslationError("answer predicate " + prog_.answer + " has no rule");
    TrcQuery q;
    q.kind = r->head.args.empty() ? QueryKind::SENTENCE : QueryKind::QUERY;
    std::vector<std::string> rels;
    for (const auto& rel : schema_.relations()) rels.push_back(rel.name);
    q.out_name = fresh_name("Q", rels);
    auto homes = rule(*r, q.root, std::vector<std::optional<AttrRef>>(r->head.args.size()));
    for (std::size_t i = 0; i < homes.size(); ++i) {
      std::string name = fresh_name(homes[i].attr, q.out_attrs);
      q.out_attrs.push_back(name);
      TrcPred p;
      p.lhs = AttrRef{q.out_name, name};
      p.rhs = homes[i];
      q.root.preds.insert(q.root.preds.begin() + static_cast<long>(i), std::move(p));
    }
    return q;
  }

 private:
  std::string fresh_var(const std::string& relation) {
    return detail::to_lower(relation) + std::to_string(++counts_[relation]);
  }

  static void eq(TrcScope& s, const AttrRef& a, const AttrRef& b) {
    TrcPred p;
    p.lhs = a;
    p.rhs = b;
    s.preds.push_back(std::move(p));
  }

  /// Translates `r` into `s`; `params` are the caller's terms per head
  /// position. Returns the home term of every head variable.
  std::vector<AttrRef> rule(const DlRule& r, TrcScope& s, const std::vector<std::optional<AttrRef>>& params) {
    struct Home {
      AttrRef ref;
      bool local;
    };
    std::map<std::string, Home> homes;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!params[i]) continue;
      const auto& v = r.head.args[i];
      auto it = homes.find(v);
      if (it == homes.end()) {
        homes[v] = Home{*params[i], false};
      } else {
        eq(s, it->second.ref, *params[i]);
      }
    }
    auto bind = [&](const std::string& v, const AttrRef& t) {
      if (is_anonymous(v)) return;
      auto it = homes.find(v);
      if (it == homes.end()) {
        homes[v] = Home{t, true};
        return;
      }
      eq(s, t, it->second.ref);
      if (!it->second.local) it->second = Home{t, true};
    };
    for (const auto& l : r.body) {
      if (l.kind != DlLiteral::Kind::POS || rule_for(prog_, l.atom.pred)) continue;
      const auto& rel = schema_.at(l.atom.pred);
      if (rel.arity() != l.atom.args.size()) throw SchemaError("atom " + rel.name + " has the wrong arity");
      std::string name = fresh_var(rel.name);
      s.vars.push_back(TrcVar{name, rel.name});
      for (std::size_t j = 0; j < rel.arity(); ++j) bind(l.atom.args[j], AttrRef{name, rel.attrs[j]});
    }
    for (const auto& l : r.body) {
      if (l.kind != DlLiteral::Kind::POS) continue;
      const DlRule* sub = rule_for(prog_, l.atom.pred);
      if (!sub) continue;
      std::vector<std::optional<AttrRef>> args;
      for (const auto& a : l.atom.args) {
        auto it = homes.find(a);
        args.push_back(it == homes.end() || is_anonymous(a) ? std::nullopt
                                                            : std::optional<AttrRef>(it->second.ref));
      }
      auto got = rule(*sub, s, args);
      for (std::size_t j = 0; j < got.size(); ++j)
        if (!args[j]) bind(l.atom.args[j], got[j]);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& l : r.body) {
        if (l.kind != DlLiteral::Kind::BUILTIN || l.builtin.op != CompOp::EQ || !l.builtin.rhs_is_var()) continue;
        const auto& a = l.builtin.lhs;
        const auto& b = std::get<std::string>(l.builtin.rhs);
        if (homes.count(a) && !homes.count(b)) {
          homes[b] = homes[a];
          changed = true;
        } else if (!homes.count(a) && homes.count(b)) {
          homes[a] = homes[b];
          changed = true;
        }
      }
    }
    auto home = [&](const std::string& v) {
      auto it = homes.find(v);
      if (it == homes.end())
        throw TranslationError("variable " + v + " is not bound by a positive atom");
      return it->second.ref;
    };
    for (const auto& l : r.body) {
      if (l.kind != DlLiteral::Kind::BUILTIN) continue;
      TrcPred p;
      p.lhs = home(l.builtin.lhs);
      p.op = l.builtin.op;
      if (l.builtin.rhs_is_var()) {
        p.rhs = home(std::get<std::string>(l.builtin.rhs));
        if (p.op == CompOp::EQ && p.lhs == p.rhs_ref()) continue;
      } else {
        p.rhs = std::get<Value>(l.builtin.rhs);
      }
      s.preds.push_back(std::move(p));
    }
    for (const auto& l : r.body) {
      if (l.kind != DlLiteral::Kind::NEG) continue;
      TrcScope child;
      if (const DlRule* sub = rule_for(prog_, l.atom.pred)) {
        std::vector<std::optional<AttrRef>> args;
        for (const auto& a : l.atom.args)
          args.push_back(is_anonymous(a) ? std::nullopt : std::optional<AttrRef>(home(a)));
        rule(*sub, child, args);
      } else {
        const auto& rel = schema_.at(l.atom.pred);
        if (rel.arity() != l.atom.args.size()) throw SchemaError("atom " + rel.name + " has the wrong arity");
        std::string name = fresh_var(rel.name);
        child.vars.push_back(TrcVar{name, rel.name});
        for (std::size_t j = 0; j < rel.arity(); ++j)
          if (!is_anonymous(l.atom.args[j])) eq(child, AttrRef{name, rel.attrs[j]}, home(l.atom.args[j]));
      }
      s.negations.push_back(std::move(child));
    }
    std::vector<AttrRef> out;
    for (const auto& v : r.head.args) out.push_back(home(v));
    return out;
  }

  const DatalogProgram& prog_;
  const Schema& schema_;
  std::map<std::string, int> counts_;
};

std::string nice_var(std::size_t i) {
  static const char* kBase[] = {"x", "y", "z", "w", "v", "u"};
  if (i < 6) return kBase[i];
  return "x" + std::to_string(i - 5);
}

}  // namespace

DatalogProgram trc_to_datalog(const TrcQuery& q, const Schema& schema) {
  check_trc(q);
  auto violations = check_anchored(q);
  if (!violations.empty()) throw AnchoringFault(violations.front().message);
  extensional_tables(q, schema);
  TrcQuery repaired = q;
  std::vector<TrcVar> outer;
  GuardRepair(repaired).scope(repaired.root, outer);
  DatalogProgram p = TrcToDatalog(repaired, schema).run();
  return normalize_datalog(p);
}

TrcQuery datalog_to_trc(const DatalogProgram& p, const Schema& schema) {
  validate_datalog(p);
  return DatalogToTrc(p, schema).run();
}

DatalogProgram normalize_datalog(const DatalogProgram& p) {
  std::map<std::string, std::string> idb;
  std::vector<std::string> others;
  for (const auto& r : p.rules)
    if (r.head.pred != p.answer) others.push_back(r.head.pred);
  for (std::size_t i = 0; i < others.size(); ++i)
    idb[others[i]] = others.size() == 1 ? "I" : "I" + std::to_string(i + 1);
  idb[p.answer] = "Q";
  auto pred = [&](const std::string& n) {
    auto it = idb.find(n);
    return it == idb.end() ? n : it->second;
  };

  DatalogProgram out;
  out.answer = "Q";
  for (const auto& r : p.rules) {
    DlRule n;
    n.head = DlAtom{pred(r.head.pred), r.head.args};
    std::vector<DlLiteral> positives;
    std::vector<DlLiteral> builtins;
    std::vector<DlLiteral> negatives;
    for (auto l : r.body) {
      if (l.kind != DlLiteral::Kind::BUILTIN) l.atom.pred = pred(l.atom.pred);
      (l.kind == DlLiteral::Kind::POS ? positives : l.kind == DlLiteral::Kind::NEG ? negatives : builtins)
          .push_back(std::move(l));
    }
    std::stable_sort(positives.begin(), positives.end(),
                     [](const DlLiteral& a, const DlLiteral& b) { return a.atom.pred < b.atom.pred; });
    n.body = positives;
    n.body.insert(n.body.end(), builtins.begin(), builtins.end());
    n.body.insert(n.body.end(), negatives.begin(), negatives.end());

    std::map<std::string, std::string> rename;
    std::map<std::string, std::size_t> order;
    int anon = 0;
    auto see = [&](const std::string& v) {
      if (rename.count(v)) return;
      if (is_anonymous(v)) {
        rename[v] = "_" + std::to_string(++anon);
        return;
      }
      order[v] = order.size();
      rename[v] = nice_var(order[v]);
    };
    for (const auto& a : n.head.args) see(a);
    for (const auto& l : n.body) {
      if (l.kind == DlLiteral::Kind::BUILTIN) {
        see(l.builtin.lhs);
        if (l.builtin.rhs_is_var()) see(std::get<std::string>(l.builtin.rhs));
      } else {
        for (const auto& a : l.atom.args) see(a);
      }
    }
    for (auto& a : n.head.args) a = rename[a];
    for (auto& l : n.body) {
      if (l.kind != DlLiteral::Kind::BUILTIN) {
        for (auto& a : l.atom.args) a = rename[a];
        continue;
      }
      auto& b = l.builtin;
      std::string lhs = b.lhs;
      b.lhs = rename[lhs];
      if (!b.rhs_is_var()) continue;
      std::string rhs = std::get<std::string>(b.rhs);
      b.rhs = rename[rhs];
      if (order[rhs] < order[lhs]) {
        std::swap(b.lhs, std::get<std::string>(b.rhs));
        b.op = flip(b.op);
      }
    }
    out.rules.push_back(std::move(n));
  }
  return out;
}

}  // namespace reldiag
