#include "reldiag/pattern.hpp"

#include <algorithm>
#include <numeric>

#include "reldiag/errors.hpp"

namespace reldiag {

namespace {

/// Hands out names[0], names[1], ... to occurrences in extensional order.
class Rebinder {
 public:
  explicit Rebinder(const std::vector<std::string>& names) : names_(names) {}

  std::string next() {
    if (pos_ >= names_.size()) throw TranslationError("too few names to rebind the extensional tables");
    return names_[pos_++];
  }

  void walk(TrcScope& s) {
    for (auto& v : s.vars) v.relation = next();
    for (auto& c : s.negations) walk(c);
  }
  void walk(TrcFormula& f) {
    if (f.kind == TrcFormula::Kind::EXISTS)
      for (auto& v : f.vars) v.relation = next();
    for (auto& k : f.kids) walk(k);
  }
  void walk(RaExpr& e) {
    if (e.kind == RaExpr::Kind::RENAME && e.renames.empty() && !e.alias.empty() &&
        e.kids[0].kind == RaExpr::Kind::REL) {
      e.kids[0].relation = next();
      return;
    }
    if (e.kind == RaExpr::Kind::REL) {
      std::string base = e.relation;
      e = RaExpr::rename_qual(base, RaExpr::rel(next()));
      return;
    }
    for (auto& k : e.kids) walk(k);
  }
  void walk(SqlCond& c) {
    for (auto& k : c.kids) walk(k);
    for (auto& s : c.sub) walk(s);
  }
  void walk(SqlSelect& s) {
    for (auto& f : s.from) f.relation = next();
    for (auto& w : s.where) walk(w);
  }
  void walk(DatalogProgram& p) {
    auto idbs = idb_names(p);
    for (auto& r : p.rules)
      for (auto& l : r.body)
        if (l.kind != DlLiteral::Kind::BUILTIN &&
            std::find(idbs.begin(), idbs.end(), l.atom.pred) == idbs.end())
          l.atom.pred = next();
  }

  void finish() const {
    if (pos_ != names_.size()) throw TranslationError("too many names to rebind the extensional tables");
  }

 private:
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

AnyQuery calculus_view(const AnyQuery& q) {
  if (const auto* d = std::get_if<Diagram>(&q)) return diagram_to_trc(*d);
  return q;
}

}  // namespace

AnyQuery rebind_tables(const AnyQuery& q, const std::vector<std::string>& names) {
  AnyQuery out = calculus_view(q);
  Rebinder rb(names);
  std::visit(
      [&](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SqlQuery>) {
          if (x.head == SqlQuery::Head::NOT) {
            for (auto& c : x.pred) rb.walk(c);
          } else {
            rb.walk(x.select);
          }
        } else if constexpr (std::is_same_v<T, TrcQuery>) {
          rb.walk(x.root);
        } else if constexpr (std::is_same_v<T, TrcFormulaQuery>) {
          rb.walk(x.body);
        } else if constexpr (std::is_same_v<T, UnionQuery>) {
          for (auto& c : x.cells) rb.walk(c.root);
        } else if constexpr (std::is_same_v<T, Diagram>) {
          // calculus_view has already replaced diagrams
        } else {
          rb.walk(x);
        }
      },
      out);
  rb.finish();
  return out;
}

ShatteredQuery shatter(const AnyQuery& q, const Schema& schema) {
  AnyQuery base = calculus_view(q);
  auto occ = extensional_tables(base, schema);
  ShatteredQuery out{base, {}, {}};
  std::map<std::string, int> counts;
  std::vector<std::string> names;
  for (const auto& o : occ) {
    std::string name = o.relation + "_" + std::to_string(++counts[o.relation]);
    names.push_back(name);
    out.signature.emplace_back(name, o.relation);
    RelationSchema rel = schema.at(o.relation);
    rel.name = name;
    out.schema.add(std::move(rel));
  }
  out.query = rebind_tables(base, names);
  return out;
}

std::string outcome_name(PatternOutcome o) {
  switch (o) {
    case PatternOutcome::ISOMORPH: return "ISOMORPH";
    case PatternOutcome::NOT_ISOMORPH: return "NOT_ISOMORPH";
    case PatternOutcome::UNDETERMINED: return "UNDETERMINED";
  }
  return "";
}

AnyQuery apply_bijection(const PatternVerdict& v, const Bijection& h) {
  std::map<std::string, std::string> to_first;
  for (const auto& [a, b] : h) to_first[b] = a;
  std::vector<std::string> names;
  for (const auto& [fresh, base] : v.second.signature) {
    auto it = to_first.find(fresh);
    if (it == to_first.end()) throw TranslationError("the bijection does not cover " + fresh);
    names.push_back(it->second);
  }
  return rebind_tables(v.second.query, names);
}

namespace {

std::vector<std::string> sorted_bases(const ShatteredQuery& s) {
  std::vector<std::string> out;
  for (const auto& sig : s.signature) out.push_back(sig.second);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Value> merged_constants(const AnyQuery& a, const AnyQuery& b) {
  auto out = query_constants(a);
  for (const auto& v : query_constants(b))
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

}  // namespace

PatternVerdict pattern_iso(const AnyQuery& q1, const AnyQuery& q2, const Schema& schema,
                           const OracleOptions& opts) {
  PatternVerdict v;
  v.first = shatter(q1, schema);
  v.second = shatter(q2, schema);
  TypedDomain domain = oracle_domain(merged_constants(q1, q2), opts);
  v.bound = bound_text(domain, opts);
  if (sorted_bases(v.first) != sorted_bases(v.second)) {
    v.outcome = PatternOutcome::NOT_ISOMORPH;
    v.reason = "the queries use different numbers of extensional tables per relation";
    return v;
  }
  PreparedQuery p1(v.first.query, v.first.schema);
  {
    PreparedQuery p2(v.second.query, v.second.schema);
    if (p1.is_sentence() != p2.is_sentence() || p1.arity() != p2.arity()) {
      v.outcome = PatternOutcome::NOT_ISOMORPH;
      v.reason = "the answers differ in arity";
      return v;
    }
  }

  // Per base relation: the first query's occurrences and a permutation
  // assigning them to the second query's occurrences of that base.
  std::map<std::string, std::vector<std::size_t>> idx1, idx2;
  for (std::size_t i = 0; i < v.first.signature.size(); ++i) idx1[v.first.signature[i].second].push_back(i);
  for (std::size_t i = 0; i < v.second.signature.size(); ++i) idx2[v.second.signature[i].second].push_back(i);
  std::vector<std::string> bases;
  std::vector<std::vector<std::size_t>> perms;
  for (const auto& [b, ids] : idx1) {
    bases.push_back(b);
    std::vector<std::size_t> p(ids.size());
    std::iota(p.begin(), p.end(), 0);
    perms.push_back(std::move(p));
  }

  for (;;) {
    Bijection h;
    std::vector<std::string> names(v.second.signature.size());
    for (std::size_t b = 0; b < bases.size(); ++b) {
      const auto& i1 = idx1[bases[b]];
      const auto& i2 = idx2[bases[b]];
      for (std::size_t j = 0; j < i2.size(); ++j) {
        const std::string& target = v.first.signature[i1[perms[b][j]]].first;
        names[i2[j]] = target;
        h.emplace_back(target, v.second.signature[i2[j]].first);
      }
    }
    std::sort(h.begin(), h.end());
    ++v.bijections_tried;
    try {
      PreparedQuery p2(rebind_tables(v.second.query, names), v.first.schema);
      EquivVerdict ev = equiv_check(p1, p2, v.first.schema, domain, opts);
      if (ev.equivalent) {
        v.outcome = PatternOutcome::ISOMORPH;
        v.bijection = std::move(h);
        return v;
      }
      v.refuted.push_back(RefutedBijection{std::move(h), std::move(*ev.counterexample)});
    } catch (const CapacityFault& e) {
      v.outcome = PatternOutcome::UNDETERMINED;
      v.reason = e.what();
      v.refuted.clear();
      return v;
    }
    // Advance the odometer; the last base changes fastest.
    std::size_t b = bases.size();
    bool done = true;
    while (b-- > 0) {
      if (std::next_permutation(perms[b].begin(), perms[b].end())) {
        done = false;
        break;
      }
    }
    if (done) break;
  }
  v.outcome = PatternOutcome::NOT_ISOMORPH;
  v.reason = "every base-preserving bijection is refuted by a database of the bound";
  return v;
}

PatternClasses pattern_classes(const std::vector<AnyQuery>& queries, const Schema& schema,
                               const OracleOptions& opts) {
  PatternClasses out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    bool placed = false;
    for (auto& cls : out.classes) {
      std::size_t rep = cls.front();
      PatternOutcome o = pattern_iso(queries[rep], queries[i], schema, opts).outcome;
      out.verdicts[{rep, i}] = o;
      if (o == PatternOutcome::ISOMORPH) {
        cls.push_back(i);
        placed = true;
        break;
      }
      if (o == PatternOutcome::UNDETERMINED) out.undetermined.emplace_back(rep, i);
    }
    if (!placed) out.classes.push_back({i});
  }
  return out;
}

}  // namespace reldiag
