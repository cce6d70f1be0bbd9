#include "reldiag/query.hpp"

#include <algorithm>

#include "lexer.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"

namespace reldiag {

std::string language_name(Language lang) {
  switch (lang) {
    case Language::SQL: return "sql";
    case Language::TRC: return "trc";
    case Language::DATALOG: return "datalog";
    case Language::RA: return "ra";
    case Language::DIAGRAM: return "diagram";
  }
  return "";
}

std::optional<Language> parse_language(const std::string& name) {
  std::string n = detail::to_lower(name);
  if (n == "sql") return Language::SQL;
  if (n == "trc") return Language::TRC;
  if (n == "datalog" || n == "dlg" || n == "dl") return Language::DATALOG;
  if (n == "ra") return Language::RA;
  if (n == "diagram" || n == "rd" || n == "rdjson") return Language::DIAGRAM;
  return std::nullopt;
}

std::optional<Language> language_for_path(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot == std::string::npos) return std::nullopt;
  return parse_language(path.substr(dot + 1));
}

AnyQuery parse_query(const std::string& text, Language lang, const Schema* schema,
                     ParseOptions opts) {
  switch (lang) {
    case Language::SQL: return parse_sql(text, opts);
    case Language::TRC: {
      if (!opts.full) return parse_trc(text);
      TrcFormulaQuery f = parse_trc_formula(text, opts);
      if (has_disjunction(f.body)) return f;
      TrcQuery q = trc_pullup(f);
      check_trc(q);
      return q;
    }
    case Language::DATALOG: return parse_datalog(text);
    case Language::RA: return parse_ra(text, schema, opts);
    case Language::DIAGRAM: return load_json(text);
  }
  throw SourceError(1, 1, "unknown language", "");
}

std::string print_query(const AnyQuery& q) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SqlQuery>) {
          return print_sql(x);
        } else if constexpr (std::is_same_v<T, DatalogProgram>) {
          return print_datalog(x);
        } else if constexpr (std::is_same_v<T, RaExpr>) {
          return print_ra(x);
        } else if constexpr (std::is_same_v<T, Diagram>) {
          return emit_json(x);
        } else {
          return print_trc(x);
        }
      },
      q);
}

Language language_of(const AnyQuery& q) {
  switch (q.index()) {
    case 0: return Language::SQL;
    case 4: return Language::DATALOG;
    case 5: return Language::RA;
    case 6: return Language::DIAGRAM;
    default: return Language::TRC;
  }
}

std::vector<Occurrence> extensional_tables(const AnyQuery& q) {
  return std::visit(
      [](const auto& x) -> std::vector<Occurrence> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Diagram>) {
          return extensional_tables(diagram_to_trc(x));
        } else {
          return extensional_tables(x);
        }
      },
      q);
}

namespace {

struct ConstantCollector {
  std::vector<Value> out;

  void add(const Value& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  void pred(const TrcPred& p) {
    if (!p.is_join()) add(p.rhs_value());
  }
  void walk(const TrcScope& s) {
    for (const auto& p : s.preds) pred(p);
    for (const auto& c : s.negations) walk(c);
  }
  void walk(const TrcFormula& f) {
    if (f.kind == TrcFormula::Kind::ATOM) pred(f.atom);
    for (const auto& k : f.kids) walk(k);
  }
  void walk(const SqlSelect& s) {
    for (const auto& w : s.where) walk(w);
  }
  void walk(const SqlCond& c) {
    if (c.kind == SqlCond::Kind::CMP)
      if (auto* v = std::get_if<Value>(&c.rhs)) add(*v);
    for (const auto& k : c.kids) walk(k);
    for (const auto& s : c.sub) walk(s);
  }
  void walk(const RaExpr& e) {
    for (const auto& c : e.conds)
      if (auto* v = std::get_if<Value>(&c.rhs)) add(*v);
    for (const auto& k : e.kids) walk(k);
  }
  void walk(const DatalogProgram& p) {
    for (const auto& r : p.rules)
      for (const auto& l : r.body)
        if (l.kind == DlLiteral::Kind::BUILTIN && !l.builtin.rhs_is_var())
          add(std::get<Value>(l.builtin.rhs));
  }
  void walk(const Diagram& d) {
    for (const auto& c : d.cells)
      for (const auto& t : c.tables)
        for (const auto& r : t.rows)
          if (r.selection) add(r.selection->second);
  }
};

}  // namespace

std::vector<Value> query_constants(const AnyQuery& q) {
  ConstantCollector c;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SqlQuery>) {
          c.walk(x.select);
          for (const auto& p : x.pred) c.walk(p);
        } else if constexpr (std::is_same_v<T, TrcQuery>) {
          c.walk(x.root);
        } else if constexpr (std::is_same_v<T, TrcFormulaQuery>) {
          c.walk(x.body);
        } else if constexpr (std::is_same_v<T, UnionQuery>) {
          for (const auto& cell : x.cells) c.walk(cell.root);
        } else {
          c.walk(x);
        }
      },
      q);
  return c.out;
}

}  // namespace reldiag
