#include "reldiag/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "reldiag/canonicalizer.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/translators.hpp"

namespace reldiag {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- config

void apply_config_json(Config& cfg, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation("$", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaViolation("$", "expected an object");
  auto positive = [&](const char* key) -> std::uint64_t {
    const json& v = j[key];
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0)
      throw SchemaViolation(std::string("$.") + key, "expected a positive integer");
    return v.get<std::uint64_t>();
  };
  auto text_of = [&](const char* key) {
    if (!j[key].is_string()) throw SchemaViolation(std::string("$.") + key, "expected a string");
    return j[key].get<std::string>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "k") {
      cfg.k = static_cast<int>(positive("k"));
    } else if (key == "max_rows") {
      cfg.max_rows = positive("max_rows");
    } else if (key == "ceiling") {
      cfg.ceiling = positive("ceiling");
    } else if (key == "dnf_bound") {
      cfg.dnf_bound = positive("dnf_bound");
    } else if (key == "workers") {
      cfg.workers = static_cast<unsigned>(positive("workers"));
    } else if (key == "full") {
      if (!value.is_boolean()) throw SchemaViolation("$.full", "expected a boolean");
      cfg.full = value.get<bool>();
    } else if (key == "schema") {
      cfg.schema_path = text_of("schema");
    } else if (key == "output") {
      cfg.output_path = text_of("output");
    } else {
      throw SchemaViolation("$." + key, "unknown configuration key");
    }
  }
}

Config load_config() {
  Config cfg;
  if (const char* path = std::getenv("RELDIAG_CONFIG"); path && *path) apply_config_json(cfg, read_file(path));
  return cfg;
}

OracleOptions oracle_options(const Config& cfg) {
  OracleOptions o;
  o.k = cfg.k;
  o.max_rows = cfg.max_rows;
  o.ceiling = cfg.ceiling;
  o.workers = cfg.workers;
  return o;
}

std::string error_kind(const std::exception& e) {
#define RELDIAG_KIND(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  RELDIAG_KIND(TypeFault)
  RELDIAG_KIND(CapacityFault)
  RELDIAG_KIND(SchemaError)
  RELDIAG_KIND(SourceError)
  RELDIAG_KIND(ScopeError)
  RELDIAG_KIND(SafetyFault)
  RELDIAG_KIND(RecursionFault)
  RELDIAG_KIND(DuplicateHeadFault)
  RELDIAG_KIND(FragmentFault)
  RELDIAG_KIND(AnchoringFault)
  RELDIAG_KIND(AttributeFault)
  RELDIAG_KIND(TranslationError)
  RELDIAG_KIND(ValidityFault)
  RELDIAG_KIND(SchemaViolation)
#undef RELDIAG_KIND
  return "Error";
}

// ----------------------------------------------------------------- loading

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Language resolve_language(const std::string& path, const std::string& lang) {
  if (!lang.empty()) {
    auto l = parse_language(lang);
    if (!l) throw Error("unknown language '" + lang + "'");
    return *l;
  }
  auto l = language_for_path(path);
  if (!l) throw Error("cannot tell the language of " + path + "; use --lang");
  return *l;
}

AnyQuery load_query(const std::string& path, const std::string& lang, const Schema* schema,
                    const Config& cfg) {
  ParseOptions opts;
  opts.full = cfg.full;
  return parse_query(read_file(path), resolve_language(path, lang), schema, opts);
}

// ------------------------------------------------------------- conversion

namespace {

AnyQuery single_or_union(UnionQuery u) {
  if (u.cells.size() == 1) return std::move(u.cells[0]);
  return u;
}

const Schema& need(const Schema* schema, const char* what) {
  if (!schema) throw SchemaError(std::string("a schema is required to ") + what);
  return *schema;
}

DatalogProgram to_datalog(const AnyQuery& q, const Schema* schema, const Config& cfg);

}  // namespace

AnyQuery to_calculus(const AnyQuery& q, const Schema* schema, const Config& cfg) {
  return std::visit(
      [&](const auto& x) -> AnyQuery {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SqlQuery>) {
          TrcFormulaQuery f = sql_to_trc_formula(x, schema);
          if (has_disjunction(f.body)) return single_or_union(eliminate_disjunction(f, cfg.dnf_bound));
          return sql_to_trc(x, schema);
        } else if constexpr (std::is_same_v<T, TrcQuery>) {
          return x;
        } else if constexpr (std::is_same_v<T, TrcFormulaQuery>) {
          return single_or_union(eliminate_disjunction(x, cfg.dnf_bound));
        } else if constexpr (std::is_same_v<T, UnionQuery>) {
          return single_or_union(x);
        } else if constexpr (std::is_same_v<T, DatalogProgram>) {
          return datalog_to_trc(x, need(schema, "translate Datalog"));
        } else if constexpr (std::is_same_v<T, RaExpr>) {
          const Schema& s = need(schema, "translate algebra");
          return datalog_to_trc(ra_to_datalog(x, s), s);
        } else {
          return single_or_union(diagram_to_trc(x));
        }
      },
      q);
}

namespace {

DatalogProgram to_datalog(const AnyQuery& q, const Schema* schema, const Config& cfg) {
  if (const auto* p = std::get_if<DatalogProgram>(&q)) return *p;
  const Schema& s = need(schema, "translate to Datalog");
  if (const auto* e = std::get_if<RaExpr>(&q)) return ra_to_datalog(*e, s);
  AnyQuery c = to_calculus(q, schema, cfg);
  if (std::holds_alternative<UnionQuery>(c))
    throw TranslationError("a union of several cells has no single-answer Datalog form");
  return trc_to_datalog(std::get<TrcQuery>(c), s);
}

}  // namespace

AnyQuery convert(const AnyQuery& q, Language to, const Schema* schema, const Config& cfg) {
  switch (to) {
    case Language::TRC: return to_calculus(q, schema, cfg);
    case Language::SQL: {
      if (const auto* s = std::get_if<SqlQuery>(&q))
        if (!has_disjunction(sql_to_trc_formula(*s, schema).body)) return sql_canonicalize(*s, schema);
      AnyQuery c = to_calculus(q, schema, cfg);
      if (const auto* t = std::get_if<TrcQuery>(&c)) return trc_to_sql(*t);
      return c;  // printed cell by cell by print_as
    }
    case Language::DATALOG: return to_datalog(q, schema, cfg);
    case Language::RA: {
      if (const auto* e = std::get_if<RaExpr>(&q)) return *e;
      return datalog_to_ra(to_datalog(q, schema, cfg), need(schema, "translate to algebra"));
    }
    case Language::DIAGRAM: {
      if (const auto* d = std::get_if<Diagram>(&q)) return *d;
      AnyQuery c = to_calculus(q, schema, cfg);
      if (const auto* t = std::get_if<TrcQuery>(&c)) return trc_to_diagram(*t);
      return trc_to_diagram(std::get<UnionQuery>(c));
    }
  }
  throw TranslationError("unknown target language");
}

std::string print_as(const AnyQuery& q, Language lang) {
  if (lang == Language::SQL) {
    if (const auto* u = std::get_if<UnionQuery>(&q)) {
      std::string out;
      auto cells = union_to_sql(*u);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += "union\n";
        out += print_sql(cells[i]);
      }
      return out;
    }
  }
  return print_query(q);
}

// ----------------------------------------------------------------- corpus

namespace {

struct Item {
  std::string file;      // name inside the directory
  std::string sidecar;   // empty when missing
};

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

std::string failure(const std::exception& e) { return error_kind(e) + ": " + e.what(); }

class EntryRunner {
 public:
  EntryRunner(const fs::path& dir, const Config& cfg) : dir_(dir), cfg_(cfg) {}

  CorpusEntry run(const Item& item, std::map<std::string, std::string>& class_of,
                  std::map<std::string, std::string>& schema_of) {
    CorpusEntry out;
    out.file = item.file;
    json e;
    try {
      e = json::parse(read_file((dir_ / item.sidecar).string()));
      if (!e.is_object()) throw Error("the sidecar is not a JSON object");
    } catch (const std::exception& ex) {
      out.checks.push_back({"sidecar", false, ex.what()});
      out.status = "fail";
      return out;
    }
    Config cfg = cfg_;
    if (e.contains("full")) cfg.full = e["full"].get<bool>();
    if (e.contains("bound")) {
      const json& b = e["bound"];
      if (b.contains("k")) cfg.k = b["k"].get<int>();
      if (b.contains("max_rows")) cfg.max_rows = b["max_rows"].get<std::size_t>();
    }
    OracleOptions opts = oracle_options(cfg);
    std::optional<Schema> schema;
    std::string schema_name = e.value("schema", "");
    auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
      CheckResult r{name, false, ""};
      try {
        auto [ok, detail] = f();
        r.pass = ok;
        r.detail = detail;
      } catch (const std::exception& ex) {
        r.detail = failure(ex);
      }
      out.checks.push_back(std::move(r));
    };
    try {
      if (!schema_name.empty()) schema = parse_schema(read_file((dir_ / schema_name).string()));
    } catch (const std::exception& ex) {
      out.checks.push_back({"schema", false, failure(ex)});
      out.status = "fail";
      return out;
    }
    const Schema* sp = schema ? &*schema : nullptr;
    std::string path = (dir_ / item.file).string();

    if (e.contains("error")) {
      std::string want = e["error"].get<std::string>();
      check("error", [&]() -> std::pair<bool, std::string> {
        try {
          AnyQuery q = load_query(path, "", sp, cfg);
          if (auto* d = std::get_if<Diagram>(&q)) {
            diagram_to_trc(*d);
          } else {
            convert(q, Language::DIAGRAM, sp, cfg);
          }
        } catch (const std::exception& ex) {
          std::string got = error_kind(ex);
          return {got == want, got + ": " + ex.what()};
        }
        return {false, "no fault raised"};
      });
      finish(out);
      return out;
    }

    std::optional<AnyQuery> q;
    check("parse", [&]() -> std::pair<bool, std::string> {
      q = load_query(path, "", sp, cfg);
      return {true, language_name(language_of(*q))};
    });
    if (!q) {
      finish(out);
      return out;
    }
    if (e.contains("violations")) {
      std::set<int> want;
      for (const auto& v : e["violations"]) want.insert(v.get<int>());
      check("violations", [&]() -> std::pair<bool, std::string> {
        const auto* d = std::get_if<Diagram>(&*q);
        if (!d) return {false, "not a diagram"};
        std::set<int> got;
        for (const auto& v : validate_diagram(*d)) got.insert(v.condition);
        std::string text;
        for (int c : got) text += (text.empty() ? "" : ",") + std::to_string(c);
        return {got == want, "conditions [" + text + "]"};
      });
    }
    if (e.contains("tables")) {
      check("tables", [&]() -> std::pair<bool, std::string> {
        auto n = extensional_tables(*q).size();
        return {n == e["tables"].get<std::size_t>(), std::to_string(n) + " extensional tables"};
      });
    }
    if (e.contains("cells")) {
      check("cells", [&]() -> std::pair<bool, std::string> {
        AnyQuery c = to_calculus(*q, sp, cfg);
        std::size_t n = std::holds_alternative<UnionQuery>(c) ? std::get<UnionQuery>(c).cells.size() : 1;
        return {n == e["cells"].get<std::size_t>(), std::to_string(n) + " cells"};
      });
    }
    if (e.contains("anchored")) {
      check("anchored", [&]() -> std::pair<bool, std::string> {
        AnyQuery c = to_calculus(*q, sp, cfg);
        std::size_t n = 0;
        if (const auto* t = std::get_if<TrcQuery>(&c)) {
          n = check_anchored(*t).size();
        } else {
          for (const auto& cell : std::get<UnionQuery>(c).cells) n += check_anchored(cell).size();
        }
        return {(n == 0) == e["anchored"].get<bool>(), std::to_string(n) + " unanchored predicates"};
      });
    }
    Config full_cfg = cfg;
    full_cfg.full = true;
    auto other = [&](const std::string& f) { return load_query((dir_ / f).string(), "", sp, full_cfg); };
    for (const auto& [key, want] : {std::pair<const char*, bool>{"equivalent", true}, {"not_equivalent", false}}) {
      if (!e.contains(key)) continue;
      for (const auto& f : e[key]) {
        std::string name = f.get<std::string>();
        check(std::string(key) + " " + name, [&, want = want]() -> std::pair<bool, std::string> {
          EquivVerdict v = equiv_check(*q, other(name), need(sp, "check equivalence"), opts);
          return {v.equivalent == want,
                  (v.equivalent ? "EQUIVALENT_UP_TO_BOUND " : "COUNTEREXAMPLE ") + v.bound};
        });
      }
    }
    for (const auto& [key, want] : {std::pair<const char*, bool>{"isomorph", true}, {"not_isomorph", false}}) {
      if (!e.contains(key)) continue;
      for (const auto& f : e[key]) {
        std::string name = f.get<std::string>();
        check(std::string(key) + " " + name, [&, want = want]() -> std::pair<bool, std::string> {
          PatternVerdict v = pattern_iso(*q, other(name), need(sp, "check pattern isomorphism"), opts);
          bool iso = v.outcome == PatternOutcome::ISOMORPH;
          if (v.outcome == PatternOutcome::UNDETERMINED) return {false, "UNDETERMINED: " + v.reason};
          return {iso == want, outcome_name(v.outcome) + " " + v.bound};
        });
      }
    }
    if (e.contains("calculus_isomorph")) {
      for (const auto& f : e["calculus_isomorph"]) {
        std::string name = f.get<std::string>();
        check("calculus_isomorph " + name, [&]() -> std::pair<bool, std::string> {
          const Schema& s = need(sp, "check pattern isomorphism");
          PatternVerdict v = pattern_iso(to_calculus(*q, sp, cfg), to_calculus(other(name), sp, cfg), s, opts);
          if (v.outcome == PatternOutcome::UNDETERMINED) return {false, "UNDETERMINED: " + v.reason};
          return {v.outcome == PatternOutcome::ISOMORPH, outcome_name(v.outcome) + " " + v.bound};
        });
      }
    }
    if (e.contains("eval")) {
      for (const auto& ev : e["eval"]) {
        std::string db_name = ev["db"].get<std::string>();
        std::string want = ev["expect"].get<std::string>();
        check("eval " + db_name, [&]() -> std::pair<bool, std::string> {
          Database db = parse_database(read_file((dir_ / db_name).string()), need(sp, "evaluate"));
          std::string got = evaluate(*q, db).text();
          return {got == want, got};
        });
      }
    }
    if (e.contains("translate")) {
      for (const auto& t : e["translate"]) {
        std::string to = t["to"].get<std::string>();
        std::string want = t["expect"].get<std::string>();
        check("translate " + to, [&]() -> std::pair<bool, std::string> {
          auto lang = parse_language(to);
          if (!lang) throw Error("unknown language '" + to + "'");
          AnyQuery r = convert(*q, *lang, sp, cfg);
          if (*lang == Language::DATALOG) r = normalize_datalog(std::get<DatalogProgram>(r));
          std::string got = print_as(r, *lang);
          return {trim(got) == trim(want), got};
        });
      }
    }
    if (e.contains("class")) {
      class_of[item.file] = e["class"].get<std::string>();
      schema_of[item.file] = schema_name;
    }
    finish(out);
    return out;
  }

 private:
  static void finish(CorpusEntry& out) {
    bool ok = std::all_of(out.checks.begin(), out.checks.end(), [](const CheckResult& c) { return c.pass; });
    out.status = ok ? "pass" : "fail";
  }

  fs::path dir_;
  const Config& cfg_;
};

}  // namespace

CorpusReport run_corpus(const std::string& dir, const Config& cfg) {
  CorpusReport report;
  report.directory = dir;
  fs::path root(dir);
  if (!fs::is_directory(root)) throw Error(dir + " is not a directory");
  std::vector<Item> items;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (!language_for_path(name)) continue;
    fs::path sidecar = entry.path();
    sidecar.replace_extension(".expect");
    items.push_back(Item{name, fs::exists(sidecar) ? sidecar.filename().string() : ""});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.file < b.file; });

  std::vector<CorpusEntry> entries(items.size());
  std::vector<std::map<std::string, std::string>> classes(items.size()), schemas(items.size());
  Config inner = cfg;
  unsigned workers = std::max(1u, cfg.workers);
  if (workers > 1) inner.workers = 1;
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    EntryRunner runner(root, inner);
    for (std::size_t i = next++; i < items.size(); i = next++) {
      if (items[i].sidecar.empty()) {
        entries[i] = CorpusEntry{items[i].file, "skip", {}};
        continue;
      }
      entries[i] = runner.run(items[i], classes[i], schemas[i]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::min<std::size_t>(workers, items.size()); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (const auto& e : entries) {
    if (e.status == "skip") {
      report.warnings.push_back(e.file + ": no .expect sidecar, skipped");
      ++report.skipped;
    } else if (e.status == "pass") {
      ++report.passed;
    } else {
      ++report.failed;
    }
  }
  report.entries = std::move(entries);

  // Class expectations, one group per schema.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> groups;  // schema -> (file, class)
  for (std::size_t i = 0; i < items.size(); ++i)
    for (const auto& [file, cls] : classes[i]) groups[schemas[i][file]].emplace_back(file, cls);
  for (const auto& [schema_name, members] : groups) {
    ClassGroup g;
    g.schema = schema_name;
    std::map<std::string, std::vector<std::string>> by_label;
    for (const auto& [file, cls] : members) by_label[cls].push_back(file);
    for (auto& [label, files] : by_label) g.expected.push_back(files);
    try {
      Schema schema = parse_schema(read_file((root / schema_name).string()));
      std::vector<AnyQuery> qs;
      for (const auto& [file, cls] : members) {
        Config c = cfg;
        json e = json::parse(read_file((root / fs::path(file).replace_extension(".expect")).string()));
        if (e.contains("full")) c.full = e["full"].get<bool>();
        qs.push_back(load_query((root / file).string(), "", &schema, c));
      }
      PatternClasses pc = pattern_classes(qs, schema, oracle_options(cfg));
      for (const auto& cls : pc.classes) {
        std::vector<std::string> files;
        for (auto i : cls) files.push_back(members[i].first);
        g.actual.push_back(files);
      }
      auto norm = [](std::vector<std::vector<std::string>> v) {
        for (auto& x : v) std::sort(x.begin(), x.end());
        std::sort(v.begin(), v.end());
        return v;
      };
      g.pass = pc.undetermined.empty() && norm(g.expected) == norm(g.actual);
    } catch (const std::exception& ex) {
      report.warnings.push_back("class group " + schema_name + ": " + failure(ex));
      g.pass = false;
    }
    if (!g.pass) ++report.failed;
    report.groups.push_back(std::move(g));
  }
  return report;
}

std::string report_json(const CorpusReport& r) {
  ojson root;
  root["command"] = "corpus";
  root["directory"] = r.directory;
  ojson entries = ojson::array();
  for (const auto& e : r.entries) {
    ojson checks = ojson::array();
    for (const auto& c : e.checks) checks.push_back(ojson{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    entries.push_back(ojson{{"file", e.file}, {"status", e.status}, {"checks", checks}});
  }
  root["entries"] = entries;
  ojson groups = ojson::array();
  for (const auto& g : r.groups)
    groups.push_back(ojson{{"schema", g.schema}, {"expected", g.expected}, {"actual", g.actual}, {"pass", g.pass}});
  root["class_groups"] = groups;
  root["warnings"] = r.warnings;
  root["summary"] = ojson{{"passed", r.passed}, {"failed", r.failed}, {"skipped", r.skipped}};
  return root.dump(2) + "\n";
}

std::string report_text(const CorpusReport& r) {
  std::string out;
  for (const auto& e : r.entries) {
    out += e.status + "  " + e.file + "\n";
    for (const auto& c : e.checks)
      if (!c.pass) out += "      failed " + c.name + ": " + c.detail + "\n";
  }
  for (const auto& g : r.groups) {
    out += std::string(g.pass ? "pass" : "fail") + "  classes over " + g.schema + ":";
    for (const auto& cls : g.actual) {
      out += " {";
      for (std::size_t i = 0; i < cls.size(); ++i) out += (i ? ", " : "") + cls[i];
      out += "}";
    }
    out += "\n";
  }
  out += std::to_string(r.passed) + " passed, " + std::to_string(r.failed) + " failed, " +
         std::to_string(r.skipped) + " skipped\n";
  return out;
}

}  // namespace reldiag
