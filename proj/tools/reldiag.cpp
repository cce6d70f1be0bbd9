#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "reldiag/canonicalizer.hpp"
#include "reldiag/driver.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/translators.hpp"

using namespace reldiag;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;

struct Options {
  bool json = false;
  std::string lang;
  bool full = false;
  std::string schema;
  std::string config;
  int k = 0;
  std::size_t rows = 0;
  std::uint64_t ceiling = 0;
  unsigned workers = 0;

  std::vector<std::string> files;
  std::string from, to;
  std::string db;
  std::string emit = "svg";
  std::string output;
  std::string dir;
};

class Runner {
 public:
  explicit Runner(Options o) : o_(std::move(o)) {}

  void configure() {
    if (!o_.config.empty()) {
      cfg_ = Config{};
      apply_config_json(cfg_, read_file(o_.config));
    } else {
      cfg_ = load_config();
    }
    if (o_.full) cfg_.full = true;
    if (o_.k > 0) cfg_.k = o_.k;
    if (o_.rows > 0) cfg_.max_rows = o_.rows;
    if (o_.ceiling > 0) cfg_.ceiling = o_.ceiling;
    if (o_.workers > 0) cfg_.workers = o_.workers;
    if (!o_.schema.empty()) cfg_.schema_path = o_.schema;
    if (!o_.output.empty()) cfg_.output_path = o_.output;
    if (!cfg_.schema_path.empty()) schema_ = parse_schema(read_file(cfg_.schema_path));
  }

  const Schema* schema() const { return schema_ ? &*schema_ : nullptr; }
  const Schema& need_schema() const {
    if (!schema_) throw SchemaError("this command needs a schema; pass --schema or set it in the config file");
    return *schema_;
  }

  AnyQuery load(const std::string& path, const std::string& lang = "") const {
    return load_query(path, lang.empty() ? o_.lang : lang, schema(), cfg_);
  }

  int emit(const std::string& command, ojson j, const std::string& text, int code) {
    if (o_.json) {
      ojson out;
      out["command"] = command;
      for (auto& [k, v] : j.items()) out[k] = v;
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << text;
      if (!text.empty() && text.back() != '\n') std::cout << "\n";
    }
    return code;
  }

  static ojson occurrences(const AnyQuery& q) {
    ojson arr = ojson::array();
    for (const auto& o : extensional_tables(q)) arr.push_back(ojson{{"id", o.id}, {"relation", o.relation}});
    return arr;
  }

  int parse() {
    AnyQuery q = load(o_.files.at(0));
    std::string text = print_query(q);
    return emit("parse",
                ojson{{"language", language_name(language_of(q))}, {"text", text}, {"extensional_tables", occurrences(q)}},
                text, kOk);
  }

  int canon() {
    AnyQuery q = load(o_.files.at(0));
    AnyQuery c = std::visit(
        [&](const auto& x) -> AnyQuery {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, SqlQuery>) {
            return convert(x, Language::SQL, schema(), cfg_);
          } else if constexpr (std::is_same_v<T, DatalogProgram>) {
            return normalize_datalog(x);
          } else if constexpr (std::is_same_v<T, RaExpr> || std::is_same_v<T, Diagram>) {
            return x;
          } else {
            return to_calculus(x, schema(), cfg_);
          }
        },
        q);
    Language lang = language_of(q);
    std::string text = print_as(c, lang);
    return emit("canon", ojson{{"language", language_name(lang)}, {"text", text}}, text, kOk);
  }

  int translate() {
    AnyQuery q = load(o_.files.at(0), o_.from);
    auto to = parse_language(o_.to);
    if (!to) throw Error("unknown target language '" + o_.to + "'");
    AnyQuery r = convert(q, *to, schema(), cfg_);
    std::string text = print_as(r, *to);
    return emit("translate",
                ojson{{"from", language_name(language_of(q))},
                      {"to", language_name(*to)},
                      {"text", text},
                      {"extensional_tables", extensional_tables(r).size()}},
                text, kOk);
  }

  static ojson result_json(const EvalResult& r) {
    if (r.sentence) return ojson{{"sentence", true}, {"truth", r.truth}};
    ojson tuples = ojson::array();
    for (const auto& t : r.relation.tuples) {
      ojson row = ojson::array();
      for (const auto& v : t) {
        if (is_int(v)) {
          row.push_back(std::get<std::int64_t>(v));
        } else {
          row.push_back(std::get<std::string>(v));
        }
      }
      tuples.push_back(row);
    }
    return ojson{{"sentence", false}, {"attributes", r.relation.attrs}, {"tuples", tuples}};
  }

  int eval() {
    const Schema& s = need_schema();
    if (o_.db.empty()) throw Error("eval needs --db");
    Database db = parse_database(read_file(o_.db), s);
    AnyQuery q = load(o_.files.at(0));
    EvalResult r = evaluate(q, db);
    ojson j = result_json(r);
    j["result"] = r.text();
    return emit("eval", j, r.text(), kOk);
  }

  static ojson counterexample_json(const Counterexample& c) {
    ojson j{{"index", c.index}, {"database", database_text(c.db)}};
    if (c.tuple) {
      j["tuple"] = tuple_text(*c.tuple);
      j["only_in"] = c.only_in;
    }
    j["first"] = c.first.text();
    j["second"] = c.second.text();
    return j;
  }

  static std::string counterexample_text(const Counterexample& c) {
    std::string out = "database #" + std::to_string(c.index) + ":\n" + database_text(c.db);
    if (c.tuple) {
      out += "tuple " + tuple_text(*c.tuple) + " is only in the " + (c.only_in == 1 ? "first" : "second") +
             " answer\n";
    }
    out += "first:  " + c.first.text() + "\nsecond: " + c.second.text() + "\n";
    return out;
  }

  int equiv() {
    if (o_.files.size() != 2) throw Error("equiv needs two query files");
    const Schema& s = need_schema();
    AnyQuery a = load(o_.files[0]);
    AnyQuery b = load(o_.files[1]);
    EquivVerdict v = equiv_check(a, b, s, oracle_options(cfg_));
    ojson j{{"verdict", v.equivalent ? "EQUIVALENT_UP_TO_BOUND" : "COUNTEREXAMPLE"},
            {"bound", v.bound},
            {"databases", v.databases}};
    std::string text;
    if (v.equivalent) {
      text = "EQUIVALENT_UP_TO_BOUND (" + v.bound + ", " + std::to_string(v.databases) + " databases)\n";
    } else {
      j["counterexample"] = counterexample_json(*v.counterexample);
      text = "COUNTEREXAMPLE (" + v.bound + ")\n" + counterexample_text(*v.counterexample);
    }
    return emit("equiv", j, text, v.equivalent ? kOk : kNegative);
  }

  static ojson pairs(const std::vector<std::pair<std::string, std::string>>& ps) {
    ojson arr = ojson::array();
    for (const auto& [a, b] : ps) arr.push_back(ojson::array({a, b}));
    return arr;
  }

  static std::string mapping_text(const Bijection& h) {
    std::string out = "{";
    for (std::size_t i = 0; i < h.size(); ++i) out += (i ? ", " : "") + h[i].first + " -> " + h[i].second;
    return out + "}";
  }

  int pattern_iso_cmd() {
    if (o_.files.size() != 2) throw Error("pattern-iso needs two query files");
    const Schema& s = need_schema();
    PatternVerdict v = pattern_iso(load(o_.files[0]), load(o_.files[1]), s, oracle_options(cfg_));
    ojson j{{"verdict", outcome_name(v.outcome)},
            {"bound", v.bound},
            {"signature_first", pairs(v.first.signature)},
            {"signature_second", pairs(v.second.signature)},
            {"bijections_tried", v.bijections_tried}};
    std::string text = outcome_name(v.outcome) + " (" + v.bound + ")\n";
    if (v.outcome == PatternOutcome::ISOMORPH) {
      j["bijection"] = pairs(v.bijection);
      text += "bijection " + mapping_text(v.bijection) + "\n";
    } else {
      ojson refuted = ojson::array();
      for (const auto& r : v.refuted) {
        refuted.push_back(ojson{{"bijection", pairs(r.mapping)}, {"counterexample", counterexample_json(r.counterexample)}});
        text += "refuted " + mapping_text(r.mapping) + " on database #" + std::to_string(r.counterexample.index) + "\n";
      }
      j["refuted"] = refuted;
      if (!v.reason.empty()) {
        j["reason"] = v.reason;
        text += v.reason + "\n";
      }
    }
    return emit("pattern-iso", j, text, v.outcome == PatternOutcome::ISOMORPH ? kOk : kNegative);
  }

  int pattern_classes_cmd() {
    const Schema& s = need_schema();
    std::vector<AnyQuery> qs;
    for (const auto& f : o_.files) qs.push_back(load(f));
    PatternClasses pc = pattern_classes(qs, s, oracle_options(cfg_));
    ojson classes = ojson::array();
    std::string text;
    for (const auto& cls : pc.classes) {
      ojson names = ojson::array();
      text += "{";
      for (std::size_t i = 0; i < cls.size(); ++i) {
        names.push_back(o_.files[cls[i]]);
        text += (i ? ", " : "") + o_.files[cls[i]];
      }
      text += "}\n";
      classes.push_back(names);
    }
    ojson undetermined = ojson::array();
    for (const auto& [a, b] : pc.undetermined) {
      undetermined.push_back(ojson::array({o_.files[a], o_.files[b]}));
      text += "undetermined: " + o_.files[a] + " vs " + o_.files[b] + "\n";
    }
    return emit("pattern-classes", ojson{{"files", o_.files}, {"classes", classes}, {"undetermined", undetermined}},
                text, kOk);
  }

  int diagram() {
    AnyQuery q = load(o_.files.at(0));
    Diagram d = std::get<Diagram>(convert(q, Language::DIAGRAM, schema(), cfg_));
    std::string content;
    if (o_.emit == "svg") {
      content = emit_svg(d);
    } else if (o_.emit == "json") {
      content = emit_json(d);
    } else {
      throw Error("--emit takes svg or json");
    }
    std::size_t tables = 0;
    for (const auto& c : d.cells) tables += c.tables.size();
    ojson j{{"format", o_.emit}, {"cells", d.cells.size()}, {"tables", tables}};
    if (!cfg_.output_path.empty()) {
      std::ofstream out(cfg_.output_path, std::ios::binary);
      if (!out) throw Error("cannot write " + cfg_.output_path);
      out << content;
      j["output"] = cfg_.output_path;
      return emit("diagram", j, o_.json ? "" : "wrote " + cfg_.output_path + "\n", kOk);
    }
    j["content"] = content;
    return emit("diagram", j, content, kOk);
  }

  int validate() {
    Diagram d = load_json(read_file(o_.files.at(0)));
    auto vs = validate_diagram(d);
    ojson arr = ojson::array();
    std::string text = vs.empty() ? "valid\n" : "";
    for (const auto& v : vs) {
      arr.push_back(ojson{{"condition", v.condition}, {"cell", v.cell}, {"elements", v.elements}, {"message", v.message}});
      text += "condition " + std::to_string(v.condition) + " (cell " + std::to_string(v.cell) + "): " + v.message + "\n";
    }
    return emit("validate", ojson{{"valid", vs.empty()}, {"violations", arr}}, text, vs.empty() ? kOk : kNegative);
  }

  int corpus() {
    CorpusReport r = run_corpus(o_.dir, cfg_);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    int code = r.failed ? kNegative : kOk;
    if (o_.json) {
      std::cout << report_json(r);
    } else {
      std::cout << report_text(r);
    }
    return code;
  }

  int fail(const std::string& command, const std::exception& e) {
    if (o_.json) {
      ojson err{{"kind", error_kind(e)}, {"message", e.what()}};
      if (const auto* s = dynamic_cast<const SourceError*>(&e)) {
        err["line"] = s->line();
        err["column"] = s->column();
      }
      if (const auto* s = dynamic_cast<const SchemaViolation*>(&e)) err["path"] = s->path();
      if (const auto* s = dynamic_cast<const ValidityFault*>(&e)) err["conditions"] = s->conditions();
      std::cout << ojson{{"command", command}, {"error", err}}.dump(2) << "\n";
    }
    std::cerr << "reldiag " << command << ": " << error_kind(e) << ": " << e.what() << "\n";
    return kInputError;
  }

 private:
  Options o_;
  Config cfg_;
  std::optional<Schema> schema_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational query patterns across SQL, calculus, Datalog, algebra and diagrams"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--json", o.json, "Machine-readable output");
  app.add_option("--lang", o.lang, "Input language: sql, trc, datalog, ra, diagram");
  app.add_flag("--full", o.full, "Admit disjunction in the input");
  app.add_option("--schema", o.schema, "Schema file, one R(A, B) per line");
  app.add_option("--config", o.config, "JSON configuration file (default: $RELDIAG_CONFIG)");
  app.add_option("--rows", o.rows, "Oracle: most tuples per relation");
  app.add_option("--ceiling", o.ceiling, "Oracle: most databases to enumerate");
  app.add_option("--workers", o.workers, "Worker threads");

  auto files = [&](CLI::App* sub, const char* what) {
    sub->add_option("files", o.files, what)->required();
    return sub;
  };
  auto* parse = files(app.add_subcommand("parse", "Parse a query and print it back"), "Query file");
  auto* canon = files(app.add_subcommand("canon", "Print the canonical form of a query"), "Query file");
  auto* translate = files(app.add_subcommand("translate", "Translate a query into another language"), "Query file");
  translate->add_option("--from", o.from, "Source language (default: by extension)");
  translate->add_option("--to", o.to, "Target language")->required();
  auto* eval = files(app.add_subcommand("eval", "Evaluate a query on a database"), "Query file");
  eval->add_option("--db", o.db, "Database file, one R(1, 2) per line")->required();
  auto* equiv = files(app.add_subcommand("equiv", "Bounded equivalence check of two queries"), "Two query files");
  auto* piso = files(app.add_subcommand("pattern-iso", "Bounded pattern isomorphism of two queries"), "Two query files");
  auto* pcls = files(app.add_subcommand("pattern-classes", "Group queries by pattern"), "Query files");
  for (auto* sub : {equiv, piso, pcls}) sub->add_option("--bound", o.k, "Oracle: domain size k");
  auto* diagram = files(app.add_subcommand("diagram", "Draw a query as a diagram"), "Query file");
  diagram->add_option("--emit", o.emit, "svg or json")->check(CLI::IsMember({"svg", "json"}));
  diagram->add_option("-o,--output", o.output, "Output file (default: stdout)");
  auto* validate = files(app.add_subcommand("validate", "Check a diagram file against the validity conditions"),
                         "Diagram JSON file");
  auto* corpus = app.add_subcommand("corpus", "Run a directory of examples against their .expect sidecars");
  corpus->add_option("dir", o.dir, "Corpus directory")->required();
  corpus->add_option("--bound", o.k, "Oracle: domain size k");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  std::string command = app.get_subcommands().front()->get_name();
  Runner runner(o);
  try {
    runner.configure();
    if (parse->parsed()) return runner.parse();
    if (canon->parsed()) return runner.canon();
    if (translate->parsed()) return runner.translate();
    if (eval->parsed()) return runner.eval();
    if (equiv->parsed()) return runner.equiv();
    if (piso->parsed()) return runner.pattern_iso_cmd();
    if (pcls->parsed()) return runner.pattern_classes_cmd();
    if (diagram->parsed()) return runner.diagram();
    if (validate->parsed()) return runner.validate();
    if (corpus->parsed()) return runner.corpus();
  } catch (const std::exception& e) {
    return runner.fail(command, e);
  }
  return kInputError;
}
