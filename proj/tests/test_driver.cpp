#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "reldiag/driver.hpp"
#include "reldiag/errors.hpp"
#include "reldiag/parsers.hpp"

using namespace reldiag;
namespace fs = std::filesystem;

namespace {

const std::string kCorpus = RELDIAG_CORPUS_DIR;
const std::string kCli = RELDIAG_CLI;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  std::string cmd = "cd '" + kCorpus + "' && env -u RELDIAG_CONFIG '" + kCli + "' " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("reldiag_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Config, JsonOverridesDefaults) {
  Config c;
  apply_config_json(c, R"({"k": 3, "max_rows": 2, "workers": 2, "full": true, "schema": "x.schema"})");
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.max_rows, 2u);
  EXPECT_EQ(c.workers, 2u);
  EXPECT_TRUE(c.full);
  EXPECT_EQ(c.schema_path, "x.schema");
  EXPECT_EQ(c.ceiling, kDefaultCeiling);
  OracleOptions o = oracle_options(c);
  EXPECT_EQ(o.k, 3);
  EXPECT_EQ(o.max_rows, 2u);
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
  Config c;
  EXPECT_THROW(apply_config_json(c, R"({"colour": 1})"), SchemaViolation);
  EXPECT_THROW(apply_config_json(c, R"({"k": "two"})"), SchemaViolation);
  EXPECT_THROW(apply_config_json(c, "[1]"), SchemaViolation);
}

TEST(Config, EnvironmentFileIsRead) {
  fs::path dir = scratch("env");
  write(dir / "cfg.json", R"({"max_rows": 3})");
  ::setenv("RELDIAG_CONFIG", (dir / "cfg.json").c_str(), 1);
  Config c = load_config();
  ::unsetenv("RELDIAG_CONFIG");
  EXPECT_EQ(c.max_rows, 3u);
  EXPECT_EQ(load_config().max_rows, 4u);
  fs::remove_all(dir);
}

TEST(Config, FlagsBeatConfigFile) {
  fs::path dir = scratch("flags");
  write(dir / "cfg.json", R"({"max_rows": 1, "schema": "rs.schema"})");
  CliRun from_file = cli("--json --config '" + (dir / "cfg.json").string() + "' equiv guard.dlg rejoin.dlg");
  EXPECT_EQ(nlohmann::json::parse(from_file.out)["databases"], 15);  // (1 + 4) * (1 + 2)
  CliRun flagged = cli("--json --config '" + (dir / "cfg.json").string() + "' --rows 2 equiv guard.dlg rejoin.dlg");
  EXPECT_EQ(nlohmann::json::parse(flagged.out)["databases"], 44);  // (1 + 4 + 6) * (1 + 2 + 1)
  fs::remove_all(dir);
}

TEST(Helpers, LanguagesAndErrorKinds) {
  EXPECT_EQ(resolve_language("q.sql", ""), Language::SQL);
  EXPECT_EQ(resolve_language("q.txt", "trc"), Language::TRC);
  EXPECT_THROW(resolve_language("q.txt", ""), Error);
  EXPECT_EQ(error_kind(AnchoringFault("x")), "AnchoringFault");
  EXPECT_EQ(error_kind(std::runtime_error("x")), "Error");
}

TEST(Convert, RoutesBetweenLanguages) {
  Schema s = parse_schema(fixtures::kRS);
  Config cfg;
  AnyQuery q = parse_trc(fixtures::kDivisionTrc1);
  EXPECT_EQ(print_as(convert(q, Language::DATALOG, &s, cfg), Language::DATALOG), fixtures::kDivisionProgram);
  for (Language to : {Language::SQL, Language::TRC, Language::DATALOG, Language::RA, Language::DIAGRAM}) {
    AnyQuery out = convert(q, to, &s, cfg);
    EXPECT_EQ(language_of(out), to);
    EXPECT_TRUE(equiv_check(q, out, s).equivalent) << language_name(to);
  }
  cfg.full = true;
  Schema rst = parse_schema(fixtures::kRST);
  AnyQuery u = to_calculus(parse_sql(fixtures::kDisjunctionOrSql, ParseOptions{true}), &rst, cfg);
  ASSERT_TRUE(std::holds_alternative<UnionQuery>(u));
  EXPECT_THROW(convert(u, Language::DATALOG, &rst, cfg), Error);
  std::string sql = print_as(u, Language::SQL);
  EXPECT_NE(sql.find("union"), std::string::npos);
}

TEST(Corpus, ShippedDirectoryPasses) {
  Config cfg;
  CorpusReport r = run_corpus(kCorpus, cfg);
  EXPECT_EQ(r.failed, 0u) << report_text(r);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_GE(r.passed, 38u);
  EXPECT_EQ(r.groups.size(), 3u);
  for (const auto& g : r.groups) EXPECT_TRUE(g.pass) << g.schema;
  for (std::size_t i = 1; i < r.entries.size(); ++i) EXPECT_LT(r.entries[i - 1].file, r.entries[i].file);
}

TEST(Corpus, ReportIsDeterministicAcrossWorkers) {
  Config one, three;
  three.workers = 3;
  EXPECT_EQ(report_json(run_corpus(kCorpus, one)), report_json(run_corpus(kCorpus, three)));
}

TEST(Corpus, EmptyDirectoryIsClean) {
  fs::path dir = scratch("empty");
  CorpusReport r = run_corpus(dir.string(), Config{});
  EXPECT_EQ(r.entries.size(), 0u);
  EXPECT_EQ(r.failed, 0u);
  CliRun run = cli("corpus '" + dir.string() + "'");
  EXPECT_EQ(run.code, 0);
  fs::remove_all(dir);
}

TEST(Corpus, PerturbedExpectationFailsOnce) {
  fs::path dir = scratch("perturbed");
  for (const auto& e : fs::directory_iterator(kCorpus)) fs::copy(e.path(), dir / e.path().filename());
  write(dir / "limits_program.expect", R"({"schema": "unary.schema", "tables": 4})");
  write(dir / "orphan.trc", fixtures::kAntijoinTrc);
  CorpusReport r = run_corpus(dir.string(), Config{});
  EXPECT_EQ(r.failed, 1u) << report_text(r);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_FALSE(r.warnings.empty());
  auto j = nlohmann::json::parse(report_json(r));
  EXPECT_EQ(j["command"], "corpus");
  EXPECT_EQ(j["summary"]["failed"], 1);
  CliRun run = cli("corpus '" + dir.string() + "'");
  EXPECT_EQ(run.code, 1);
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("--schema rs.schema equiv div_algebra.ra div_guarded.trc").code, 0);
  EXPECT_EQ(cli("--schema rs.schema equiv antijoin.trc maxb.trc").code, 1);
  EXPECT_EQ(cli("--schema rs.schema pattern-iso guard.dlg guard_algebra.ra").code, 0);
  EXPECT_EQ(cli("--schema rs.schema pattern-iso guard.dlg rejoin.dlg").code, 1);
  EXPECT_EQ(cli("--schema rs.schema parse missing.trc").code, 2);
  EXPECT_EQ(cli("--schema anchor.schema diagram anchor_hidden_or.trc").code, 2);
  EXPECT_EQ(cli("--no-such-flag parse x.trc").code, 2);
  EXPECT_EQ(cli("validate guard_diagram.rdjson").code, 0);
}

TEST(Cli, JsonOutputs) {
  auto t = nlohmann::json::parse(cli("--json --schema rs.schema translate --to datalog div_guarded.trc").out);
  EXPECT_EQ(t["command"], "translate");
  EXPECT_EQ(t["text"], fixtures::kDivisionProgram);
  auto e = nlohmann::json::parse(cli("--json --schema anchor.schema diagram anchor_hidden_or.trc").out);
  EXPECT_EQ(e["error"]["kind"], "AnchoringFault");
  auto v = nlohmann::json::parse(cli("--json --schema sailor.schema eval --db sailor_blue.db sailor.trc").out);
  EXPECT_EQ(v["command"], "eval");
  auto c = nlohmann::json::parse(
      cli("--json --schema rs.schema pattern-classes guard.dlg rejoin.dlg direct.dlg guard_algebra.ra").out);
  EXPECT_EQ(c["command"], "pattern-classes");
}

TEST(Cli, DeterministicOutput) {
  for (const std::string args : {"--schema rs.schema diagram --emit svg div_guarded.trc",
                                 "--json --schema rs.schema equiv antijoin.trc maxb.trc",
                                 "--json corpus ."}) {
    CliRun a = cli(args);
    CliRun b = cli("--workers 3 " + args);
    EXPECT_EQ(a.out, b.out) << args;
    EXPECT_FALSE(a.out.empty()) << args;
  }
}
