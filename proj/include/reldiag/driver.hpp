#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "reldiag/evaluator.hpp"
#include "reldiag/pattern.hpp"
#include "reldiag/query.hpp"

namespace reldiag {

struct Config {
  int k = 2;
  std::size_t max_rows = 4;
  std::uint64_t ceiling = kDefaultCeiling;
  std::size_t dnf_bound = 64;
  bool full = false;
  unsigned workers = 1;
  std::string schema_path;
  std::string output_path;
};

/// Overrides `cfg` with the keys of a JSON object: k, max_rows, ceiling,
/// dnf_bound, full, workers, schema, output. Throws SchemaViolation.
void apply_config_json(Config& cfg, const std::string& text);
/// Defaults, then the file named by RELDIAG_CONFIG when set.
Config load_config();
OracleOptions oracle_options(const Config& cfg);

/// Name of the fault class, e.g. "AnchoringFault"; "Error" otherwise.
std::string error_kind(const std::exception& e);

std::string read_file(const std::string& path);
/// Language from `lang` when given, else from the file extension.
Language resolve_language(const std::string& path, const std::string& lang);
AnyQuery load_query(const std::string& path, const std::string& lang, const Schema* schema,
                    const Config& cfg);

/// Calculus form: a TrcQuery, or a UnionQuery when disjunction splits the
/// query into several cells.
AnyQuery to_calculus(const AnyQuery& q, const Schema* schema, const Config& cfg);
/// Structure-preserving routes where they exist (sql<->trc, ra->datalog,
/// datalog->trc, datalog->ra, trc<->diagram); other pairs go through
/// calculus and Datalog. A union reaches only calculus, SQL and diagrams.
AnyQuery convert(const AnyQuery& q, Language to, const Schema* schema, const Config& cfg);
/// Like print_query, but a calculus union printed as SQL shows one SELECT
/// per cell separated by `union` lines.
std::string print_as(const AnyQuery& q, Language lang);

// ---------------------------------------------------------------- corpus

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CorpusEntry {
  std::string file;
  std::string status;  // pass, fail, skip
  std::vector<CheckResult> checks;
};

struct ClassGroup {
  std::string schema;
  std::vector<std::vector<std::string>> expected;
  std::vector<std::vector<std::string>> actual;
  bool pass = false;
};

struct CorpusReport {
  std::string directory;
  std::vector<CorpusEntry> entries;  // ordered by file name
  std::vector<ClassGroup> groups;
  std::vector<std::string> warnings;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
};

/// Runs every query file that has a `<stem>.expect` sidecar. Entries run in
/// parallel on cfg.workers threads; the report is ordered by file name.
CorpusReport run_corpus(const std::string& dir, const Config& cfg);
std::string report_json(const CorpusReport& r);
std::string report_text(const CorpusReport& r);

}  // namespace reldiag
