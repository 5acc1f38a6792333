#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "flg/ast.hpp"
#include "flg/diagnostics.hpp"
#include "flg/engine.hpp"
#include "flg/world.hpp"

namespace flg {

struct RunConfig {
  std::vector<std::string> programs;
  std::string facts_dir;
  std::string out_dir;       // empty: dumps go to stdout
  int workers = 1;
  std::string solver;        // explicit solver path
  std::string backend = "process";  // process | replay
  std::string replay_dir;
  std::string record_dir;    // process backend also writes transcripts here
  std::optional<std::int64_t> timeout_ms;
  ErrorMode exceptions = ErrorMode::Hard;
  bool dump_smt = false;
  bool stats = false;
  bool naive = false;        // reference evaluator instead of semi-naive
  bool check_types = false;  // re-check every derived tuple against its relation type
};

enum ExitCode { kExitOk = 0, kExitStatic = 1, kExitRuntime = 2 };

// Parse + resolve + type check + rewrite + validate. Diagnostics (errors and
// warnings) are collected in `diags`; null when any stage rejects.
std::unique_ptr<Program> load_program(const std::vector<std::string>& paths, Diagnostics& diags);
std::unique_ptr<Program> load_program_text(const std::string& text, const std::string& name,
                                           Diagnostics& diags);

// Reads `<dir>/<p>.tsv` for every input relation p into `world`.
bool ingest_facts(const Program& prog, Engine& engine, const std::string& dir, World& world,
                  Diagnostics& diags);

// One tab-separated line per tuple, canonically sorted.
std::string dump_relation(const World& world, Symbol rel);

// The whole batch run. Diagnostics and statistics go to `err`; relation
// dumps go to files under out_dir, or to `out` when none is given.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace flg
