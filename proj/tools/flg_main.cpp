// flg: batch interpreter front end.

#include <iostream>

#include <CLI11.hpp>

#include "flg/driver.hpp"

int main(int argc, char** argv) {
  flg::RunConfig cfg;
  CLI::App app{"Evaluate a program of Datalog rules, ML functions and SMT formulas."};
  app.add_option("programs", cfg.programs, "program files (.flg), concatenated in order")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--facts", cfg.facts_dir, "directory with <relation>.tsv files for input relations");
  app.add_option("--out", cfg.out_dir, "directory for <relation>.tsv dumps (default: stdout)");
  app.add_option("--workers", cfg.workers, "evaluation workers and solver sessions")
      ->check(CLI::PositiveNumber);
  app.add_option("--solver", cfg.solver, "SMT solver executable (default: $FLG_SOLVER, then z3 on PATH)");
  app.add_option("--backend", cfg.backend, "process or replay")
      ->check(CLI::IsMember({"process", "replay"}));
  app.add_option("--replay-dir", cfg.replay_dir, "transcript directory for --backend replay");
  app.add_option("--record-dir", cfg.record_dir, "write a transcript for every solver query here");
  std::int64_t timeout = 0;
  auto* to = app.add_option("--timeout-ms", timeout, "solver timeout per query")
                 ->check(CLI::PositiveNumber);
  std::string mode = "hard";
  app.add_option("--exceptions", mode, "hard: abort on a runtime error; soft: drop the derivation")
      ->check(CLI::IsMember({"hard", "soft"}));
  app.add_flag("--dump-smt", cfg.dump_smt, "write every dispatched script to <out>/smt/<hash>.smt2");
  app.add_flag("--stats", cfg.stats, "print relation sizes and solver statistics");
  app.add_flag("--naive", cfg.naive, "use the naive reference fixpoint");
  app.add_flag("--check-types", cfg.check_types, "check derived tuples against relation types");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : flg::kExitStatic;
  }
  if (*to) cfg.timeout_ms = timeout;
  cfg.exceptions = mode == "soft" ? flg::ErrorMode::Soft : flg::ErrorMode::Hard;
  return flg::run(cfg, std::cout, std::cerr);
}
