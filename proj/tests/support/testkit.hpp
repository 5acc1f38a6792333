#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "flg/driver.hpp"
#include "flg/smt.hpp"

namespace flg::testkit {

#ifndef FLG_SOURCE_DIR
#define FLG_SOURCE_DIR "."
#endif

inline std::string source_path(const std::string& rel) { return std::string(FLG_SOURCE_DIR) + "/" + rel; }

std::string read_text(const std::string& path);

struct Loaded {
  std::unique_ptr<Program> prog;
  std::string diagnostics;  // rendered errors and warnings
  explicit operator bool() const { return prog != nullptr; }
};
Loaded load(const std::string& text, const std::string& name = "test.flg");

// Every non-input relation, canonically sorted, in the CLI's stdout format.
std::string dump_world(const Program& prog, const World& world);

// Answers every query with a fixed verdict and remembers the scripts.
class CaptureBackend : public SmtBackend {
 public:
  explicit CaptureBackend(std::string reply = "sat") : reply_(std::move(reply)) {}
  std::string dispatch(const SmtScript& s) override;
  std::string name() const override { return "capture"; }
  std::vector<std::string> scripts() const;

 private:
  std::string reply_;
  mutable std::mutex mu_;
  std::vector<std::string> scripts_;
};

// Runs the CLI pipeline in-process; returns the exit code.
struct CliResult {
  int code = 0;
  std::string out, err;
};
CliResult run_cli(const RunConfig& cfg);

// ---- random programs ----------------------------------------------------------

// Plain stratified Datalog over bv[32]: at most 4 relations, 12 rules and
// 50 facts, with recursion, negation of lower relations and arithmetic filters.
std::string random_stratified_program(std::mt19937_64& rng);

// SMT-free programs that exercise the ML fragment: ADTs, lists, options,
// tuples, strings, 64-bit vectors, matches, lets, function calls and
// relations used as predicates. Generated to be well typed and free of
// runtime errors, so any rejection or hard error is a bug.
std::string random_ml_program(std::mt19937_64& rng);

}  // namespace flg::testkit
