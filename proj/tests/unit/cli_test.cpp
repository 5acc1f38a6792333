#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "testkit.hpp"

using namespace flg;
using flg::testkit::CliResult;
using flg::testkit::read_text;
using flg::testkit::run_cli;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name)
      : dir(fs::temp_directory_path() / ("flg-cli-" + std::to_string(::getpid()) + "-" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string write(const std::string& rel, const std::string& text) const {
    fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
};

const char* kClosure =
    "input edge(bv[32], bv[32])\noutput path(bv[32], bv[32])\n"
    "path(X, Y) :- edge(X, Y).\npath(X, Z) :- path(X, Y), edge(Y, Z).\n";

}  // namespace

TEST_CASE("facts from tab-separated files") {
  Workspace ws("facts");
  RunConfig cfg;
  cfg.programs = {ws.write("tc.flg", kClosure)};
  ws.write("facts/edge.tsv", "1\t2\n2\t3\n");
  cfg.facts_dir = (ws.dir / "facts").string();
  cfg.out_dir = (ws.dir / "out").string();
  CliResult r = run_cli(cfg);
  CHECK_MESSAGE(r.code == kExitOk, r.err);
  CHECK(read_text((ws.dir / "out/path.tsv").string()) == "1\t2\n1\t3\n2\t3\n");
  CHECK_FALSE(fs::exists(ws.dir / "out/edge.tsv"));  // inputs are not dumped
}

TEST_CASE("a missing fact file leaves the relation empty") {
  Workspace ws("missing");
  RunConfig cfg;
  cfg.programs = {ws.write("tc.flg", kClosure)};
  fs::create_directories(ws.dir / "facts");
  cfg.facts_dir = (ws.dir / "facts").string();
  CliResult r = run_cli(cfg);
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(r.out == "== path (0)\n");
}

TEST_CASE("ill-typed fact lines are rejected") {
  Workspace ws("badfact");
  RunConfig cfg;
  cfg.programs = {ws.write("p.flg", "type foo = | bar(bv[32])\ninput p(bv[32])\noutput q(bv[32])\nq(X) :- p(X).\n")};
  ws.write("facts/p.tsv", "bar(5)\n");
  cfg.facts_dir = (ws.dir / "facts").string();
  CliResult r = run_cli(cfg);
  CHECK(r.code == kExitStatic);
  CHECK(r.err.find("p.tsv:1") != std::string::npos);

  ws.write("facts/p.tsv", "1\t2\n");
  CHECK(run_cli(cfg).code == kExitStatic);
}

TEST_CASE("exit codes") {
  Workspace ws("codes");
  RunConfig ok;
  ok.programs = {ws.write("ok.flg", "output q(bv[32])\nq(1).\n")};
  CHECK(run_cli(ok).code == kExitOk);

  RunConfig runtime;
  runtime.programs = {ws.write("div.flg", "output q(bv[32])\nq(1 / 0).\n")};
  CliResult r = run_cli(runtime);
  CHECK(r.code == kExitRuntime);
  CHECK(r.err.find("op-domain") != std::string::npos);

  RunConfig syntax;
  syntax.programs = {ws.write("bad.flg", "output q(\n")};
  CHECK(run_cli(syntax).code == kExitStatic);

  RunConfig dump = ok;
  dump.dump_smt = true;  // needs --out
  CHECK(run_cli(dump).code == kExitStatic);

  RunConfig replay = ok;
  replay.backend = "replay";  // needs --replay-dir
  CHECK(run_cli(replay).code == kExitStatic);

  RunConfig nosolver;
  nosolver.programs = {ws.write("smt.flg", "output q(bool)\nq(B) :- B = is_sat(`#x[bool]`).\n")};
  nosolver.solver = (ws.dir / "no-such-solver").string();
  r = run_cli(nosolver);
  CHECK(r.code == kExitRuntime);
  CHECK(r.err.find("smt-unavailable") != std::string::npos);
}

TEST_CASE("programs split across files") {
  Workspace ws("split");
  RunConfig cfg;
  cfg.programs = {ws.write("a.flg", "type color = | red | green\noutput c(color)\n"),
                  ws.write("b.flg", "c(red).\nc(green).\n")};
  CliResult r = run_cli(cfg);
  CHECK_MESSAGE(r.code == kExitOk, r.err);
  CHECK(r.out == "== c (2)\ngreen\nred\n");
}

TEST_CASE("script dumps: one file per distinct query") {
  Workspace ws("dumpsmt");
  RunConfig cfg;
  cfg.programs = {ws.write("q.flg",
                           "output a(bool)\noutput b(bool)\noutput c(bool)\n"
                           "a(B) :- B = is_sat(`#x[bool]`).\n"
                           "b(B) :- B = is_sat(`#x[bool]`).\n"
                           "c(B) :- B = is_sat(`~#x[bool]`).\n")};
  cfg.out_dir = (ws.dir / "out").string();
  cfg.dump_smt = true;
  cfg.record_dir = (ws.dir / "rec").string();
  if (!find_solver()) {
    MESSAGE("no solver found; skipping");
    return;
  }
  CliResult r = run_cli(cfg);
  REQUIRE_MESSAGE(r.code == kExitOk, r.err);
  int n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(ws.dir / "out/smt")) ++n;
  CHECK(n == 2);

  // The recorded transcripts replay to the same dumps.
  RunConfig rep = cfg;
  rep.backend = "replay";
  rep.replay_dir = cfg.record_dir;
  rep.record_dir.clear();
  rep.dump_smt = false;
  rep.out_dir = (ws.dir / "out2").string();
  CliResult r2 = run_cli(rep);
  REQUIRE_MESSAGE(r2.code == kExitOk, r2.err);
  for (const char* rel : {"a.tsv", "b.tsv", "c.tsv"})
    CHECK(read_text((ws.dir / "out" / rel).string()) == read_text((ws.dir / "out2" / rel).string()));
}
