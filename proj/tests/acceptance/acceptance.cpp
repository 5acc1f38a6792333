// Acceptance checks, one line per criterion:
//   [PASS] criterion N: <what> -- <detail> (<seconds> s, limit <L> s)
// Exit status is nonzero if any criterion fails.
//
// Solver-backed criteria always run against the committed transcripts
// (replay); when a solver is found (FLG_SOLVER or z3 on PATH) they also run
// live. Set FLG_ACCEPTANCE_LIVE=0 to skip the live half.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "flg/engine.hpp"
#include "flg/typecheck.hpp"
#include "testkit.hpp"

namespace fs = std::filesystem;
using namespace flg;
using namespace flg::testkit;

namespace {

// Pinned limits and sizes.
constexpr double kLimitFixtures = 10.0;
constexpr double kLimitSymexec = 30.0;
constexpr double kLimitPreservation = 60.0;
constexpr double kLimitSemiNaive = 60.0;
constexpr double kLimitWorkers = 60.0;
constexpr double kLimitUnify = 10.0;
constexpr int kPreservationPrograms = 1000;
constexpr int kSemiNaivePrograms = 500;
constexpr int kWorkerPrograms = 60;
constexpr int kGoldenMinimum = 10;
constexpr int kTruthTableFormulas = 200;
constexpr int kTruthTableVars = 4;
constexpr int kUnifyCases = 10000;
constexpr std::uint64_t kSeed = 0x5eed2024;

struct Check {
  bool ok = true;
  std::ostringstream why;
  void fail(const std::string& msg) {
    if (ok) why << msg;  // keep the first failure; it is usually the informative one
    ok = false;
  }
  void expect(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
  }
};

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("flg-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::optional<std::string> live_solver() {
  if (const char* v = std::getenv("FLG_ACCEPTANCE_LIVE"); v && std::string(v) == "0") return std::nullopt;
  return find_solver();
}

std::map<std::string, std::string> read_dir(const fs::path& d) {
  std::map<std::string, std::string> out;
  if (!fs::is_directory(d)) return out;
  for (const auto& e : fs::directory_iterator(d))
    if (e.is_regular_file()) out[e.path().filename().string()] = read_text(e.path().string());
  return out;
}

// Runs `program` (with optional facts) and compares the dump directory with
// `expected`. `mode` is "replay" or "live".
void run_and_compare(Check& c, const std::string& label, const std::string& program, const std::string& facts,
                     const fs::path& fixture, const std::string& mode, std::map<std::string, std::string>* dumps) {
  RunConfig cfg;
  cfg.programs = {program};
  cfg.facts_dir = facts;
  fs::path out = scratch() / (label + "-" + mode);
  fs::remove_all(out);
  cfg.out_dir = out.string();
  if (mode == "replay") {
    cfg.backend = "replay";
    cfg.replay_dir = (fixture / "replay").string();
  } else {
    cfg.solver = *live_solver();
  }
  CliResult r = run_cli(cfg);
  if (r.code != 0) {
    c.fail(label + " (" + mode + ") exited " + std::to_string(r.code) + ": " + r.err);
    return;
  }
  auto got = read_dir(out);
  auto want = read_dir(fixture / "expected");
  if (want.empty()) c.fail(label + ": no expected dumps committed");
  if (got != want) c.fail(label + " (" + mode + "): dumps differ from " + (fixture / "expected").string());
  if (dumps) *dumps = got;
}

template <class F>
bool timed(int n, const std::string& what, double limit, F body) {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.fail(std::string("unexpected exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= limit) {
    std::ostringstream m;
    m << "took " << secs << " s";
    c.fail(m.str());
  }
  std::string detail = c.why.str();
  std::printf("[%s] criterion %d: %s -- %s (%.2f s, limit %.0f s)\n", c.ok ? "PASS" : "FAIL", n, what.c_str(),
              detail.c_str(), secs, limit);
  std::fflush(stdout);
  return c.ok;
}

// ---- 1 -----------------------------------------------------------------------

void paper_fixtures(Check& c) {
  const fs::path dir = source_path("tests/fixtures/paper");
  {
    RunConfig cfg;
    cfg.programs = {(dir / "example1_reject.flg").string()};
    CliResult r = run_cli(cfg);
    c.expect(r.code == kExitStatic, "example 1 was not rejected (exit " + std::to_string(r.code) + ")");
    c.expect(r.err.find("e-Fun") != std::string::npos, "example 1 diagnostic lacks e-Fun: " + r.err);
  }
  std::vector<std::string> modes = {"replay"};
  if (live_solver()) modes.push_back("live");
  for (const auto& mode : modes) {
    for (const char* name : {"example2_accept", "explosion", "foo_bar", "cons_model"}) {
      std::map<std::string, std::string> dumps;
      run_and_compare(c, name, (dir / (std::string(name) + ".flg")).string(), "", dir / name, mode, &dumps);
      if (std::string(name) == "cons_model") {
        c.expect(dumps["head.tsv"] == "true\n", "cons model: head element is not true");
      } else if (std::string(name) == "explosion") {
        c.expect(dumps["explosion.tsv"] == "\n" && dumps["ok.tsv"] == "\n", "explosion: ok not derived");
      } else {
        c.expect(dumps["ok.tsv"] == "\n", std::string(name) + ": ok not derived");
      }
    }
  }
  if (c.ok) {
    c.why << "example 1 rejected at e-Fun; example 2, explosion, foo/bar, cons-model derive as expected ("
          << (modes.size() > 1 ? "replay + live" : "replay only; no solver found") << ")";
  }
}

// ---- 2 -----------------------------------------------------------------------

void symexec(Check& c) {
  const fs::path dir = source_path("tests/fixtures/symexec");
  const std::string prog = (dir / "symexec.flg").string();
  std::vector<std::string> modes = {"replay"};
  if (live_solver()) modes.push_back("live");
  for (const auto& mode : modes) {
    for (const char* cfg : {"safe", "wraparound"}) {
      std::map<std::string, std::string> dumps;
      run_and_compare(c, std::string("symexec-") + cfg, prog, (dir / cfg).string(), dir / cfg, mode, &dumps);
      const std::string& failed = dumps["failed.tsv"];
      if (std::string(cfg) == "safe") c.expect(failed.empty(), "safe program: failed is not empty");
      else c.expect(!failed.empty(), "wraparound program: failed is empty");
      c.expect(dumps["reached.tsv"].rfind("0\t", 0) == 0 &&
                   dumps["reached.tsv"].find("\tsome(10)\n") != std::string::npos,
               std::string(cfg) + ": entry state with fuel 10 missing");
    }
  }
  if (c.ok)
    c.why << "safe: failed empty; wraparound: failed nonempty; fuel 10 ("
          << (modes.size() > 1 ? "replay + live" : "replay only; no solver found") << ")";
}

// ---- 3 -----------------------------------------------------------------------

void preservation(Check& c) {
  std::mt19937_64 rng(kSeed);
  int hard = 0, rejected = 0, strata_checked = 0, violations = 0;
  std::uint64_t tuples = 0;
  for (int i = 0; i < kPreservationPrograms; ++i) {
    std::string text = random_ml_program(rng);
    Loaded l = load(text, "gen" + std::to_string(i) + ".flg");
    if (!l) {
      if (!rejected++) c.fail("generated program " + std::to_string(i) + " rejected:\n" + l.diagnostics + text);
      continue;
    }
    const Program& prog = *l.prog;
    EngineOptions opts;
    opts.after_stratum = [&](const Stratum&, const World& w) {
      ++strata_checked;
      for (Symbol p : prog.rel_order) {
        const Relation* r = w.find(p);
        if (!r) continue;
        const auto& types = prog.rels.at(p).types;
        for (const auto& t : r->rows())
          for (std::size_t k = 0; k < t.size(); ++k)
            if (!value_has_type(prog, t[k], types[k])) {
              if (!violations++)
                c.fail("program " + std::to_string(i) + ": " + p.str() + " holds " + to_source(t[k]) +
                       " not of type " + type_to_string(types[k]));
            }
      }
    };
    Engine eng(prog, nullptr, opts);
    World w;
    try {
      eng.run(w);
    } catch (const RuntimeError& e) {
      if (!hard++) c.fail("program " + std::to_string(i) + ": hard error " + e.rule + ": " + e.what() + "\n" + text);
      continue;
    }
    for (Symbol p : prog.rel_order) tuples += w.size(p);
  }
  c.expect(hard == 0 && rejected == 0 && violations == 0, "");
  if (c.ok)
    c.why << kPreservationPrograms << " programs, " << strata_checked << " strata checked, " << tuples
          << " tuples, 0 hard errors, 0 typing violations";
}

// ---- 4 -----------------------------------------------------------------------

void semi_naive(Check& c) {
  std::mt19937_64 rng(kSeed + 4);
  int recursive = 0, negated = 0;
  std::uint64_t tuples = 0;
  for (int i = 0; i < kSemiNaivePrograms && c.ok; ++i) {
    std::string text = random_stratified_program(rng);
    Loaded l = load(text, "strat" + std::to_string(i) + ".flg");
    if (!l) {
      c.fail("generated program " + std::to_string(i) + " rejected:\n" + l.diagnostics + text);
      break;
    }
    for (const auto& s : l.prog->strata) recursive += s.recursive;
    negated += text.find('!') != std::string::npos && text.find(":-") != std::string::npos;
    EngineOptions a, b;
    b.semi_naive = false;
    World wa, wb;
    Engine(*l.prog, nullptr, a).run(wa);
    Engine(*l.prog, nullptr, b).run(wb);
    if (!wa.same_facts(wb) || dump_world(*l.prog, wa) != dump_world(*l.prog, wb)) {
      c.fail("program " + std::to_string(i) + ": semi-naive and naive disagree\n" + text);
      break;
    }
    for (Symbol p : l.prog->rel_order) tuples += wa.size(p);
  }
  if (c.ok)
    c.why << kSemiNaivePrograms << " programs agree (" << recursive << " recursive strata, " << negated
          << " programs with negation, " << tuples << " tuples)";
}

// ---- 5 -----------------------------------------------------------------------

std::string transitive_closure_program() {
  std::mt19937_64 rng(kSeed + 5);
  std::ostringstream s;
  s << "output edge(bv[32], bv[32])\noutput path(bv[32], bv[32])\n"
       "output far(bv[32])\n"
       "path(X, Y) :- edge(X, Y).\npath(X, Z) :- path(X, Y), edge(Y, Z).\n"
       "far(X) :- path(0, X), !edge(0, X).\n";
  for (int i = 0; i < 400; ++i)
    s << "edge(" << std::uniform_int_distribution<int>(0, 60)(rng) << ", "
      << std::uniform_int_distribution<int>(0, 60)(rng) << ").\n";
  return s.str();
}

void workers(Check& c) {
  int compared = 0;
  auto compare_engine = [&](const std::string& text, const std::string& label) {
    Loaded l = load(text, label);
    if (!l) {
      c.fail(label + " rejected: " + l.diagnostics);
      return;
    }
    std::string dumps[2];
    int i = 0;
    for (int n : {1, 8}) {
      EngineOptions o;
      o.workers = n;
      World w;
      Engine(*l.prog, nullptr, o).run(w);
      dumps[i++] = dump_world(*l.prog, w);
    }
    c.expect(dumps[0] == dumps[1], label + ": 1 and 8 workers disagree");
    ++compared;
  };
  compare_engine(transitive_closure_program(), "closure.flg");
  std::mt19937_64 rng(kSeed + 55);
  for (int i = 0; i < kWorkerPrograms; ++i) {
    compare_engine(random_ml_program(rng), "ml" + std::to_string(i));
    compare_engine(random_stratified_program(rng), "strat" + std::to_string(i));
  }

  // Solver-backed fixtures through the CLI, replayed.
  const fs::path fx = source_path("tests/fixtures");
  struct Case {
    fs::path prog, facts, replay;
  };
  std::vector<Case> cases = {
      {fx / "symexec/symexec.flg", fx / "symexec/safe", fx / "symexec/safe/replay"},
      {fx / "symexec/symexec.flg", fx / "symexec/wraparound", fx / "symexec/wraparound/replay"},
  };
  for (const char* n : {"example2_accept", "explosion", "foo_bar", "cons_model"})
    cases.push_back({fx / "paper" / (std::string(n) + ".flg"), "", fx / "paper" / n / "replay"});
  for (const auto& k : cases) {
    std::string outs[2];
    int i = 0;
    for (int n : {1, 8}) {
      RunConfig cfg;
      cfg.programs = {k.prog.string()};
      cfg.facts_dir = k.facts.string();
      cfg.workers = n;
      cfg.backend = "replay";
      cfg.replay_dir = k.replay.string();
      CliResult r = run_cli(cfg);
      c.expect(r.code == 0, k.prog.string() + " failed with " + std::to_string(n) + " workers: " + r.err);
      outs[i++] = r.out;
    }
    c.expect(!outs[0].empty() && outs[0] == outs[1], k.prog.string() + ": 1 and 8 workers disagree");
    ++compared;
  }
  if (c.ok) c.why << compared << " programs byte-identical with 1 and 8 workers";
}

// ---- 6 -----------------------------------------------------------------------

void validation(Check& c) {
  const fs::path dir = source_path("tests/fixtures/invalid");
  for (auto [file, rule] : {std::pair{"negation_through_call.flg", "prog-WF"},
                            std::pair{"range_restriction.flg", "H-Clause"}}) {
    RunConfig cfg;
    cfg.programs = {(dir / file).string()};
    CliResult r = run_cli(cfg);
    c.expect(r.code == 1, std::string(file) + ": exit " + std::to_string(r.code) + ", expected 1");
    c.expect(r.err.find(std::string(": ") + rule + ":") != std::string::npos,
             std::string(file) + ": diagnostic does not name " + rule + ": " + r.err);
  }
  if (c.ok) c.why << "negation cycle through a function call -> prog-WF; unbound head variable -> H-Clause; both exit 1";
}

// ---- 7 -----------------------------------------------------------------------

// Random propositional formula over x0..x{n-1}, evaluated directly.
struct Prop {
  enum K { Var, Const, Not, And, Or, Imp, Iff, Ite } k;
  int var = 0;
  bool val = false;
  std::vector<Prop> kids;

  bool eval(unsigned env) const {
    switch (k) {
      case Var: return (env >> var) & 1u;
      case Const: return val;
      case Not: return !kids[0].eval(env);
      case And: return kids[0].eval(env) && kids[1].eval(env);
      case Or: return kids[0].eval(env) || kids[1].eval(env);
      case Imp: return !kids[0].eval(env) || kids[1].eval(env);
      case Iff: return kids[0].eval(env) == kids[1].eval(env);
      case Ite: return kids[0].eval(env) ? kids[1].eval(env) : kids[2].eval(env);
    }
    return false;
  }

  Value term() const {
    switch (k) {
      case Var: return smt_var(mk_string("x" + std::to_string(var)), t_bool());
      case Const: return smt_const(mk_bool(val));
      case Not: return mk_smt(SmtOp::Not, {kids[0].term()});
      case And: return mk_smt(SmtOp::And, {kids[0].term(), kids[1].term()});
      case Or: return mk_smt(SmtOp::Or, {kids[0].term(), kids[1].term()});
      case Imp: return mk_smt(SmtOp::Imp, {kids[0].term(), kids[1].term()});
      case Iff: return mk_smt(SmtOp::Iff, {kids[0].term(), kids[1].term()});
      case Ite: return mk_smt(SmtOp::Ite, {kids[0].term(), kids[1].term(), kids[2].term()});
    }
    return nullptr;
  }
};

Prop random_prop(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> kind(depth <= 0 ? 0 : 0, depth <= 0 ? 1 : 7);
  Prop p{static_cast<Prop::K>(kind(rng))};
  if (p.k == Prop::Const && std::bernoulli_distribution(0.6)(rng)) p.k = Prop::Var;
  if (p.k == Prop::Var) p.var = std::uniform_int_distribution<int>(0, kTruthTableVars - 1)(rng);
  if (p.k == Prop::Const) p.val = std::bernoulli_distribution(0.5)(rng);
  int n = p.k == Prop::Not ? 1 : p.k == Prop::Ite ? 3 : p.k >= Prop::And ? 2 : 0;
  for (int i = 0; i < n; ++i) p.kids.push_back(random_prop(rng, depth - 1));
  return p;
}

void smt_interface(Check& c) {
  // Golden serializations.
  int golden = 0;
  std::set<std::string> stems;
  for (const auto& e : fs::directory_iterator(source_path("tests/golden")))
    if (e.path().extension() == ".flg") stems.insert(e.path().stem().string());
  for (const auto& stem : stems) {
    fs::path base = fs::path(source_path("tests/golden")) / stem;
    Loaded l = load(read_text(base.string() + ".flg"), stem + ".flg");
    if (!l) {
      c.fail(stem + " rejected: " + l.diagnostics);
      continue;
    }
    auto capture = std::make_unique<CaptureBackend>("sat");
    CaptureBackend* cap = capture.get();
    SmtSolver solver(*l.prog, std::move(capture));
    World w;
    Engine(*l.prog, &solver).run(w);
    auto scripts = cap->scripts();
    std::string want = read_text(base.string() + ".smt2");
    c.expect(scripts.size() == 1 && scripts[0] == want, stem + ": serialization differs from golden file");
    if (auto z3 = live_solver()) {
      SmtSolver live(*l.prog, make_process_backend(*z3, 1));
      World lw;
      try {
        Engine(*l.prog, &live).run(lw);
      } catch (const RuntimeError& e) {
        c.fail(stem + ": live solver rejected the script: " + e.what());
      }
    }
    ++golden;
  }
  c.expect(golden >= kGoldenMinimum, "only " + std::to_string(golden) + " golden queries");

  // Memoization: the same query issued from two rules is dispatched once.
  {
    Loaded l = load("output a\noutput b\n"
                    "a :- is_sat(`#x[bool] /\\ ~#y[bool]`) = true.\n"
                    "b :- is_sat(`#x[bool] /\\ ~#y[bool]`) = true.\n");
    c.expect(bool(l), "memo program rejected: " + l.diagnostics);
    if (l) {
      SmtSolver solver(*l.prog, std::make_unique<CaptureBackend>("sat"));
      World w;
      Engine(*l.prog, &solver).run(w);
      c.expect(solver.dispatches() == 1 && solver.memo_hits() == 1,
               "memo: " + std::to_string(solver.dispatches()) + " dispatches, " +
                   std::to_string(solver.memo_hits()) + " hits");
      c.expect(w.size(Symbol("a")) == 1 && w.size(Symbol("b")) == 1, "memo: a/b not derived");
    }
  }

  // is_valid against a truth-table oracle.
  {
    Loaded l = load("");
    SmtSolver oracle(*l.prog, make_truth_table_backend());
    std::unique_ptr<SmtSolver> live;
    if (auto z3 = live_solver()) live = std::make_unique<SmtSolver>(*l.prog, make_process_backend(*z3, 1));
    std::mt19937_64 rng(kSeed + 7);
    int valid = 0;
    for (int i = 0; i < kTruthTableFormulas; ++i) {
      Prop p = random_prop(rng, std::uniform_int_distribution<int>(1, 5)(rng));
      bool truth = true, some = false;
      for (unsigned env = 0; env < (1u << kTruthTableVars); ++env) {
        bool v = p.eval(env);
        truth = truth && v;
        some = some || v;
      }
      Value phi = p.term();
      bool got = smt_is_valid(oracle, phi);
      bool sat = smt_is_sat(oracle, phi);
      if (got != truth || sat != some) {
        c.fail("truth table disagrees on " + to_source(phi));
        break;
      }
      if (live && smt_is_valid(*live, phi) != truth) {
        c.fail("live solver disagrees on validity of " + to_source(phi));
        break;
      }
      valid += truth;
    }
    if (c.ok)
      c.why << golden << " golden scripts match; twice-issued query dispatched once; is_valid agrees on "
            << kTruthTableFormulas << " formulas (" << valid << " valid)" << (live ? ", live solver agrees" : "");
  }
}

// ---- 8 -----------------------------------------------------------------------

struct UGen {
  std::mt19937_64& rng;
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  Term ground(int depth) {
    int k = pick(0, depth <= 0 ? 2 : 4);
    switch (k) {
      case 0: return mk_ctor(Symbol("a"));
      case 1: return mk_bv32(pick(0, 2));
      case 2: return mk_ctor(Symbol("b"));
      case 3: return mk_ctor(Symbol("g"), {ground(depth - 1)});
      default: return mk_ctor(Symbol("f"), {ground(depth - 1), ground(depth - 1)});
    }
  }
  Term open(int depth) {
    int k = pick(0, depth <= 0 ? 3 : 5);
    switch (k) {
      case 0: return mk_var(Symbol("X" + std::to_string(pick(0, 3))));
      case 1: return mk_bv32(pick(0, 2));
      case 2: return mk_ctor(Symbol("a"));
      case 3: return mk_var(Symbol("X" + std::to_string(pick(0, 3))));
      case 4: return mk_ctor(Symbol("g"), {open(depth - 1)});
      default: return mk_ctor(Symbol("f"), {open(depth - 1), open(depth - 1)});
    }
  }
  // An instance of `u`: variables replaced consistently by ground terms.
  Term instance(const Term& u, std::map<Symbol, Term>& m) {
    if (u->kind == TermKind::Var) {
      auto it = m.find(u->sym);
      if (it == m.end()) it = m.emplace(u->sym, ground(2)).first;
      return it->second;
    }
    if (u->kind != TermKind::Ctor || u->args.empty()) return u;
    std::vector<Term> args;
    for (const auto& a : u->args) args.push_back(instance(a, m));
    return mk_ctor(u->sym, std::move(args));
  }
};

// Reference matcher: pattern p against ground g.
bool ref_match(const Term& p, const Term& g, std::map<Symbol, Term>& m) {
  if (p->kind == TermKind::Var) {
    auto it = m.find(p->sym);
    if (it != m.end()) return term_equal(it->second, g);
    m.emplace(p->sym, g);
    return true;
  }
  if (p->kind != g->kind) return false;
  if (p->kind != TermKind::Ctor) return term_equal(p, g);
  if (p->sym != g->sym || p->args.size() != g->args.size()) return false;
  for (std::size_t i = 0; i < p->args.size(); ++i)
    if (!ref_match(p->args[i], g->args[i], m)) return false;
  return true;
}

void unification(Check& c) {
  std::mt19937_64 rng(kSeed + 8);
  UGen gen{rng};
  int successes = 0, failures = 0, errors = 0, clashes = 0;
  for (int i = 0; i < kUnifyCases && c.ok; ++i) {
    Substitution theta;
    for (int v = 0; v < 4; ++v)
      if (gen.pick(0, 3) == 0) theta.bind(Symbol("X" + std::to_string(v)), gen.ground(2));
    Term u1 = gen.open(3);
    Term u2;
    switch (gen.pick(0, 3)) {
      case 0: {
        std::map<Symbol, Term> m;
        u2 = gen.instance(u1, m);
        break;
      }
      case 1: u2 = gen.ground(3); break;
      default: u2 = gen.open(3); break;
    }
    if (gen.pick(0, 1)) std::swap(u1, u2);

    const Term a = theta.apply(u1), b = theta.apply(u2);
    const bool both_open = !is_ground(a) && !is_ground(b);
    Substitution th = theta;
    const std::size_t before = th.size();
    bool ok = false, threw = false;
    try {
      ok = unify_terms(th, u1, u2);
    } catch (const RuntimeError& e) {
      threw = true;
      if (e.rule != "uu-FF") c.fail("case " + std::to_string(i) + ": error " + e.rule + " instead of uu-FF");
    }
    const std::string shown = to_source(a) + " ~ " + to_source(b);
    if (threw != both_open) {
      c.fail("case " + std::to_string(i) + ": uu-FF " + (threw ? "raised" : "not raised") + " for " + shown);
      break;
    }
    if (threw) {
      ++errors;
      continue;
    }
    // Reference outcome: one side is ground under theta.
    std::map<Symbol, Term> m;
    bool expect = is_ground(a) ? ref_match(b, a, m) : ref_match(a, b, m);
    if (ok != expect) {
      c.fail("case " + std::to_string(i) + ": unify says " + (ok ? "yes" : "no") + " for " + shown);
      break;
    }
    if (ok) {
      ++successes;
      // Soundness: the extended substitution equates both sides and keeps theta.
      if (!th.ground_under(u1) || !th.ground_under(u2) || !term_equal(th.apply(u1), th.apply(u2))) {
        c.fail("case " + std::to_string(i) + ": unifier does not equate " + shown);
        break;
      }
      for (std::size_t k = 0; k < before; ++k)
        if (!term_equal(*th.find(theta.entries()[k].first), theta.entries()[k].second)) {
          c.fail("case " + std::to_string(i) + ": unifier rebound a variable");
          break;
        }
    } else {
      ++failures;
      bool clash = a->kind == TermKind::Ctor && b->kind == TermKind::Ctor && a->sym != b->sym;
      clashes += clash;
    }
  }
  c.expect(clashes > 0 && errors > 0 && successes > 0, "generator did not cover every outcome");
  if (c.ok)
    c.why << kUnifyCases << " cases: " << successes << " unified soundly, " << failures << " failed (" << clashes
          << " constructor clashes, none raised), " << errors << " uu-FF exactly when both sides open";
}

}  // namespace

int main() {
  bool all = true;
  all &= timed(1, "paper fixtures", kLimitFixtures, paper_fixtures);
  all &= timed(2, "symbolic evaluator", kLimitSymexec, symexec);
  all &= timed(3, "type preservation on generated programs", kLimitPreservation, preservation);
  all &= timed(4, "semi-naive equals naive", kLimitSemiNaive, semi_naive);
  all &= timed(5, "deterministic parallel output", kLimitWorkers, workers);
  all &= timed(6, "validation errors", 10.0, validation);
  all &= timed(7, "SMT interface", 60.0, smt_interface);
  all &= timed(8, "unification properties", kLimitUnify, unification);
  fs::remove_all(scratch());
  return all ? 0 : 1;
}
