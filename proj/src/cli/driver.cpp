// The batch pipeline: parse, resolve, type check, rewrite, validate, evaluate.

#include "flg/driver.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "flg/desugar.hpp"
#include "flg/parser.hpp"
#include "flg/smt.hpp"
#include "flg/typecheck.hpp"

namespace flg {
namespace fs = std::filesystem;

namespace {

std::unique_ptr<Program> finish_program(std::vector<SourceProgram> sources, Diagnostics& diags) {
  auto prog = std::make_unique<Program>(desugar(sources, diags));
  if (diags.has_errors()) return nullptr;
  if (!typecheck_program(*prog, diags)) return nullptr;
  rewrite_program(*prog);
  if (!validate_program(*prog, diags)) return nullptr;
  return prog;
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  ok = static_cast<bool>(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Resolves the solver only when a query is actually issued, so SMT-free
// programs run without one.
class LazyProcessBackend : public SmtBackend {
 public:
  LazyProcessBackend(std::string explicit_path, int sessions, std::string record_dir)
      : path_(std::move(explicit_path)), sessions_(sessions), record_(std::move(record_dir)) {}

  std::string dispatch(const SmtScript& s) override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (!inner_) {
        auto found = find_solver(path_);
        if (!found)
          throw RuntimeError("smt-unavailable",
                             path_.empty() ? "no SMT solver found (use --solver or FLG_SOLVER)"
                                           : "SMT solver " + path_ + " is not executable");
        inner_ = make_process_backend(*found, sessions_);
        if (!record_.empty()) inner_ = make_recording_backend(std::move(inner_), record_);
      }
    }
    return inner_->dispatch(s);
  }

  std::string name() const override { return inner_ ? inner_->name() : "process"; }

 private:
  std::string path_;
  int sessions_;
  std::string record_;
  std::mutex mu_;
  std::unique_ptr<SmtBackend> inner_;
};

std::string tsv_field(const Value& v) {
  // to_source already escapes tab and newline inside strings.
  return to_source(v);
}

}  // namespace

std::unique_ptr<Program> load_program(const std::vector<std::string>& paths, Diagnostics& diags) {
  std::vector<SourceProgram> sources;
  for (const auto& p : paths) {
    bool ok = false;
    std::string text = read_file(p, ok);
    if (!ok) {
      diags.error(SourceSpan{Symbol(p), 0, 0}, "io", "cannot read program file");
      return nullptr;
    }
    try {
      sources.push_back(parse_program(text, p));
    } catch (const DiagnosticError& e) {
      diags.add(e.diag);
      return nullptr;
    }
  }
  return finish_program(std::move(sources), diags);
}

std::unique_ptr<Program> load_program_text(const std::string& text, const std::string& name,
                                           Diagnostics& diags) {
  std::vector<SourceProgram> sources;
  try {
    sources.push_back(parse_program(text, name));
  } catch (const DiagnosticError& e) {
    diags.add(e.diag);
    return nullptr;
  }
  return finish_program(std::move(sources), diags);
}

bool ingest_facts(const Program& prog, Engine& engine, const std::string& dir, World& world,
                  Diagnostics& diags) {
  bool ok = true;
  for (Symbol p : prog.rel_order) {
    const RelDecl& rd = prog.rels.at(p);
    if (!rd.input) continue;
    fs::path file = fs::path(dir) / (p.str() + ".tsv");
    Symbol fname(file.string());
    std::ifstream in(file);
    if (!in) {
      diags.warning(SourceSpan{fname, 0, 0}, "facts",
                    "no fact file for input relation " + p.str() + "; it starts empty");
      continue;
    }
    Relation& rel = world.relation(p, static_cast<int>(rd.types.size()));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() && !rd.types.empty()) continue;
      std::vector<std::string> fields;
      if (!rd.types.empty()) {
        std::size_t start = 0;
        for (;;) {
          std::size_t tab = line.find('\t', start);
          fields.push_back(line.substr(start, tab - start));
          if (tab == std::string::npos) break;
          start = tab + 1;
        }
      }
      SourceSpan at{fname, lineno, 1};
      if (fields.size() != rd.types.size()) {
        diags.error(at, "facts", "relation " + p.str() + " has " + std::to_string(rd.types.size()) +
                                     " columns, line has " + std::to_string(fields.size()));
        ok = false;
        continue;
      }
      Tuple t;
      bool line_ok = true;
      for (std::size_t i = 0; i < fields.size() && line_ok; ++i) {
        try {
          SNodePtr node = parse_expression(fields[i], file.string(), lineno);
          Diagnostics local;
          ExprPtr e = resolve_closed(prog, *node, local);
          if (e && !check_closed_expr(prog, *e, rd.types[i], local)) e = nullptr;
          if (!e) {
            for (auto d : local.items()) {
              d.message = "column " + std::to_string(i + 1) + " of " + p.str() + ": " + d.message;
              if (d.span.line == 0) d.span = at;
              diags.add(d);
            }
            line_ok = false;
            break;
          }
          t.push_back(engine.eval_closed(*e, world));
        } catch (const DiagnosticError& e) {
          diags.add(e.diag);
          line_ok = false;
        } catch (const RuntimeError& e) {
          diags.error(at, e.rule, e.what());
          line_ok = false;
        }
      }
      if (!line_ok) {
        ok = false;
        continue;
      }
      rel.insert(std::move(t));
    }
  }
  return ok;
}

std::string dump_relation(const World& world, Symbol rel) {
  std::string out;
  const Relation* r = world.find(rel);
  if (!r) return out;
  for (const auto& t : r->sorted()) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += '\t';
      out += tsv_field(t[i]);
    }
    out += '\n';
  }
  return out;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Diagnostics diags;
  if (cfg.workers < 1) {
    err << "error: --workers must be at least 1\n";
    return kExitStatic;
  }
  if (cfg.timeout_ms && *cfg.timeout_ms < 1) {
    err << "error: --timeout-ms must be at least 1\n";
    return kExitStatic;
  }
  if (cfg.backend == "replay" && cfg.replay_dir.empty()) {
    err << "error: --backend replay needs --replay-dir\n";
    return kExitStatic;
  }
  if (cfg.backend != "process" && cfg.backend != "replay") {
    err << "error: unknown backend '" << cfg.backend << "'\n";
    return kExitStatic;
  }
  if (cfg.dump_smt && cfg.out_dir.empty()) {
    err << "error: --dump-smt needs --out\n";
    return kExitStatic;
  }

  std::unique_ptr<Program> prog = load_program(cfg.programs, diags);
  err << diags.render();
  if (!prog) return kExitStatic;

  std::unique_ptr<SmtBackend> backend;
  if (cfg.backend == "replay") backend = make_replay_backend(cfg.replay_dir);
  else backend = std::make_unique<LazyProcessBackend>(cfg.solver, cfg.workers, cfg.record_dir);
  SmtOptions sopts;
  sopts.default_timeout_ms = cfg.timeout_ms;
  if (cfg.dump_smt) sopts.dump_dir = (fs::path(cfg.out_dir) / "smt").string();
  std::unique_ptr<SmtSolver> smt;
  try {
    smt = std::make_unique<SmtSolver>(*prog, std::move(backend), sopts);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  EngineOptions eopts;
  eopts.workers = cfg.workers;
  eopts.mode = cfg.exceptions;
  eopts.semi_naive = !cfg.naive;
  eopts.check_types = cfg.check_types;
  Engine engine(*prog, smt.get(), eopts);

  World world;
  if (!cfg.facts_dir.empty()) {
    Diagnostics fd;
    bool ok = ingest_facts(*prog, engine, cfg.facts_dir, world, fd);
    err << fd.render();
    if (!ok) return kExitStatic;
  }

  auto report_warnings = [&] {
    for (const auto& w : smt->take_warnings()) err << "warning: smt: " << w << "\n";
  };
  try {
    engine.run(world);
  } catch (const RuntimeError& e) {
    report_warnings();
    Diagnostic d{Severity::Error, e.span, e.rule, e.what()};
    if (d.span.file.empty()) d.span.file = Symbol(cfg.programs.empty() ? "" : cfg.programs.front());
    err << d.render() << "\n";
    return kExitRuntime;
  }
  report_warnings();

  try {
    if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
    for (Symbol p : prog->rel_order) {
      if (prog->rels.at(p).input) continue;
      std::string dump = dump_relation(world, p);
      if (cfg.out_dir.empty()) {
        out << "== " << p.str() << " (" << world.size(p) << ")\n" << dump;
      } else {
        std::ofstream f(fs::path(cfg.out_dir) / (p.str() + ".tsv"), std::ios::binary);
        f << dump;
        if (!f) throw std::runtime_error("cannot write dump for " + p.str());
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  if (cfg.stats) {
    err << "relations:\n";
    for (Symbol p : prog->rel_order) err << "  " << p.str() << "\t" << world.size(p) << "\n";
    const auto& st = engine.stats();
    err << "strata: " << st.strata.size() << "\n";
    for (std::size_t i = 0; i < st.strata.size(); ++i) {
      const auto& s = st.strata[i];
      std::string rels;
      for (Symbol r : s.relations) rels += (rels.empty() ? "" : ",") + r.str();
      err << "  [" << i << "] " << rels << ": " << s.iterations << " iterations, " << s.derivations
          << " derivations, " << s.new_tuples << " new tuples\n";
    }
    err << "smt: " << smt->dispatches() << " dispatched, " << smt->memo_hits() << " memo hits\n";
    if (cfg.exceptions == ErrorMode::Soft) err << "soft failures: " << st.soft_drops << "\n";
  }
  return kExitOk;
}

}  // namespace flg
