#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "flg/ast.hpp"
#include "flg/value.hpp"

namespace flg {

enum class Verdict { Sat, Unsat, Unknown };
const char* verdict_name(Verdict v);

// One serialized check. The script is self-contained between (push 1) and
// (pop 1) and is sent after the session prelude.
struct SmtScript {
  std::string text;
  std::uint64_t key = 0;      // memo key: hash of the text minus its timeout line
  std::uint64_t content = 0;  // hash of the full text (transcripts, --dump-smt)
  bool want_model = false;
  std::vector<std::pair<std::string, Term>> vars;  // declared name -> SMT variable
};

// Session prelude sent once to every fresh solver process.
const std::string& smt_prelude();
std::uint64_t fnv1a(const std::string& bytes);
std::string hex16(std::uint64_t h);

class SmtSerializer {
 public:
  explicit SmtSerializer(const Program& prog) : prog_(prog) {}

  // Patterns that cannot be sent are dropped; one message per drop is added
  // to `warnings`.
  SmtScript serialize(const std::vector<Value>& assertions, bool want_model,
                      std::optional<std::int64_t> timeout_ms,
                      std::vector<std::string>* warnings = nullptr) const;

  // Sort expression for an SMT pre-type, e.g. `(_ BitVec 32)`, `(list Bool)`.
  std::string sort(const Type& t) const;
  // Declared name of an SMT variable: sanitized(name)!<hash>!<sort tag>.
  std::string var_name(const Term& var) const;

 private:
  const Program& prog_;
};

// Solver transport. `dispatch` sends one script and returns the raw reply:
// the verdict line, then (when requested and available) the model s-expression.
class SmtBackend {
 public:
  virtual ~SmtBackend() = default;
  virtual std::string dispatch(const SmtScript& script) = 0;
  virtual std::string name() const = 0;
};

// Explicit path, then $FLG_SOLVER, then `z3` on PATH.
std::optional<std::string> find_solver(const std::string& explicit_path = "");

std::unique_ptr<SmtBackend> make_process_backend(std::string solver_path, int sessions);
// Reads `<content-hash>.json` transcripts ({"request", "reply"}) from `dir`.
std::unique_ptr<SmtBackend> make_replay_backend(std::string dir);
// Forwards to `inner` and writes a transcript per dispatched script.
std::unique_ptr<SmtBackend> make_recording_backend(std::unique_ptr<SmtBackend> inner,
                                                   std::string dir);
// Propositional decision procedure over declared Bool constants by truth
// table. Only for testing the serializer and the operator plumbing.
std::unique_ptr<SmtBackend> make_truth_table_backend();

struct SmtReply {
  Verdict verdict = Verdict::Unknown;
  std::string model;  // raw model s-expression, empty if none
};
SmtReply parse_reply(const std::string& raw, bool want_model);

// Builds a model from the solver's (model ...) text. Bindings whose values
// cannot be represented (uninterpreted sort elements, arrays...) are omitted.
std::shared_ptr<const SmtModel> parse_model(const Program& prog, const std::string& text,
                                            const std::vector<std::pair<std::string, Term>>& vars);

struct SmtAnswer {
  Verdict verdict = Verdict::Unknown;
  std::shared_ptr<const SmtModel> model;
};

struct SmtOptions {
  std::string dump_dir;  // --dump-smt: every dispatched script lands here
  std::optional<std::int64_t> default_timeout_ms;  // when the operator gives none
};

// Memoizing front end shared by all evaluation workers.
class SmtSolver {
 public:
  SmtSolver(const Program& prog, std::unique_ptr<SmtBackend> backend, SmtOptions opts = {});

  SmtAnswer check(const std::vector<Value>& assertions, bool want_model,
                  std::optional<std::int64_t> timeout_ms);

  std::uint64_t dispatches() const { return dispatches_.load(); }
  std::uint64_t memo_hits() const { return memo_hits_.load(); }
  std::vector<std::string> take_warnings();
  const SmtBackend& backend() const { return *backend_; }

 private:
  const Program& prog_;
  SmtSerializer ser_;
  std::unique_ptr<SmtBackend> backend_;
  SmtOptions opts_;
  std::mutex mu_;
  std::unordered_map<std::uint64_t, std::shared_future<SmtAnswer>> memo_;
  std::vector<std::string> warnings_;
  std::atomic<std::uint64_t> dispatches_{0}, memo_hits_{0};
};

// The SMT interface operators. Unknown answers raise RuntimeError where the
// operator has no way to report them.
bool smt_is_sat(SmtSolver& s, const Value& phi);
bool smt_is_valid(SmtSolver& s, const Value& phi);
// timeout: `none` or `some(n)` with n > 0 (milliseconds)
Value smt_is_sat_opt(SmtSolver& s, const Value& formulas, const Value& timeout);
Value smt_get_model(SmtSolver& s, const Value& formulas, const Value& timeout);
Value smt_query_model(const Value& var, const Value& model);

}  // namespace flg
