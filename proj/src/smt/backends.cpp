// Solver transports: a pool of solver processes, transcript replay and
// recording, and a truth-table decision procedure for propositional scripts.

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "flg/smt.hpp"
#include "smt/sexpr.hpp"

namespace flg {
namespace fs = std::filesystem;

std::optional<std::string> find_solver(const std::string& explicit_path) {
  auto usable = [](const std::string& p) { return !p.empty() && ::access(p.c_str(), X_OK) == 0; };
  if (!explicit_path.empty()) {
    if (usable(explicit_path)) return explicit_path;
    return std::nullopt;
  }
  if (const char* env = std::getenv("FLG_SOLVER"); env && usable(env)) return std::string(env);
  if (const char* path = std::getenv("PATH")) {
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      std::string cand = (dir.empty() ? "." : dir) + "/z3";
      if (usable(cand)) return cand;
    }
  }
  return std::nullopt;
}

namespace {

// One solver process speaking SMT-LIB over pipes.
class Session {
 public:
  explicit Session(const std::string& path) {
    int in[2], out[2];
    if (::pipe(in) != 0 || ::pipe(out) != 0)
      throw RuntimeError("smt-backend", std::string("pipe: ") + std::strerror(errno));
    pid_ = ::fork();
    if (pid_ < 0) throw RuntimeError("smt-backend", std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(in[0], 0);
      ::dup2(out[1], 1);
      int devnull = ::open("/dev/null", O_WRONLY);
      if (devnull >= 0) ::dup2(devnull, 2);
      ::close(in[0]);
      ::close(in[1]);
      ::close(out[0]);
      ::close(out[1]);
      ::execl(path.c_str(), path.c_str(), "-in", static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(in[0]);
    ::close(out[1]);
    to_ = in[1];
    from_ = out[0];
    ::fcntl(to_, F_SETFD, FD_CLOEXEC);
    ::fcntl(from_, F_SETFD, FD_CLOEXEC);
    write_all(smt_prelude());
  }

  ~Session() {
    if (to_ >= 0) {
      static const std::string bye = "(exit)\n";
      [[maybe_unused]] auto n = ::write(to_, bye.data(), bye.size());
      ::close(to_);
    }
    if (from_ >= 0) ::close(from_);
    if (pid_ > 0) {
      int status = 0;
      if (::waitpid(pid_, &status, WNOHANG) == 0) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
      }
    }
  }

  std::string run(const SmtScript& s) {
    write_all(s.text);
    std::string reply = read_expr();
    if (s.want_model) reply += "\n" + read_expr();
    return reply;
  }

 private:
  void write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(to_, data.data() + off, data.size() - off);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw RuntimeError("smt-backend", "solver process closed its input");
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_expr() {
    for (;;) {
      std::size_t len = sexpr::complete_prefix(buf_);
      if (len != std::string::npos) {
        std::string e = buf_.substr(0, len);
        buf_.erase(0, len);
        std::size_t first = e.find_first_not_of(" \t\r\n");
        return first == std::string::npos ? e : e.substr(first);
      }
      char chunk[4096];
      ssize_t n = ::read(from_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw RuntimeError("smt-backend", "solver process terminated unexpectedly");
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  pid_t pid_ = -1;
  int to_ = -1, from_ = -1;
  std::string buf_;
};

class ProcessBackend : public SmtBackend {
 public:
  ProcessBackend(std::string path, int sessions)
      : path_(std::move(path)), max_(sessions < 1 ? 1 : sessions) {
    ::signal(SIGPIPE, SIG_IGN);
  }

  std::string dispatch(const SmtScript& s) override {
    std::unique_ptr<Session> sess = acquire();
    try {
      std::string r = sess->run(s);
      if (r.rfind("(error", 0) == 0) throw RuntimeError("smt-protocol", "solver error: " + r);
      release(std::move(sess));
      return r;
    } catch (...) {
      // A session in an unknown state is discarded, never reused.
      sess.reset();
      std::lock_guard<std::mutex> lock(mu_);
      --live_;
      cv_.notify_one();
      throw;
    }
  }

  std::string name() const override { return "process:" + path_; }

 private:
  std::unique_ptr<Session> acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return !idle_.empty() || live_ < max_; });
    if (!idle_.empty()) {
      auto s = std::move(idle_.back());
      idle_.pop_back();
      return s;
    }
    ++live_;
    lock.unlock();
    try {
      return std::make_unique<Session>(path_);
    } catch (...) {
      std::lock_guard<std::mutex> relock(mu_);
      --live_;
      throw;
    }
  }

  void release(std::unique_ptr<Session> s) {
    std::lock_guard<std::mutex> lock(mu_);
    idle_.push_back(std::move(s));
    cv_.notify_one();
  }

  std::string path_;
  int max_;
  int live_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<Session>> idle_;
};

fs::path transcript_path(const std::string& dir, const SmtScript& s) {
  return fs::path(dir) / (hex16(s.content) + ".json");
}

class ReplayBackend : public SmtBackend {
 public:
  explicit ReplayBackend(std::string dir) : dir_(std::move(dir)) {}

  std::string dispatch(const SmtScript& s) override {
    fs::path p = transcript_path(dir_, s);
    std::ifstream in(p);
    if (!in)
      throw RuntimeError("smt-replay", "no transcript " + p.string() + " for this query");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw RuntimeError("smt-replay", "bad transcript " + p.string() + ": " + e.what());
    }
    if (j.value("request", std::string()) != s.text)
      throw RuntimeError("smt-replay", "transcript " + p.string() + " records a different query");
    return j.value("reply", std::string());
  }

  std::string name() const override { return "replay:" + dir_; }

 private:
  std::string dir_;
};

class RecordingBackend : public SmtBackend {
 public:
  RecordingBackend(std::unique_ptr<SmtBackend> inner, std::string dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }

  std::string dispatch(const SmtScript& s) override {
    std::string reply = inner_->dispatch(s);
    nlohmann::ordered_json j;
    j["request"] = s.text;
    j["reply"] = reply;
    std::ofstream out(transcript_path(dir_, s));
    out << j.dump(2) << "\n";
    return reply;
  }

  std::string name() const override { return "record:" + inner_->name(); }

 private:
  std::unique_ptr<SmtBackend> inner_;
  std::string dir_;
};

// Brute force over the declared Bool constants. Anything beyond
// propositional logic is answered `unknown`.
class TruthTableBackend : public SmtBackend {
 public:
  std::string dispatch(const SmtScript& s) override {
    std::vector<sexpr::Node> cmds;
    try {
      cmds = sexpr::parse_all(s.text);
    } catch (const std::exception&) {
      return "unknown";
    }
    std::vector<std::string> vars;
    std::vector<const sexpr::Node*> asserts;
    for (const auto& c : cmds) {
      if (!c.is_list() || c.items.empty()) return "unknown";
      const std::string& head = c.items[0].text;
      if (head == "declare-const") {
        if (c.items.size() != 3 || !c.items[2].is_atom("Bool")) return "unknown";
        vars.push_back(c.items[1].text);
      } else if (head == "assert") {
        asserts.push_back(&c.items[1]);
      } else if (head.rfind("declare", 0) == 0 || head == "define-fun") {
        return "unknown";
      }
    }
    if (vars.size() > 20) return "unknown";
    std::map<std::string, bool> env;
    for (std::uint64_t m = 0; m < (1ull << vars.size()); ++m) {
      for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = (m >> i) & 1;
      bool all = true;
      try {
        for (const auto* a : asserts)
          if (!(all = eval(*a, env))) break;
      } catch (const std::exception&) {
        return "unknown";
      }
      if (!all) continue;
      if (!s.want_model) return "sat";
      std::string model = "(";
      for (const auto& v : vars)
        model += "\n  (define-fun " + v + " () Bool " + (env[v] ? "true" : "false") + ")";
      return "sat\n" + model + "\n)";
    }
    return s.want_model ? "unsat\n(error \"model is not available\")" : "unsat";
  }

  std::string name() const override { return "truth-table"; }

 private:
  static bool eval(const sexpr::Node& n, std::map<std::string, bool>& env) {
    if (!n.is_list()) {
      if (n.is_atom("true")) return true;
      if (n.is_atom("false")) return false;
      auto it = env.find(n.text);
      if (it == env.end()) throw std::runtime_error("unknown symbol");
      return it->second;
    }
    if (n.items.empty()) throw std::runtime_error("empty application");
    const std::string& op = n.items[0].text;
    auto arg = [&](std::size_t i) { return eval(n.items.at(i), env); };
    std::size_t k = n.items.size() - 1;
    if (op == "not" && k == 1) return !arg(1);
    if (op == "and") {
      for (std::size_t i = 1; i <= k; ++i)
        if (!arg(i)) return false;
      return true;
    }
    if (op == "or") {
      for (std::size_t i = 1; i <= k; ++i)
        if (arg(i)) return true;
      return false;
    }
    if (op == "=>" && k == 2) return !arg(1) || arg(2);
    if (op == "=" && k == 2) return arg(1) == arg(2);
    if (op == "xor" && k == 2) return arg(1) != arg(2);
    if (op == "ite" && k == 3) return arg(1) ? arg(2) : arg(3);
    throw std::runtime_error("unsupported operator " + op);
  }
};

}  // namespace

std::unique_ptr<SmtBackend> make_process_backend(std::string solver_path, int sessions) {
  return std::make_unique<ProcessBackend>(std::move(solver_path), sessions);
}
std::unique_ptr<SmtBackend> make_replay_backend(std::string dir) {
  return std::make_unique<ReplayBackend>(std::move(dir));
}
std::unique_ptr<SmtBackend> make_recording_backend(std::unique_ptr<SmtBackend> inner, std::string dir) {
  return std::make_unique<RecordingBackend>(std::move(inner), std::move(dir));
}
std::unique_ptr<SmtBackend> make_truth_table_backend() {
  return std::make_unique<TruthTableBackend>();
}

}  // namespace flg
