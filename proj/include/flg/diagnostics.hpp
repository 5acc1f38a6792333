#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "flg/symbol.hpp"

namespace flg {

struct SourceSpan {
  Symbol file;
  int line = 0;
  int col = 0;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string rule;  // typing/validation rule name, or "syntax"
  std::string message;

  // `path:line:col: severity: rule-name: message`
  std::string render() const;
};

class Diagnostics {
 public:
  void error(const SourceSpan& at, std::string rule, std::string message);
  void warning(const SourceSpan& at, std::string rule, std::string message);
  void add(Diagnostic d) { items_.push_back(std::move(d)); }
  void append(const Diagnostics& other);

  bool has_errors() const;
  const std::vector<Diagnostic>& items() const { return items_; }
  std::string render() const;  // one per line

 private:
  std::vector<Diagnostic> items_;
};

// Carrier for a single diagnostic out of deep recursion (parser, checker).
struct DiagnosticError : std::runtime_error {
  Diagnostic diag;
  explicit DiagnosticError(Diagnostic d)
      : std::runtime_error(d.message), diag(std::move(d)) {}
};

}  // namespace flg

namespace flg {

// A run-time failure (a HardError in the evaluation relations). `rule` names
// the failing premise or operator, e.g. "NegAtom-E" or "op-domain".
struct RuntimeError : std::runtime_error {
  std::string rule;
  SourceSpan span;
  RuntimeError(std::string r, const std::string& msg, SourceSpan at = {})
      : std::runtime_error(msg), rule(std::move(r)), span(at) {}
};

}  // namespace flg
