#include "flg/diagnostics.hpp"

namespace flg {

std::string Diagnostic::render() const {
  std::string out = span.file.empty() ? std::string("<input>") : span.file.str();
  out += ':' + std::to_string(span.line) + ':' + std::to_string(span.col) + ": ";
  out += severity == Severity::Error ? "error" : "warning";
  out += ": " + rule + ": " + message;
  return out;
}

void Diagnostics::error(const SourceSpan& at, std::string rule, std::string message) {
  items_.push_back({Severity::Error, at, std::move(rule), std::move(message)});
}

void Diagnostics::warning(const SourceSpan& at, std::string rule, std::string message) {
  items_.push_back({Severity::Warning, at, std::move(rule), std::move(message)});
}

void Diagnostics::append(const Diagnostics& other) {
  items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

bool Diagnostics::has_errors() const {
  for (const auto& d : items_)
    if (d.severity == Severity::Error) return true;
  return false;
}

std::string Diagnostics::render() const {
  std::string out;
  for (const auto& d : items_) out += d.render() + '\n';
  return out;
}

}  // namespace flg
