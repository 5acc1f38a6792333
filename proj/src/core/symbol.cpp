#include "flg/symbol.hpp"

#include <mutex>
#include <unordered_map>

namespace flg {
namespace {

struct Pool {
  std::mutex mu;
  std::unordered_map<std::string_view, Symbol::Entry*> table;
};

Pool& pool() {
  static Pool* p = new Pool();  // intentionally leaked: symbols outlive statics
  return *p;
}

const Symbol::Entry* intern(std::string_view text) {
  Pool& p = pool();
  std::lock_guard<std::mutex> lock(p.mu);
  auto it = p.table.find(text);
  if (it != p.table.end()) return it->second;
  auto* e = new Symbol::Entry{std::string(text), fnv1a(text)};
  p.table.emplace(std::string_view(e->text), e);
  return e;
}

}  // namespace

Symbol::Symbol() {
  static const Entry* empty = intern("");
  entry_ = empty;
}

Symbol::Symbol(std::string_view text) : entry_(intern(text)) {}

}  // namespace flg
