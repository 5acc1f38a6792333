#pragma once

#include <utility>
#include <vector>

#include "flg/value.hpp"

namespace flg {

// θ: rule variable -> value. Extend-only within one derivation; the engine
// backtracks by rewinding to an earlier mark, never by overwriting.
class Substitution {
 public:
  const Value* find(Symbol x) const {
    for (auto it = binds_.rbegin(); it != binds_.rend(); ++it)
      if (it->first == x) return &it->second;
    return nullptr;
  }
  bool bound(Symbol x) const { return find(x) != nullptr; }

  // Precondition: x unbound (checked; rebinding throws std::logic_error).
  void bind(Symbol x, Value v);

  std::size_t mark() const { return binds_.size(); }
  void rewind(std::size_t m) { binds_.resize(m); }
  std::size_t size() const { return binds_.size(); }
  const std::vector<std::pair<Symbol, Value>>& entries() const { return binds_; }

  // θ(u): replaces bound variables, leaves unbound ones in place.
  Term apply(const Term& u) const;
  // Ground under θ: every variable of u is bound.
  bool ground_under(const Term& u) const;

 private:
  std::vector<std::pair<Symbol, Value>> binds_;
};

}  // namespace flg
