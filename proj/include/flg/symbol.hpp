#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace flg {

// 64-bit FNV-1a; used wherever a hash must be stable across runs.
inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

// Interned identifier. Equality is pointer equality; ordering is by text so
// that anything sorted by Symbol is deterministic.
class Symbol {
 public:
  struct Entry {
    std::string text;
    std::uint64_t hash;
  };

  Symbol();
  explicit Symbol(std::string_view text);

  const std::string& str() const { return entry_->text; }
  std::uint64_t stable_hash() const { return entry_->hash; }
  bool empty() const { return entry_->text.empty(); }

  bool operator==(const Symbol& o) const { return entry_ == o.entry_; }
  std::strong_ordering operator<=>(const Symbol& o) const {
    if (entry_ == o.entry_) return std::strong_ordering::equal;
    int c = entry_->text.compare(o.entry_->text);
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  const void* id() const { return entry_; }

 private:
  const Entry* entry_;
};

}  // namespace flg

template <>
struct std::hash<flg::Symbol> {
  std::size_t operator()(const flg::Symbol& s) const noexcept {
    return static_cast<std::size_t>(s.stable_hash());
  }
};
