#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "flg/value.hpp"

namespace flg {

// Append-only tuple set. Row numbers are insertion order, which lets the
// engine address "old" / "delta" / "full" views as row ranges.
class Relation {
 public:
  explicit Relation(int arity) : arity_(arity) {}

  int arity() const { return arity_; }
  std::size_t size() const { return rows_.size(); }
  const Tuple& row(std::size_t i) const { return rows_[i]; }
  const std::vector<Tuple>& rows() const { return rows_; }

  // Set semantics; safe to call concurrently. Returns true if t was new.
  bool insert(Tuple t);
  bool contains(const Tuple& t) const;

  // Secondary index over the columns set in `mask`. Must be brought up to
  // date (ensure_index) before concurrent readers call probe().
  void ensure_index(std::uint32_t mask);
  // Rows in [lo, hi) whose masked columns hash like `key` (caller re-checks).
  void probe(std::uint32_t mask, const Tuple& key, std::size_t lo, std::size_t hi,
             std::vector<std::uint32_t>& out) const;

  std::vector<Tuple> sorted() const;

 private:
  struct Index {
    std::size_t upto = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  };
  static std::uint64_t masked_hash(std::uint32_t mask, const Tuple& t);

  int arity_;
  std::vector<Tuple> rows_;
  std::unordered_multimap<std::uint64_t, std::uint32_t> dedup_;
  std::map<std::uint32_t, Index> indices_;
  mutable std::mutex mu_;
};

// W: predicate -> tuple set. Iteration order is by predicate name.
class World {
 public:
  Relation& relation(Symbol p, int arity);
  const Relation* find(Symbol p) const;
  bool insert(Symbol p, Tuple t);
  bool contains(Symbol p, const Tuple& t) const;
  std::size_t size(Symbol p) const;
  const std::map<Symbol, std::unique_ptr<Relation>>& relations() const { return rels_; }

  World clone() const;
  // Per-relation set equality (ignores insertion order).
  bool same_facts(const World& other) const;

 private:
  std::map<Symbol, std::unique_ptr<Relation>> rels_;
};

}  // namespace flg
