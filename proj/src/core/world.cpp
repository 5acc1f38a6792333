#include "flg/world.hpp"

#include <algorithm>
#include <stdexcept>

namespace flg {

bool Relation::insert(Tuple t) {
  if (static_cast<int>(t.size()) != arity_)
    throw std::invalid_argument("tuple arity mismatch");
  for (const auto& v : t)
    if (!v->ground) throw std::invalid_argument("non-ground tuple");
  std::uint64_t h = tuple_hash(t);
  std::lock_guard<std::mutex> lock(mu_);
  auto [lo, hi] = dedup_.equal_range(h);
  for (auto it = lo; it != hi; ++it)
    if (tuple_compare(rows_[it->second], t) == 0) return false;
  dedup_.emplace(h, static_cast<std::uint32_t>(rows_.size()));
  rows_.push_back(std::move(t));
  return true;
}

bool Relation::contains(const Tuple& t) const {
  std::uint64_t h = tuple_hash(t);
  std::lock_guard<std::mutex> lock(mu_);
  auto [lo, hi] = dedup_.equal_range(h);
  for (auto it = lo; it != hi; ++it)
    if (tuple_compare(rows_[it->second], t) == 0) return true;
  return false;
}

std::uint64_t Relation::masked_hash(std::uint32_t mask, const Tuple& t) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (mask & (1u << i)) h = hash_mix(h, t[i]->hash);
  return h;
}

void Relation::ensure_index(std::uint32_t mask) {
  std::lock_guard<std::mutex> lock(mu_);
  Index& ix = indices_[mask];
  for (; ix.upto < rows_.size(); ++ix.upto)
    ix.buckets[masked_hash(mask, rows_[ix.upto])].push_back(
        static_cast<std::uint32_t>(ix.upto));
}

void Relation::probe(std::uint32_t mask, const Tuple& key, std::size_t lo,
                     std::size_t hi, std::vector<std::uint32_t>& out) const {
  out.clear();
  auto ix = indices_.find(mask);
  if (ix == indices_.end())
    throw std::logic_error("probe on an index that was never built");
  auto b = ix->second.buckets.find(masked_hash(mask, key));
  if (b == ix->second.buckets.end()) return;
  const auto& rows = b->second;
  auto first = std::lower_bound(rows.begin(), rows.end(), static_cast<std::uint32_t>(lo));
  for (auto it = first; it != rows.end() && *it < hi; ++it) out.push_back(*it);
}

std::vector<Tuple> Relation::sorted() const {
  std::vector<Tuple> out = rows_;
  std::sort(out.begin(), out.end(),
            [](const Tuple& a, const Tuple& b) { return tuple_compare(a, b) < 0; });
  return out;
}

Relation& World::relation(Symbol p, int arity) {
  auto it = rels_.find(p);
  if (it == rels_.end())
    it = rels_.emplace(p, std::make_unique<Relation>(arity)).first;
  else if (it->second->arity() != arity)
    throw std::invalid_argument("relation " + p.str() + " used with two arities");
  return *it->second;
}

const Relation* World::find(Symbol p) const {
  auto it = rels_.find(p);
  return it == rels_.end() ? nullptr : it->second.get();
}

bool World::insert(Symbol p, Tuple t) {
  int n = static_cast<int>(t.size());
  return relation(p, n).insert(std::move(t));
}

bool World::contains(Symbol p, const Tuple& t) const {
  const Relation* r = find(p);
  return r && r->contains(t);
}

std::size_t World::size(Symbol p) const {
  const Relation* r = find(p);
  return r ? r->size() : 0;
}

World World::clone() const {
  World w;
  for (const auto& [p, r] : rels_) {
    Relation& nr = w.relation(p, r->arity());
    for (const auto& t : r->rows()) nr.insert(t);
  }
  return w;
}

bool World::same_facts(const World& other) const {
  auto nonempty = [](const World& w) {
    std::vector<Symbol> out;
    for (const auto& [p, r] : w.rels_)
      if (r->size()) out.push_back(p);
    return out;
  };
  if (nonempty(*this) != nonempty(other)) return false;
  for (const auto& [p, r] : rels_) {
    if (!r->size()) continue;
    const Relation* o = other.find(p);
    if (o->size() != r->size()) return false;
    for (const auto& t : r->rows())
      if (!o->contains(t)) return false;
  }
  return true;
}

}  // namespace flg
