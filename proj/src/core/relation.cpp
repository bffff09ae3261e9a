#include "core/relation.hpp"

#include <algorithm>
#include <sstream>

#include "core/util.hpp"

namespace dmln {

const std::vector<std::uint32_t> Relation::kEmpty;

bool Relation::insert(const Tuple& t) {
  if (static_cast<int>(t.size()) != arity_)
    throw SemanticError(cat("tuple arity mismatch on relation ", name_));
  if (!present_.insert(t).second) return false;
  tuples_.push_back(t);
  if (distinct_.size() != static_cast<size_t>(arity_))
    distinct_.resize(static_cast<size_t>(arity_));
  for (size_t i = 0; i < t.size(); ++i) distinct_[i].insert(t[i]);
  // mutation invalidates indexes; writers only run at load boundaries
  std::lock_guard<std::mutex> lock(index_mutex_);
  indexes_.clear();
  return true;
}

void Relation::clear() {
  tuples_.clear();
  present_.clear();
  distinct_.assign(static_cast<size_t>(arity_), {});
  std::lock_guard<std::mutex> lock(index_mutex_);
  indexes_.clear();
}

const std::vector<std::uint32_t>& Relation::probe(
    const std::vector<int>& columns, const Tuple& key) const {
  std::lock_guard<std::mutex> lock(index_mutex_);
  auto it = indexes_.find(columns);
  if (it == indexes_.end()) {
    auto index = std::make_unique<Index>();
    for (std::uint32_t row = 0; row < tuples_.size(); ++row) {
      Tuple k(columns.size());
      for (size_t c = 0; c < columns.size(); ++c)
        k[c] = tuples_[row][static_cast<size_t>(columns[c])];
      index->buckets[std::move(k)].push_back(row);
    }
    it = indexes_.emplace(columns, std::move(index)).first;
  }
  auto bucket = it->second->buckets.find(key);
  if (bucket == it->second->buckets.end()) return kEmpty;
  return bucket->second;
}

std::string Relation::dump_tsv(
    const std::vector<std::vector<std::string>>* names) const {
  std::ostringstream os;
  for (const Tuple& t : present_) {  // sorted
    for (size_t i = 0; i < t.size(); ++i) {
      if (i) os << '\t';
      if (names)
        os << (*names)[i][static_cast<size_t>(t[i])];
      else
        os << t[i];
    }
    os << '\n';
  }
  return os.str();
}

void Relation::load_tsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Tuple t;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, '\t')) t.push_back(std::stoi(field));
    insert(t);
  }
}

Relation& Catalog::create(const std::string& name, int arity) {
  auto [it, inserted] = relations_.try_emplace(name, name, arity);
  if (!inserted && it->second.arity() != arity)
    throw SemanticError(cat("relation ", name, " redeclared with arity ",
                            arity));
  return it->second;
}

Relation* Catalog::find(const std::string& name) {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

const Relation* Catalog::find(const std::string& name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

Relation& Catalog::at(const std::string& name) {
  Relation* r = find(name);
  if (!r) throw SemanticError(cat("unknown relation ", name));
  return *r;
}

const Relation& Catalog::at(const std::string& name) const {
  const Relation* r = find(name);
  if (!r) throw SemanticError(cat("unknown relation ", name));
  return *r;
}

}  // namespace dmln
