#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace dmln {

using Tuple = std::vector<int>;

// In-memory relation with set semantics, per-column distinct counts, and
// hash indexes built lazily on first probe. Single writer; concurrent
// read-only probes are safe once loading is done (index creation is the one
// mutation probes may trigger, and it is guarded by a mutex).
class Relation {
 public:
  Relation() = default;
  Relation(std::string name, int arity)
      : name_(std::move(name)),
        arity_(arity),
        distinct_(static_cast<size_t>(arity)) {}

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }

  bool insert(const Tuple& t);  // false if duplicate
  void clear();

  std::size_t size() const { return tuples_.size(); }
  // duplicate-free, insertion order; evaluators sort their own results
  const std::vector<Tuple>& tuples() const { return tuples_; }

  double cardinality() const { return static_cast<double>(tuples_.size()); }
  double distinct(int column) const {
    return static_cast<double>(distinct_[static_cast<size_t>(column)].size());
  }

  // Tuple indices matching `key` on the given columns; the index for that
  // column set is built on first use.
  const std::vector<std::uint32_t>& probe(const std::vector<int>& columns,
                                          const Tuple& key) const;

  std::string dump_tsv(const std::vector<std::vector<std::string>>* names =
                           nullptr) const;
  // integer tuples, one per line, tab separated
  void load_tsv(const std::string& text);

 private:
  std::string name_;
  int arity_ = 0;
  std::vector<Tuple> tuples_;
  std::set<Tuple> present_;
  std::vector<std::set<int>> distinct_;

  struct Index {
    std::map<Tuple, std::vector<std::uint32_t>> buckets;
  };
  mutable std::mutex index_mutex_;
  mutable std::map<std::vector<int>, std::unique_ptr<Index>> indexes_;
  static const std::vector<std::uint32_t> kEmpty;
};

// Named relation store shared by the query evaluator.
class Catalog {
 public:
  Relation& create(const std::string& name, int arity);
  Relation* find(const std::string& name);
  const Relation* find(const std::string& name) const;
  Relation& at(const std::string& name);
  const Relation& at(const std::string& name) const;

 private:
  std::map<std::string, Relation> relations_;
};

}  // namespace dmln
