#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/program.hpp"

namespace dmln {

struct GroundAtom {
  int predicate = -1;
  std::vector<int> args;
};

struct GroundLiteral {
  bool positive = true;
  int atom = -1;
};

struct GroundClause {
  double weight = 0;
  std::vector<GroundLiteral> literals;
  int rule_index = -1;  // source rule this instantiation came from
};

// Truth assignment over all ground atoms, indexed by atom id.
class World {
 public:
  World() = default;
  explicit World(size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}
  bool get(int i) const { return bits_[static_cast<size_t>(i)] != 0; }
  void set(int i, bool v) { bits_[static_cast<size_t>(i)] = v ? 1 : 0; }
  size_t size() const { return bits_.size(); }
  bool operator==(const World&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Closed world over evidence: a tuple is true iff listed positively.
class EvidenceIndex {
 public:
  EvidenceIndex() = default;
  explicit EvidenceIndex(const MLNProgram& program);
  bool is_true(int predicate, const std::vector<int>& args) const;

 private:
  std::map<std::pair<int, std::vector<int>>, bool> truth_;
};

struct GroundDatabase {
  const MLNProgram* program = nullptr;
  std::vector<GroundAtom> atoms;  // dense ids 0..N-1
  std::vector<GroundClause> clauses;
  EvidenceIndex evidence;
  // Constant cost contributed by clauses whose truth was fixed by evidence
  // (always-violated instantiations); +inf when evidence falsifies a hard
  // clause outright.
  double base_cost = 0;

  int find_atom(int predicate, const std::vector<int>& args) const;
  std::string atom_name(int id) const;
  int atom_count() const { return static_cast<int>(atoms.size()); }

  // atom ids grouped by predicate, in id order
  std::vector<int> atoms_of(int predicate) const;

 private:
  friend GroundDatabase ground(const MLNProgram&);
  std::map<std::pair<int, std::vector<int>>, int> atom_ids_;
};

// Instantiates every rule over the cross-product of its variables' domains,
// drops clauses already satisfied by evidence, removes evidence literals of
// fixed truth, and simplifies (duplicate literals merged, tautologies
// dropped). Ground atoms exist for every grounding of each query predicate
// that appears in at least one rule, ids assigned in predicate declaration
// order and lexicographic constant order.
GroundDatabase ground(const MLNProgram& program);

bool clause_true(const GroundClause& clause, const World& world);

// A ground clause is violated iff w > 0 and the clause is false, or w < 0 and
// the clause is true. Hard clauses count as positive.
bool clause_violated(const GroundClause& clause, const World& world);

// Sum of |w| over violated clauses plus the evidence-fixed base cost; +inf
// iff a hard clause is violated.
double world_cost(const GroundDatabase& db, const World& world);

}  // namespace dmln
