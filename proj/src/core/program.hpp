#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "core/symbols.hpp"
#include "core/util.hpp"

namespace dmln {

enum class PredicateKind { Evidence, Query };

struct PredicateSchema {
  std::string name;
  std::vector<int> domains;  // one per argument position
  PredicateKind kind = PredicateKind::Evidence;
  int arity() const { return static_cast<int>(domains.size()); }
};

// A term is a clause-local variable or an interned constant. The domain of a
// constant is implied by the argument position it sits at.
struct Term {
  bool is_var = false;
  int index = 0;  // variable slot or constant id
  static Term var(int slot) { return {true, slot}; }
  static Term constant(int id) { return {false, id}; }
  bool operator==(const Term&) const = default;
};

struct Literal {
  bool positive = true;
  int predicate = -1;
  std::vector<Term> args;
  // true when the literal sits in the rule's head (right of =>); every
  // literal of a plain disjunction counts as head
  bool is_head = true;
};

// (in)equality between two terms, kept in the clause's disjunction. During
// grounding it collapses to a fixed truth value.
struct EqConstraint {
  bool equal = true;  // false for !=
  Term lhs, rhs;
  bool is_head = true;
};

struct ClauseVar {
  std::string name;
  int domain = -1;
};

// Rules are stored in disjunctive clause form; implications are rewritten at
// parse time, a<=>b expands into two clauses sharing one source line.
struct Clause {
  double weight = 0;
  std::vector<ClauseVar> vars;
  std::vector<Literal> literals;
  std::vector<EqConstraint> constraints;
  std::string task_annotation;  // empty unless the rule carries @task(name)
  int source_line = 0;
};

struct EvidenceAtom {
  int predicate = -1;
  std::vector<int> constants;
  bool positive = true;
};

struct MLNProgram {
  SymbolTable symbols;
  std::vector<PredicateSchema> predicates;  // declaration order
  std::unordered_map<std::string, int> predicate_ids;
  std::vector<Clause> rules;  // source order; index is the stable rule id
  std::vector<EvidenceAtom> evidence;

  int predicate_id(const std::string& name) const {
    auto it = predicate_ids.find(name);
    return it == predicate_ids.end() ? -1 : it->second;
  }
  const PredicateSchema& predicate(int id) const { return predicates[id]; }

  bool is_query(int pred) const {
    return predicates[pred].kind == PredicateKind::Query;
  }

  std::vector<int> query_predicates() const {
    std::vector<int> out;
    for (size_t i = 0; i < predicates.size(); ++i)
      if (predicates[i].kind == PredicateKind::Query)
        out.push_back(static_cast<int>(i));
    return out;
  }
};

// Renders a clause in the source grammar: implication form when the clause
// has body elements, plain disjunction otherwise.
std::string clause_to_string(const MLNProgram& program, const Clause& clause);

// Query predicates of the clause's head literals; tasks consume rules whose
// head they own.
std::vector<int> head_query_predicates(const MLNProgram& program,
                                       const Clause& clause);
std::string literal_to_string(const MLNProgram& program, const Clause& clause,
                              const Literal& lit);

// Checks structural invariants (declared predicates, arities, constraint
// safety) and rejects negative hard weights. Throws SemanticError.
void validate_program(const MLNProgram& program);

}  // namespace dmln
