#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/program.hpp"

namespace dmln {

enum class Property { REF, SYM, TRN, KEY, NoREC, TrREC };

std::string property_name(Property p);

// Pattern-derived facts about one query relation. REF/SYM/TRN/KEY come from
// hard rules only; NoREC and TrREC are relative to the rule set they were
// evaluated against.
struct PropertyInfo {
  bool ref = false, sym = false, trn = false;
  std::set<int> key_positions;  // binary relations only
  bool norec = false;
  bool trrec = false;
  int chain_pred = -1;  // the evidence relation T of the TrREC pattern
  int chain_pos = -1;   // argument position chained by T

  bool key() const { return !key_positions.empty(); }
  std::set<Property> as_set() const;
};

// Properties of `predicate` with NoREC/TrREC evaluated over `rules` (indices
// into program.rules); REF/SYM/TRN/KEY always consider every hard rule.
PropertyInfo detect_properties(const MLNProgram& program, int predicate,
                               const std::vector<int>& rules);
// Same, over the whole rule set.
PropertyInfo detect_properties(const MLNProgram& program, int predicate);

// True when this single hard rule merely states reflexivity, symmetry, or
// transitivity of `predicate` (including the guarded form); such rules are
// enforced structurally by the coref solver rather than as edge weights.
bool is_equivalence_structure_rule(const MLNProgram& program, int rule_index,
                                   int predicate);

// True when this single hard rule is the key-constraint pattern for
// `predicate`; exempt from recursion counting.
bool is_key_constraint_rule(const MLNProgram& program, int rule_index,
                            int predicate);

enum class TaskKind { Coref, SimpleClassification, CorrelatedClassification, Generic };

std::string task_kind_name(TaskKind k);

struct Task {
  TaskKind kind = TaskKind::Generic;
  std::string name;
  std::vector<int> rules;            // soft rules assigned + replicated hard rules
  std::vector<int> owned_relations;  // solved and reported by this task
  std::vector<int> relations;        // every query relation the rules mention
  // solver details for classification/chain tasks
  int key_pos = -1;    // -1: Boolean objects (whole tuple in/out)
  int value_pos = -1;
  int chain_pred = -1; // evidence relation ordering the chain (TrREC)
};

struct LogicalPlan {
  std::vector<Task> tasks;
  std::vector<int> sigma;             // breadth-first execution order
  std::vector<int> shared_relations;  // touched by >= 2 tasks
  std::map<int, std::vector<int>> relation_tasks;  // relation -> task indices
  std::map<int, int> owner;  // relation -> owning task; input-only ones absent
  std::map<int, PropertyInfo> properties;  // per query relation, full rule set
};

// Greedy decomposition. Rules carrying @task annotations are grouped into
// user tasks first; automatic compilation runs over the rest, trying task
// kinds in the order Coref, SimpleClassification, CorrelatedClassification
// and falling back to connected-component Generic tasks. `monolithic`
// forces one Generic task over everything.
LogicalPlan assign_tasks(const MLNProgram& program, bool monolithic = false);

// Deterministic human-readable plan dump.
std::string explain(const MLNProgram& program, const LogicalPlan& plan);

}  // namespace dmln
