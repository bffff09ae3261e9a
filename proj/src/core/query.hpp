#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/relation.hpp"

namespace dmln {

enum class Binding : char { Bound = 'b', Free = 'f' };

// Variable or constant argument inside a view body.
struct VTerm {
  bool is_var = false;
  int id = 0;
  static VTerm var(int v) { return {true, v}; }
  static VTerm constant(int c) { return {false, c}; }
};

struct Subgoal {
  std::string relation;
  std::vector<VTerm> args;
};

struct ViewConstraint {
  bool equal = true;
  VTerm lhs, rhs;
};

// Conjunctive data-movement query with a binding pattern on its head and an
// access-count estimate t supplied by the consuming solver.
struct AdornedView {
  std::string name;
  std::vector<int> head_vars;
  std::vector<Binding> adornment;  // one per head position
  int var_count = 0;
  std::vector<Subgoal> subgoals;
  std::vector<ViewConstraint> constraints;
  double access_estimate = 1.0;  // t

  std::string adornment_string() const {
    std::string s;
    for (Binding b : adornment) s += static_cast<char>(b);
    return s;
  }
  std::vector<int> bound_positions() const {
    std::vector<int> out;
    for (size_t i = 0; i < adornment.size(); ++i)
      if (adornment[i] == Binding::Bound) out.push_back(static_cast<int>(i));
    return out;
  }
  std::vector<int> free_positions() const {
    std::vector<int> out;
    for (size_t i = 0; i < adornment.size(); ++i)
      if (adornment[i] == Binding::Free) out.push_back(static_cast<int>(i));
    return out;
  }
};

// One element of a subgoal partition. A block that is a plain single subgoal
// (distinct variables, no constants) probes the base relation in place;
// anything else is materialized into a derived table on prepare().
struct PlanBlock {
  std::vector<int> subgoals;   // indices into view.subgoals, sorted
  std::vector<int> head_vars;  // vars shared with the view head or other blocks
  bool uses_base = false;
  double mat_cost = 0;   // modeled
  double est_size = 0;   // modeled output cardinality
};

struct MaterializationPlan {
  std::vector<PlanBlock> blocks;
  double inc_cost = 0;   // modeled cost per bound access
  double exec_cost = 0;  // t * inc + sum of mat

  bool prepared = false;
  std::vector<std::shared_ptr<Relation>> tables;  // one per block, null if base

  bool fully_eager() const { return blocks.size() == 1; }
  bool fully_lazy() const {
    for (const PlanBlock& b : blocks)
      if (b.subgoals.size() != 1) return false;
    return true;
  }
};

// Builds the partition's blocks (head-variable computation, base-relation
// shortcut detection) without costing them.
MaterializationPlan make_plan(const AdornedView& view,
                              const std::vector<std::vector<int>>& partition);

// Full join with the head treated all-free; sorted, duplicate-free.
std::vector<Tuple> eval_eager(const AdornedView& view, const Catalog& catalog);

// Materializes every non-base block of the plan. Must run before eval_bound;
// idempotent.
void prepare_plan(const AdornedView& view, MaterializationPlan& plan,
                  const Catalog& catalog);

// Answers one bound access: fixes the bound head positions to `binding` and
// returns the set of tuples over the free positions. The answer is identical
// for every plan of the same view.
std::vector<Tuple> eval_bound(const AdornedView& view,
                              MaterializationPlan& plan, const Tuple& binding,
                              const Catalog& catalog);

}  // namespace dmln
