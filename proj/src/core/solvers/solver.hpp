#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/compiler.hpp"
#include "core/ground.hpp"

namespace dmln {

// One task's view of the problem for a single solver invocation. Atoms are
// the task's universe (every grounding of every query relation its rules
// mention); clause literals are rewritten to local indices into `atoms`.
// Soft clause weights arrive pre-scaled (weight scale m in marginal mode);
// priors are the Lagrange multipliers, applied as singleton clause weights,
// and are never scaled.
struct TaskInput {
  const Task* task = nullptr;
  const GroundDatabase* db = nullptr;
  std::vector<int> atoms;          // sorted global atom ids
  std::vector<char> owned;         // aligned with atoms
  std::vector<double> priors;      // aligned; 0 for unshared atoms
  std::vector<char> input_values;  // conditioning values for non-owned atoms
  std::vector<GroundClause> clauses;  // local literal indices
  double weight_scale = 1.0;

  int local_index(int global_atom) const {
    auto it = local_.find(global_atom);
    return it == local_.end() ? -1 : it->second;
  }
  void build_index() {
    local_.clear();
    for (size_t i = 0; i < atoms.size(); ++i)
      local_.emplace(atoms[i], static_cast<int>(i));
  }

 private:
  std::unordered_map<int, int> local_;
};

struct SolverResult {
  std::vector<char> assignment;   // aligned with TaskInput.atoms
  std::vector<double> marginals;  // aligned; empty in MAP mode
  double cost = 0;                // achieved internal cost, priors included
  bool infeasible = false;
  std::string message;
};

// Singleton-rule cost of holding atom value x under multiplier lambda:
// a positive multiplier charges for false, a negative one for true.
inline double prior_cost(double lambda, bool value) {
  if (lambda > 0 && !value) return lambda;
  if (lambda < 0 && value) return -lambda;
  return 0;
}

// The task's clauses with non-owned atoms fixed to their conditioning
// values: satisfied clauses drop, fixed-false literals vanish, and fully
// decided clauses accumulate into `base_cost`.
struct ConditionedView {
  std::vector<GroundClause> clauses;  // literals over owned local indices
  double base_cost = 0;
};

ConditionedView condition_on_inputs(const TaskInput& input);

}  // namespace dmln
