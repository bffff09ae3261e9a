#include "core/solvers/solver.hpp"

#include <cmath>

namespace dmln {

ConditionedView condition_on_inputs(const TaskInput& input) {
  ConditionedView out;
  for (const GroundClause& clause : input.clauses) {
    GroundClause reduced;
    reduced.weight = clause.weight;
    reduced.rule_index = clause.rule_index;
    bool satisfied = false;
    for (const GroundLiteral& lit : clause.literals) {
      if (input.owned[static_cast<size_t>(lit.atom)]) {
        reduced.literals.push_back(lit);
        continue;
      }
      bool value = input.input_values[static_cast<size_t>(lit.atom)] != 0;
      if (value == lit.positive) {
        satisfied = true;
        break;
      }
      // literal fixed false: drops out
    }
    if (satisfied) {
      if (clause.weight < 0) out.base_cost += -clause.weight;
      continue;
    }
    if (reduced.literals.empty()) {
      if (clause.weight > 0) out.base_cost += clause.weight;
      continue;
    }
    out.clauses.push_back(std::move(reduced));
  }
  // priors of non-owned atoms are paid at their conditioning value
  for (size_t i = 0; i < input.atoms.size(); ++i)
    if (!input.owned[i])
      out.base_cost += prior_cost(input.priors[i], input.input_values[i] != 0);
  return out;
}

}  // namespace dmln
