#pragma once

#include "core/solvers/solver.hpp"

namespace dmln {

// Linear-chain model over penalties (negative log potentials). Label index 0
// is the no-label symbol; ties in MAP mode prefer lower indices, so no-label
// first and then lexicographic label order.
struct ChainModel {
  int label_count = 0;  // real labels; tables are (label_count + 1) wide
  std::vector<std::vector<double>> node;  // [position][label]
  // edge[i] couples position i and i+1
  std::vector<std::vector<std::vector<double>>> edge;

  int width() const { return label_count + 1; }
  int length() const { return static_cast<int>(node.size()); }
  void validate() const;
};

struct ChainMapResult {
  std::vector<int> labels;
  double cost = 0;
  bool infeasible = false;
};

struct ChainMarginalResult {
  std::vector<std::vector<double>> probability;  // [position][label]
  bool infeasible = false;
};

// Exact argmin label sequence by dynamic programming.
ChainMapResult chain_map(const ChainModel& model);

// Exact per-node marginals by forward-backward in log space.
ChainMarginalResult chain_marginal(const ChainModel& model);

// Task adapter: orders each chain by the TrREC evidence relation, builds node
// and edge penalties from the conditioned ground view, solves every chain.
SolverResult run_chain_task(const TaskInput& input, bool marginal);

}  // namespace dmln
