#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "core/solvers/solver.hpp"

namespace dmln {

// Symmetric weighted graph over mention nodes. hard = +1 forces a merge,
// hard = -1 forbids one; soft weights add up across rule instances and
// multiplier singletons.
struct CorefGraph {
  struct Edge {
    double soft = 0;
    int hard = 0;
  };
  int node_count = 0;
  std::map<std::pair<int, int>, Edge> edges;  // key: (min, max), no self edges
  // positive-weight adjacency probe; defaults to scanning `edges`
  std::function<std::vector<int>(int)> neighbor_oracle;

  Edge edge(int a, int b) const;
  void add(int a, int b, double soft, int hard);
  std::vector<int> positive_neighbors(int node) const;
};

struct CorefResult {
  std::vector<int> cluster;  // cluster id per node
  double cost = 0;           // disagreement cost
  bool infeasible = false;
  std::string message;
};

// Disagreement cost of a partition: separated positive pairs plus merged
// negative pairs, over unordered node pairs.
double coref_cost(const CorefGraph& graph, const std::vector<int>& cluster);

// Contracts must-link edges, then runs randomized pivot clustering on the
// contracted graph: a uniformly random unclustered pivot grabs its
// positive-weight unclustered neighbors, never across a cannot-link.
CorefResult solve_coref(const CorefGraph& graph, std::uint64_t seed);

// Task adapter: edge weights from the conditioned ground view (structural
// hard rules excluded), multipliers folded into the pair weights.
SolverResult run_coref_task(const TaskInput& input, std::uint64_t seed,
                            bool marginal);

}  // namespace dmln
