#pragma once

#include <set>
#include <vector>

#include "core/query.hpp"

namespace dmln {

struct CostModelParams {
  double alpha_io = 1.0;        // abstract cost of one page fetch
  double beta = 0.1;            // memory/disk fudge factor, <= 1
  double buffer_tuples = 1e6;   // blocks below this size count as in-memory
};

// All set partitions of {0..n-1} in restricted-growth-string order; the first
// entry is the single-block (fully eager) partition.
std::vector<std::vector<std::vector<int>>> all_partitions(int n);

// Join cardinality estimate for a set of subgoals under attribute
// independence: product of input cardinalities, divided per join variable by
// every matching column's distinct count except the largest. Variables in
// `fixed` (bound head variables) divide by every slot's distinct count.
double estimate_conjunction(const AdornedView& view,
                            const std::vector<int>& subgoals,
                            const std::set<int>& fixed,
                            const Catalog& catalog);

// Materialization cost of one block: reading every input once plus writing
// the estimated output (base-relation blocks pay only the read/index side).
double estimate_mat(const AdornedView& view, const PlanBlock& block,
                    const Catalog& catalog, const CostModelParams& params);

// One index-nested-loop probe step: n1 outer tuples, n join results, one
// index access plus ceil(n/n1) page fetches each; beta discounts a probed
// block that fits the buffer.
double inc_probe_cost(double n1, double n, double probed_size,
                      const CostModelParams& params);

// Per-access cost of the rewritten view under index-nested-loop joins,
// probing blocks in ascending order of bound-selection cardinality; the
// two-block case is exactly inc_probe_cost(n1, n, |Q2|).
double estimate_inc(const AdornedView& view, const MaterializationPlan& plan,
                    const Catalog& catalog, const CostModelParams& params);

// Fills mat/inc/exec costs of an already-shaped plan.
void cost_plan(const AdornedView& view, MaterializationPlan& plan,
               const Catalog& catalog, const CostModelParams& params);

// Enumerates the partition lattice (subgoal count <= 8, otherwise only the
// two extremes) and returns the plan with minimum modeled ExecCost
// t * Inc + sum Mat; ties break toward fewer blocks, then lexicographically.
MaterializationPlan choose_plan(const AdornedView& view, const Catalog& catalog,
                                const CostModelParams& params);

}  // namespace dmln
