#pragma once

// Further independent baselines: plain nested-loop conjunctive-query
// evaluation, an instantiation-from-scratch grounder, set-partition search
// for coref, and chain enumeration.

#include <map>
#include <vector>

#include "core/query.hpp"
#include "core/solvers/chain.hpp"
#include "core/solvers/coref.hpp"

namespace dmln::testing {

// Nested loops over raw tuple lists; no indexes, no join ordering.
std::vector<Tuple> nested_loop_eval(const AdornedView& view,
                                    const Catalog& catalog);

// Expected eval_bound answer: filter the all-free result on the bound
// positions and project the free ones.
std::vector<Tuple> filter_project(const AdornedView& view,
                                  const std::vector<Tuple>& eager,
                                  const Tuple& binding);

// Minimum disagreement cost over every partition of the nodes (n <= 12);
// pair costs recomputed from the edge map directly.
double coref_opt(const CorefGraph& graph);

// Enumerates every label sequence.
ChainMapResult chain_enumerate_map(const ChainModel& model);
std::vector<std::vector<double>> chain_enumerate_marginals(const ChainModel& model);

}  // namespace dmln::testing
