#pragma once

#include <cstdint>

#include "core/solvers/solver.hpp"

namespace dmln {

struct WalkSatParams {
  double noise = 0.5;     // probability of a random flip within the clause
  int max_flips = 100000;
  int restarts = 3;
};

struct GibbsParams {
  int samples = 10000;  // full sweeps recorded after burn-in
  int burn_in = 1000;
};

struct GenericMapResult {
  World world;
  double cost = 0;      // exact cost of the returned world
  bool feasible = true; // no hard clause violated
};

// MaxWalkSAT over local-index clauses: random restarts from assignments
// satisfying the unit hard clauses, best-of search with a finite surrogate
// weight standing in for hard clauses; feasibility is re-checked exactly on
// the returned world.
GenericMapResult maxwalksat(int atom_count,
                            const std::vector<GroundClause>& clauses,
                            const WalkSatParams& params, std::uint64_t seed);

// Gibbs sampling; marginals are sample means after burn-in. Flips that would
// violate a hard clause get zero conditional probability.
std::vector<double> gibbs_marginals(int atom_count,
                                    const std::vector<GroundClause>& clauses,
                                    const GibbsParams& params,
                                    std::uint64_t seed);

// Task adapters: the whole subprogram (all task atoms, multipliers as
// appended singleton clauses) goes to the search jointly.
SolverResult run_generic_task_map(const TaskInput& input,
                                  const WalkSatParams& params,
                                  std::uint64_t seed);
SolverResult run_generic_task_marginal(const TaskInput& input,
                                       const GibbsParams& params,
                                       std::uint64_t seed);

}  // namespace dmln
