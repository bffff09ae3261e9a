#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/compiler.hpp"
#include "core/ground.hpp"
#include "core/solvers/generic.hpp"

namespace dmln {

struct StepSchedule {
  enum class Mode { Constant, Decay };
  Mode mode = Mode::Decay;
  double initial = 1.0;
  // decay: alpha_k = alpha0 / (1 + k/10), k counting from 0
  double at(int k) const {
    return mode == Mode::Constant ? initial
                                  : initial / (1.0 + static_cast<double>(k) / 10.0);
  }
};

struct MasterConfig {
  bool marginal = false;
  int max_iterations = 100;
  StepSchedule schedule;
  double disagreement_threshold = 0.01;  // stop when <= this fraction disagrees
  double marginal_agree_tol = 0.05;      // copies within this count as agreeing
  std::uint64_t seed = 0;
  int workers = 1;
  WalkSatParams walksat;
  GibbsParams gibbs;
};

// Per-(task, shared atom) Lagrange multipliers. The sum over tasks is zero
// for every atom after every update.
struct MultiplierStore {
  std::map<int, std::map<int, double>> lambda;  // atom -> task -> value
  double get(int atom, int task) const;
  double sum(int atom) const;
};

// Current copies of every shared atom: truth values in MAP mode, marginals
// in marginal mode.
struct SharedVariableRegistry {
  std::map<int, std::vector<int>> tasks_of_atom;   // >= 2 tasks each
  std::map<int, std::map<int, double>> copies;     // atom -> task -> value
};

// One subgradient step: lambda^j_p -= alpha * (x^j_p - mean_p). Deviations
// from the mean sum to zero, so the sum-zero invariant is preserved exactly.
// With two tasks this reduces to the +lambda/-lambda singleton-rule pair.
void update_multipliers(const SharedVariableRegistry& registry,
                        MultiplierStore& store, double alpha);

// Connected components of the atom-clause incidence graph; no clause spans
// two components. Atom ids are local to the clause list given.
std::vector<std::vector<int>> partition_task(
    int atom_count, const std::vector<GroundClause>& clauses);

struct IterationStats {
  int iteration = 0;
  double step = 0;
  double rmse = 0;
  double disagreement = 0;
  double best_primal = 0;
};

struct ConvergenceStats {
  std::vector<IterationStats> trace;
  int iterations = 0;
  std::string stop_reason;
  bool certified = false;  // gap check: agreement, feasibility, P == D
  double dual_value = 0;
  double final_cost = 0;
};

struct RunResult {
  World world;                    // finalized assignment (both modes)
  std::vector<double> marginals;  // per global atom, marginal mode
  ConvergenceStats stats;
  bool infeasible = false;
  std::string message;
};

class Master {
 public:
  Master(const GroundDatabase& db, const LogicalPlan& plan, MasterConfig config);

  RunResult run();

  // inspection hooks
  const MultiplierStore& multipliers() const { return store_; }
  const SharedVariableRegistry& registry() const { return registry_; }

 private:
  struct TaskRuntime {
    std::vector<int> atoms;          // global ids, sorted
    std::vector<char> owned;
    std::vector<GroundClause> clauses;  // local indices, scaled weights
    SolverResult last;
  };

  TaskInput build_input(int task, bool bootstrap);
  SolverResult solve_task(int task, int iteration, bool bootstrap);
  void solve_all(int iteration);
  void record_copies(int task);
  double copy_value(int task, int atom) const;  // current copy (registry)
  World assemble_world() const;
  std::vector<double> assemble_marginals() const;
  double dual_value() const;

  const GroundDatabase& db_;
  const LogicalPlan& plan_;
  MasterConfig config_;
  double weight_scale_ = 1;
  std::vector<TaskRuntime> runtimes_;
  MultiplierStore store_;
  SharedVariableRegistry registry_;
};

}  // namespace dmln
