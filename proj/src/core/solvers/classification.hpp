#pragma once

#include "core/solvers/solver.hpp"

namespace dmln {

// Boolean classification: model M(f, w) plus instance pairs I(o, f). An
// object is included when the sum of its present feature weights is >= 0;
// a hard feature forces the decision.
struct ClassificationInput {
  int object_count = 0;
  std::vector<double> model;                      // weight per feature id
  std::vector<std::pair<int, int>> instance;      // (object, feature)
  std::vector<double> priors;                     // per object, may be empty
};

struct ClassificationResult {
  std::vector<char> include;
  std::vector<double> probability;  // marginal mode only
  double cost = 0;
  bool infeasible = false;
  std::string message;
};

ClassificationResult classify_boolean_map(const ClassificationInput& input);
ClassificationResult classify_boolean_marginal(const ClassificationInput& input);

// Multi-class: per key pick argmin over labels plus the no-label symbol,
// index 0. Ties prefer no-label, then the lowest label index.
struct MulticlassInput {
  int key_count = 0;
  int label_count = 0;  // real labels; penalty rows are label_count + 1 wide
  std::vector<std::vector<double>> penalty;  // [key][0 = none, 1..L = labels]
};

struct MulticlassResult {
  std::vector<int> label;                           // 0 = none
  std::vector<std::vector<double>> probability;     // marginal mode only
  double cost = 0;
  bool infeasible = false;
};

MulticlassResult classify_multiclass_map(const MulticlassInput& input);
MulticlassResult classify_multiclass_marginal(const MulticlassInput& input);

// Task adapter: builds the per-object (or per-key) penalties from the task's
// conditioned ground view and the priors, then reports atom values.
SolverResult run_classification_task(const TaskInput& input, bool marginal);

}  // namespace dmln
