#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/compiler.hpp"
#include "core/costmodel.hpp"
#include "core/ground.hpp"
#include "core/master.hpp"
#include "core/parser.hpp"
#include "core/query.hpp"

namespace dmln {

struct SessionConfig {
  bool marginal = false;
  bool monolithic = false;
  int iterations = 100;
  double step = 1.0;
  bool constant_step = false;
  std::uint64_t seed = 0;
  int workers = 1;
  WalkSatParams walksat;
  GibbsParams gibbs;
  CostModelParams cost_params;
};

struct DmoReport {
  int task = -1;
  AdornedView view;
  MaterializationPlan plan;
};

// Ties the pipeline together: parsed program -> ground database -> logical
// plan -> DMO materialization plans -> master run.
class Session {
 public:
  explicit Session(MLNProgram program);

  const MLNProgram& program() const { return program_; }
  const GroundDatabase& db() const { return db_; }
  const LogicalPlan& plan() const { return plan_; }
  const Catalog& catalog() const { return catalog_; }
  const std::vector<DmoReport>& dmos() const { return dmos_; }

  void compile(const SessionConfig& config);
  RunResult infer(const SessionConfig& config);

  // compiler explain plus the chosen materialization plan per DMO
  std::string explain_text() const;

  // one row per ground atom: relation, arguments, value (1/0 for MAP,
  // 6-decimal probability for marginal); sorted; filter optionally restricts
  // to named relations
  std::string result_tsv(const RunResult& result, bool marginal,
                         const std::vector<std::string>& filter) const;

  static std::string trace_tsv(const ConvergenceStats& stats);

 private:
  MLNProgram program_;
  GroundDatabase db_;
  LogicalPlan plan_;
  Catalog catalog_;
  std::vector<DmoReport> dmos_;
  bool compiled_ = false;
};

}  // namespace dmln
