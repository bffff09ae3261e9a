#include "core/session.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "core/solvers/dmo.hpp"

namespace dmln {

Session::Session(MLNProgram program) : program_(std::move(program)) {}

void Session::compile(const SessionConfig& config) {
  db_ = ground(program_);
  plan_ = assign_tasks(program_, config.monolithic);

  // evidence relations, loaded positive-only (closed world)
  for (size_t p = 0; p < program_.predicates.size(); ++p) {
    const PredicateSchema& schema = program_.predicates[p];
    catalog_.create(schema.name, schema.arity());
  }
  for (const EvidenceAtom& ev : program_.evidence) {
    if (!ev.positive) continue;
    catalog_.at(program_.predicates[static_cast<size_t>(ev.predicate)].name)
        .insert(ev.constants);
  }
  // query relations carry their grounding universe; the optimizer sees the
  // upper-bound sizes a copy could reach
  for (const GroundAtom& atom : db_.atoms)
    catalog_.at(program_.predicates[static_cast<size_t>(atom.predicate)].name)
        .insert(atom.args);

  dmos_.clear();
  for (size_t t = 0; t < plan_.tasks.size(); ++t) {
    for (AdornedView& view :
         register_dmos(program_, db_, plan_.tasks[t], catalog_)) {
      DmoReport report;
      report.task = static_cast<int>(t);
      report.plan = choose_plan(view, catalog_, config.cost_params);
      report.view = std::move(view);
      dmos_.push_back(std::move(report));
    }
  }
  compiled_ = true;
}

RunResult Session::infer(const SessionConfig& config) {
  if (!compiled_) compile(config);
  MasterConfig mc;
  mc.marginal = config.marginal;
  mc.max_iterations = config.iterations;
  mc.schedule.mode = config.constant_step ? StepSchedule::Mode::Constant
                                          : StepSchedule::Mode::Decay;
  mc.schedule.initial = config.step;
  mc.seed = config.seed;
  mc.workers = config.workers;
  mc.walksat = config.walksat;
  mc.gibbs = config.gibbs;
  Master master(db_, plan_, mc);
  return master.run();
}

namespace {

std::string view_to_string(const MLNProgram& program, const AdornedView& v) {
  (void)program;
  std::ostringstream os;
  os << v.name << '^' << v.adornment_string() << '(';
  for (size_t i = 0; i < v.head_vars.size(); ++i) {
    if (i) os << ", ";
    os << 'v' << v.head_vars[i];
  }
  os << ") <- ";
  for (size_t g = 0; g < v.subgoals.size(); ++g) {
    if (g) os << ", ";
    os << v.subgoals[g].relation << '(';
    for (size_t a = 0; a < v.subgoals[g].args.size(); ++a) {
      if (a) os << ", ";
      const VTerm& t = v.subgoals[g].args[a];
      if (t.is_var)
        os << 'v' << t.id;
      else
        os << '#' << t.id;
    }
    os << ')';
  }
  return os.str();
}

}  // namespace

std::string Session::explain_text() const {
  std::ostringstream os;
  os << explain(program_, plan_);
  os << "dmos: " << dmos_.size() << "\n";
  for (const DmoReport& report : dmos_) {
    os << "dmo task=" << report.task << " "
       << view_to_string(program_, report.view)
       << " t=" << report.view.access_estimate << "\n";
    os << "  plan: blocks=[";
    for (size_t b = 0; b < report.plan.blocks.size(); ++b) {
      if (b) os << " ";
      os << "{";
      for (size_t i = 0; i < report.plan.blocks[b].subgoals.size(); ++i) {
        if (i) os << ",";
        os << report.plan.blocks[b].subgoals[i];
      }
      os << "}";
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "] inc=%.3f exec=%.3f",
                  report.plan.inc_cost, report.plan.exec_cost);
    os << buf;
    if (report.plan.fully_eager())
      os << " (eager)";
    else if (report.plan.fully_lazy())
      os << " (lazy)";
    os << "\n";
  }
  return os.str();
}

std::string Session::result_tsv(const RunResult& result, bool marginal,
                                const std::vector<std::string>& filter) const {
  std::vector<std::string> rows;
  for (size_t id = 0; id < db_.atoms.size(); ++id) {
    const GroundAtom& atom = db_.atoms[id];
    const PredicateSchema& schema =
        program_.predicates[static_cast<size_t>(atom.predicate)];
    if (!filter.empty() &&
        std::find(filter.begin(), filter.end(), schema.name) == filter.end())
      continue;
    std::ostringstream os;
    os << schema.name;
    for (size_t i = 0; i < atom.args.size(); ++i)
      os << '\t'
         << program_.symbols.constant_name(schema.domains[i], atom.args[i]);
    if (marginal) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f",
                    result.marginals[static_cast<size_t>(id)]);
      os << '\t' << buf;
    } else {
      os << '\t' << (result.world.get(static_cast<int>(id)) ? 1 : 0);
    }
    rows.push_back(os.str());
  }
  std::sort(rows.begin(), rows.end());
  std::string out;
  for (const std::string& r : rows) {
    out += r;
    out += '\n';
  }
  return out;
}

std::string Session::trace_tsv(const ConvergenceStats& stats) {
  std::ostringstream os;
  os << "iteration\tstep\trmse\tdisagreement\tbest_primal\n";
  for (const IterationStats& s : stats.trace) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d\t%.6f\t%.6f\t%.6f\t%.6f\n", s.iteration,
                  s.step, s.rmse, s.disagreement, s.best_primal);
    os << buf;
  }
  return os.str();
}

}  // namespace dmln
