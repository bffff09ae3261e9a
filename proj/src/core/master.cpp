#include "core/master.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <thread>

#include "core/rng.hpp"
#include "core/solvers/chain.hpp"
#include "core/solvers/classification.hpp"
#include "core/solvers/coref.hpp"
#include "core/util.hpp"

namespace dmln {

double MultiplierStore::get(int atom, int task) const {
  auto it = lambda.find(atom);
  if (it == lambda.end()) return 0;
  auto jt = it->second.find(task);
  return jt == it->second.end() ? 0 : jt->second;
}

double MultiplierStore::sum(int atom) const {
  auto it = lambda.find(atom);
  if (it == lambda.end()) return 0;
  double s = 0;
  for (const auto& [task, v] : it->second) s += v;
  return s;
}

void update_multipliers(const SharedVariableRegistry& registry,
                        MultiplierStore& store, double alpha) {
  for (const auto& [atom, tasks] : registry.tasks_of_atom) {
    auto it = registry.copies.find(atom);
    if (it == registry.copies.end() ||
        it->second.size() != tasks.size())
      throw SemanticError(cat("missing copy report for atom ", atom));
    double mean = 0;
    for (const auto& [task, v] : it->second) mean += v;
    mean /= static_cast<double>(it->second.size());
    for (const auto& [task, v] : it->second)
      store.lambda[atom][task] -= alpha * (v - mean);
  }
}

std::vector<std::vector<int>> partition_task(
    int atom_count, const std::vector<GroundClause>& clauses) {
  std::vector<int> parent(static_cast<size_t>(atom_count));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (const GroundClause& c : clauses)
    for (size_t i = 1; i < c.literals.size(); ++i)
      parent[static_cast<size_t>(find(c.literals[i].atom))] =
          find(c.literals[0].atom);
  std::map<int, std::vector<int>> groups;
  for (int a = 0; a < atom_count; ++a) groups[find(a)].push_back(a);
  std::vector<std::vector<int>> out;
  for (auto& [root, atoms] : groups) out.push_back(std::move(atoms));
  return out;
}

Master::Master(const GroundDatabase& db, const LogicalPlan& plan,
               MasterConfig config)
    : db_(db), plan_(plan), config_(std::move(config)) {
  weight_scale_ =
      config_.marginal ? static_cast<double>(plan_.tasks.size()) : 1.0;

  // per-task atom universes and local clause views
  std::map<int, std::vector<int>> clauses_by_rule;
  for (size_t c = 0; c < db_.clauses.size(); ++c)
    clauses_by_rule[db_.clauses[c].rule_index].push_back(static_cast<int>(c));

  runtimes_.resize(plan_.tasks.size());
  for (size_t t = 0; t < plan_.tasks.size(); ++t) {
    const Task& task = plan_.tasks[t];
    TaskRuntime& rt = runtimes_[t];
    for (int rel : task.relations) {
      std::vector<int> atoms = db_.atoms_of(rel);
      rt.atoms.insert(rt.atoms.end(), atoms.begin(), atoms.end());
    }
    std::sort(rt.atoms.begin(), rt.atoms.end());
    rt.owned.assign(rt.atoms.size(), 0);
    std::map<int, int> local;
    for (size_t i = 0; i < rt.atoms.size(); ++i) {
      local.emplace(rt.atoms[i], static_cast<int>(i));
      int rel = db_.atoms[static_cast<size_t>(rt.atoms[i])].predicate;
      auto owner = plan_.owner.find(rel);
      rt.owned[i] =
          owner != plan_.owner.end() && owner->second == static_cast<int>(t);
    }
    for (int ri : task.rules) {
      auto it = clauses_by_rule.find(ri);
      if (it == clauses_by_rule.end()) continue;
      for (int ci : it->second) {
        GroundClause clause = db_.clauses[static_cast<size_t>(ci)];
        if (!is_hard(clause.weight)) clause.weight *= weight_scale_;
        for (GroundLiteral& lit : clause.literals)
          lit.atom = local.at(lit.atom);
        rt.clauses.push_back(std::move(clause));
      }
    }
  }

  // shared atoms, relation level
  for (int rel : plan_.shared_relations) {
    const std::vector<int>& tasks = plan_.relation_tasks.at(rel);
    for (int atom : db_.atoms_of(rel)) {
      registry_.tasks_of_atom.emplace(atom, tasks);
      for (int t : tasks) store_.lambda[atom][t] = 0;
    }
  }
}

double Master::copy_value(int task, int atom) const {
  auto it = registry_.copies.find(atom);
  if (it != registry_.copies.end()) {
    auto jt = it->second.find(task);
    if (jt != it->second.end()) return jt->second;
    // fall back to any reported copy (bootstrap predecessors)
    if (!it->second.empty()) return it->second.begin()->second;
  }
  return 0;
}

TaskInput Master::build_input(int task, bool bootstrap) {
  TaskInput input;
  const TaskRuntime& rt = runtimes_[static_cast<size_t>(task)];
  input.task = &plan_.tasks[static_cast<size_t>(task)];
  input.db = &db_;
  input.atoms = rt.atoms;
  input.owned = rt.owned;
  input.clauses = rt.clauses;
  input.weight_scale = weight_scale_;
  input.priors.assign(rt.atoms.size(), 0.0);
  input.input_values.assign(rt.atoms.size(), 0);
  for (size_t i = 0; i < rt.atoms.size(); ++i) {
    double lambda = store_.get(rt.atoms[i], task);
    input.priors[i] = lambda;
    if (rt.owned[i]) continue;
    if (bootstrap) {
      // copy shared inputs from predecessors' outputs
      input.input_values[i] = copy_value(task, rt.atoms[i]) >= 0.5 ? 1 : 0;
    } else {
      // multiplier sign decides; zero keeps the closed-world default
      input.input_values[i] = lambda > 0 ? 1 : 0;
    }
  }
  input.build_index();
  return input;
}

SolverResult Master::solve_task(int task, int iteration, bool bootstrap) {
  TaskInput input = build_input(task, bootstrap);
  std::uint64_t seed = derive_seed(config_.seed, static_cast<std::uint64_t>(task),
                                   static_cast<std::uint64_t>(iteration));
  switch (plan_.tasks[static_cast<size_t>(task)].kind) {
    case TaskKind::Coref:
      return run_coref_task(input, seed, config_.marginal);
    case TaskKind::SimpleClassification:
      return run_classification_task(input, config_.marginal);
    case TaskKind::CorrelatedClassification:
      return run_chain_task(input, config_.marginal);
    case TaskKind::Generic:
      break;
  }
  // generic: solve independent components separately
  SolverResult out;
  out.assignment.assign(input.atoms.size(), 0);
  if (config_.marginal) out.marginals.assign(input.atoms.size(), 0.0);
  std::vector<std::vector<int>> components =
      partition_task(static_cast<int>(input.atoms.size()), input.clauses);
  std::map<int, int> component_of;
  for (size_t c = 0; c < components.size(); ++c)
    for (int a : components[c]) component_of.emplace(a, static_cast<int>(c));

  for (size_t c = 0; c < components.size(); ++c) {
    TaskInput sub;
    sub.task = input.task;
    sub.db = input.db;
    sub.weight_scale = input.weight_scale;
    std::map<int, int> remap;
    for (int a : components[c]) {
      remap.emplace(a, static_cast<int>(sub.atoms.size()));
      sub.atoms.push_back(input.atoms[static_cast<size_t>(a)]);
      sub.owned.push_back(input.owned[static_cast<size_t>(a)]);
      sub.priors.push_back(input.priors[static_cast<size_t>(a)]);
      sub.input_values.push_back(input.input_values[static_cast<size_t>(a)]);
    }
    for (const GroundClause& clause : input.clauses) {
      if (clause.literals.empty()) continue;
      if (component_of.at(clause.literals[0].atom) != static_cast<int>(c))
        continue;
      GroundClause copy = clause;
      for (GroundLiteral& lit : copy.literals) lit.atom = remap.at(lit.atom);
      sub.clauses.push_back(std::move(copy));
    }
    sub.build_index();
    std::uint64_t sub_seed = splitmix64(seed ^ (0x51edULL * (c + 1)));
    SolverResult r;
    if (sub.clauses.empty()) {
      // unconstrained component: only the multiplier singletons speak
      r.assignment.resize(sub.atoms.size());
      if (config_.marginal) r.marginals.resize(sub.atoms.size());
      for (size_t i = 0; i < sub.atoms.size(); ++i) {
        r.assignment[i] = sub.priors[i] > 0 ? 1 : 0;
        if (config_.marginal)
          r.marginals[i] = 1.0 / (1.0 + std::exp(-sub.priors[i]));
      }
    } else if (config_.marginal) {
      r = run_generic_task_marginal(sub, config_.gibbs, sub_seed);
    } else {
      r = run_generic_task_map(sub, config_.walksat, sub_seed);
    }
    out.cost += r.cost;
    if (r.infeasible) {
      out.infeasible = true;
      out.message = r.message;
    }
    for (size_t i = 0; i < sub.atoms.size(); ++i) {
      size_t full = static_cast<size_t>(components[c][i]);
      out.assignment[full] = r.assignment[i];
      if (config_.marginal) out.marginals[full] = r.marginals[i];
    }
  }
  return out;
}

void Master::record_copies(int task) {
  const TaskRuntime& rt = runtimes_[static_cast<size_t>(task)];
  const SolverResult& r = rt.last;
  for (size_t i = 0; i < rt.atoms.size(); ++i) {
    int atom = rt.atoms[i];
    if (!registry_.tasks_of_atom.count(atom)) continue;
    double value = config_.marginal ? r.marginals[i]
                                    : (r.assignment[i] ? 1.0 : 0.0);
    registry_.copies[atom][task] = value;
  }
}

void Master::solve_all(int iteration) {
  int workers = std::max(1, config_.workers);
  if (workers == 1 || plan_.tasks.size() <= 1) {
    for (size_t t = 0; t < plan_.tasks.size(); ++t)
      runtimes_[t].last = solve_task(static_cast<int>(t), iteration, false);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        size_t t = next.fetch_add(1);
        if (t >= plan_.tasks.size()) break;
        runtimes_[t].last = solve_task(static_cast<int>(t), iteration, false);
      }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (size_t t = 0; t < plan_.tasks.size(); ++t)
    record_copies(static_cast<int>(t));
}

World Master::assemble_world() const {
  World world(db_.atoms.size());
  for (size_t t = 0; t < plan_.tasks.size(); ++t) {
    const TaskRuntime& rt = runtimes_[t];
    if (rt.last.assignment.empty()) continue;
    for (size_t i = 0; i < rt.atoms.size(); ++i)
      if (rt.owned[i]) world.set(rt.atoms[i], rt.last.assignment[i] != 0);
  }
  return world;
}

std::vector<double> Master::assemble_marginals() const {
  std::vector<double> out(db_.atoms.size(), 0.0);
  for (size_t t = 0; t < plan_.tasks.size(); ++t) {
    const TaskRuntime& rt = runtimes_[t];
    if (rt.last.marginals.empty()) continue;
    for (size_t i = 0; i < rt.atoms.size(); ++i)
      if (rt.owned[i]) out[static_cast<size_t>(rt.atoms[i])] = rt.last.marginals[i];
  }
  // shared atoms: mean of final copies
  for (const auto& [atom, copies] : registry_.copies) {
    double mean = 0;
    for (const auto& [task, v] : copies) mean += v;
    if (!copies.empty())
      out[static_cast<size_t>(atom)] = mean / static_cast<double>(copies.size());
  }
  return out;
}

double Master::dual_value() const {
  // linear-form dual: sum of task costs minus the constant the singleton
  // encoding adds (max(lambda, 0) per multiplier)
  double d = db_.base_cost;
  for (size_t t = 0; t < plan_.tasks.size(); ++t)
    d += runtimes_[t].last.cost;
  for (const auto& [atom, per_task] : store_.lambda)
    for (const auto& kv : per_task) d -= std::max(kv.second, 0.0);
  return d;
}

RunResult Master::run() {
  RunResult out;
  if (std::isinf(db_.base_cost)) {
    out.infeasible = true;
    out.message = "evidence falsifies a hard clause";
    out.stats.stop_reason = "infeasible";
    return out;
  }

  // bootstrap pass in sigma order, copying shared inputs from predecessors
  for (int t : plan_.sigma) {
    runtimes_[static_cast<size_t>(t)].last = solve_task(t, 0, true);
    record_copies(t);
  }

  World best_world = assemble_world();
  double best_primal = world_cost(db_, best_world);

  auto shared_stats = [&](double* rmse, double* disagreement) {
    double sq = 0;
    size_t n = 0;
    size_t disagreeing = 0;
    size_t atoms = 0;
    for (const auto& [atom, copies] : registry_.copies) {
      if (copies.size() < 2) continue;
      ++atoms;
      double mean = 0, lo = 2, hi = -1;
      for (const auto& [task, v] : copies) {
        mean += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      mean /= static_cast<double>(copies.size());
      for (const auto& [task, v] : copies) {
        sq += (v - mean) * (v - mean);
        ++n;
      }
      double tol = config_.marginal ? config_.marginal_agree_tol : 0.5;
      if (hi - lo > tol) ++disagreeing;
    }
    *rmse = n ? std::sqrt(sq / static_cast<double>(n)) : 0.0;
    *disagreement =
        atoms ? static_cast<double>(disagreeing) / static_cast<double>(atoms)
              : 0.0;
  };

  int iterations_run = 0;
  std::string stop_reason = "max_iterations";
  if (registry_.tasks_of_atom.empty()) {
    // nothing shared: the bootstrap solves are final
    stop_reason = "no_shared_atoms";
  } else {
    for (int k = 0; k < config_.max_iterations; ++k) {
      solve_all(k + 1);
      double alpha = config_.schedule.at(k);
      update_multipliers(registry_, store_, alpha);
      iterations_run = k + 1;

      double rmse = 0, disagreement = 0;
      shared_stats(&rmse, &disagreement);
      if (!config_.marginal) {
        World candidate = assemble_world();
        double c = world_cost(db_, candidate);
        if (c < best_primal) {
          best_primal = c;
          best_world = std::move(candidate);
        }
      }
      out.stats.trace.push_back(
          {k + 1, alpha, rmse, disagreement, best_primal});
      if (disagreement <= config_.disagreement_threshold) {
        stop_reason = "agreement";
        break;
      }
    }
  }

  // infeasible task reports surface as run-level infeasibility
  for (size_t t = 0; t < plan_.tasks.size(); ++t) {
    if (runtimes_[t].last.infeasible) {
      out.infeasible = true;
      out.message = cat("task ", t, " (", plan_.tasks[t].name,
                        "): ", runtimes_[t].last.message);
    }
  }

  out.stats.iterations = iterations_run;
  out.stats.stop_reason = stop_reason;

  // finalization: each relation's copy comes from its owner; without full
  // agreement the answer is best-effort, so keep the best feasible primal
  // iterate seen
  out.world = assemble_world();
  if (config_.marginal) out.marginals = assemble_marginals();
  double final_cost = world_cost(db_, out.world);
  if (!config_.marginal && best_primal < final_cost) {
    out.world = best_world;
    final_cost = best_primal;
  }
  out.stats.final_cost = final_cost;

  if (std::isinf(final_cost) && !config_.marginal) {
    out.infeasible = true;
    out.message = "finalized world violates a hard rule";
  }

  if (!config_.marginal) {
    double rmse = 0, disagreement = 0;
    shared_stats(&rmse, &disagreement);
    double d = dual_value();
    out.stats.dual_value = d;
    out.stats.certified = !out.infeasible && disagreement == 0 &&
                          std::isfinite(final_cost) &&
                          std::abs(final_cost - d) <=
                              1e-6 * std::max(1.0, std::abs(final_cost));
  }
  return out;
}

}  // namespace dmln
