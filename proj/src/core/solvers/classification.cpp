#include "core/solvers/classification.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/util.hpp"

namespace dmln {

namespace {

// stable two-way softmax from penalties
double prob_from_costs(double cost_true, double cost_false) {
  if (std::isinf(cost_true) && std::isinf(cost_false)) return 0.5;
  if (std::isinf(cost_true)) return 0.0;
  if (std::isinf(cost_false)) return 1.0;
  double m = std::min(cost_true, cost_false);
  double et = std::exp(-(cost_true - m));
  double ef = std::exp(-(cost_false - m));
  return et / (et + ef);
}

struct ObjectCosts {
  double when_true = 0;
  double when_false = 0;
};

std::vector<ObjectCosts> object_costs(const ClassificationInput& input) {
  std::vector<ObjectCosts> costs(static_cast<size_t>(input.object_count));
  auto add = [&](int object, double w) {
    // a feature with weight w is a unit clause on the object: positive
    // weight charges for exclusion, negative for inclusion
    ObjectCosts& c = costs[static_cast<size_t>(object)];
    if (w > 0)
      c.when_false += w;
    else if (w < 0)
      c.when_true += -w;
  };
  for (const auto& [object, feature] : input.instance)
    add(object, input.model[static_cast<size_t>(feature)]);
  for (size_t o = 0; o < input.priors.size(); ++o)
    add(static_cast<int>(o), input.priors[o]);
  return costs;
}

}  // namespace

ClassificationResult classify_boolean_map(const ClassificationInput& input) {
  ClassificationResult out;
  std::vector<ObjectCosts> costs = object_costs(input);
  for (int o = 0; o < input.object_count; ++o) {
    const ObjectCosts& c = costs[static_cast<size_t>(o)];
    if (std::isinf(c.when_true) && std::isinf(c.when_false)) {
      out.infeasible = true;
      out.message = cat("object ", o, " has conflicting hard features");
      out.cost = kHardWeight;
      out.include.assign(static_cast<size_t>(input.object_count), 0);
      return out;
    }
    // sum-of-weights >= 0 is exactly cost_false >= cost_true
    bool in = c.when_false >= c.when_true;
    out.include.push_back(in ? 1 : 0);
    out.cost += in ? c.when_true : c.when_false;
  }
  return out;
}

ClassificationResult classify_boolean_marginal(const ClassificationInput& input) {
  ClassificationResult out = classify_boolean_map(input);
  if (out.infeasible) return out;
  std::vector<ObjectCosts> costs = object_costs(input);
  for (int o = 0; o < input.object_count; ++o) {
    const ObjectCosts& c = costs[static_cast<size_t>(o)];
    out.probability.push_back(prob_from_costs(c.when_true, c.when_false));
  }
  return out;
}

MulticlassResult classify_multiclass_map(const MulticlassInput& input) {
  MulticlassResult out;
  for (int k = 0; k < input.key_count; ++k) {
    const std::vector<double>& row = input.penalty[static_cast<size_t>(k)];
    int best = 0;
    for (int l = 1; l <= input.label_count; ++l)
      if (row[static_cast<size_t>(l)] < row[static_cast<size_t>(best)]) best = l;
    if (std::isinf(row[static_cast<size_t>(best)])) {
      out.infeasible = true;
      out.cost = kHardWeight;
      out.label.assign(static_cast<size_t>(input.key_count), 0);
      return out;
    }
    out.label.push_back(best);
    out.cost += row[static_cast<size_t>(best)];
  }
  return out;
}

MulticlassResult classify_multiclass_marginal(const MulticlassInput& input) {
  MulticlassResult out = classify_multiclass_map(input);
  if (out.infeasible) return out;
  for (int k = 0; k < input.key_count; ++k) {
    const std::vector<double>& row = input.penalty[static_cast<size_t>(k)];
    double m = *std::min_element(row.begin(), row.end());
    std::vector<double> p(row.size());
    double z = 0;
    for (size_t l = 0; l < row.size(); ++l) {
      p[l] = std::isinf(row[l]) ? 0.0 : std::exp(-(row[l] - m));
      z += p[l];
    }
    for (double& v : p) v /= z;
    out.probability.push_back(std::move(p));
  }
  return out;
}

namespace {

// Orders the active labels of a value domain lexicographically by constant
// name; index 0 is reserved for "no label".
std::vector<int> label_order(const TaskInput& input, int rel, int value_pos) {
  const MLNProgram& program = *input.db->program;
  int dom = program.predicates[static_cast<size_t>(rel)].domains[
      static_cast<size_t>(value_pos)];
  return program.symbols.sorted_constants(dom);
}

}  // namespace

SolverResult run_classification_task(const TaskInput& input, bool marginal) {
  SolverResult out;
  out.assignment.assign(input.atoms.size(), 0);
  if (marginal) out.marginals.assign(input.atoms.size(), 0.0);

  // non-owned atoms report their conditioning value / prior belief
  for (size_t i = 0; i < input.atoms.size(); ++i) {
    if (input.owned[i]) continue;
    out.assignment[i] = input.input_values[i];
    if (marginal)
      out.marginals[i] = 1.0 / (1.0 + std::exp(-input.priors[i]));
  }

  ConditionedView view = condition_on_inputs(input);
  out.cost = view.base_cost;
  const Task& task = *input.task;
  int rel = task.owned_relations.at(0);

  if (task.key_pos < 0) {
    // Boolean objects: every owned atom is one in/out decision
    std::vector<int> objects;  // local atom index per object
    std::map<int, int> object_of_local;
    for (size_t i = 0; i < input.atoms.size(); ++i)
      if (input.owned[i]) {
        object_of_local.emplace(static_cast<int>(i),
                                static_cast<int>(objects.size()));
        objects.push_back(static_cast<int>(i));
      }
    ClassificationInput ci;
    ci.object_count = static_cast<int>(objects.size());
    ci.priors.assign(objects.size(), 0.0);
    for (size_t o = 0; o < objects.size(); ++o)
      ci.priors[o] = input.priors[static_cast<size_t>(objects[o])];
    for (const GroundClause& clause : view.clauses) {
      if (clause.literals.size() != 1) {
        out.infeasible = true;
        out.message = "classification task with a non-unit residual clause";
        return out;
      }
      const GroundLiteral& lit = clause.literals[0];
      // signed feature weight: a negated head flips the direction
      double w = lit.positive ? clause.weight : -clause.weight;
      ci.model.push_back(w);
      ci.instance.emplace_back(object_of_local.at(lit.atom),
                               static_cast<int>(ci.model.size()) - 1);
    }
    ClassificationResult r =
        marginal ? classify_boolean_marginal(ci) : classify_boolean_map(ci);
    if (r.infeasible) {
      out.infeasible = true;
      out.message = r.message;
      return out;
    }
    for (size_t o = 0; o < objects.size(); ++o) {
      out.assignment[static_cast<size_t>(objects[o])] = r.include[o];
      if (marginal)
        out.marginals[static_cast<size_t>(objects[o])] = r.probability[o];
    }
    out.cost += r.cost;
    return out;
  }

  // Multiclass: group owned atoms by key constant; labels are the value
  // domain in name order, plus "none".
  std::vector<int> labels = label_order(input, rel, task.value_pos);
  std::map<int, int> label_index;  // constant -> 1..L
  for (size_t i = 0; i < labels.size(); ++i)
    label_index.emplace(labels[i], static_cast<int>(i) + 1);

  std::map<int, std::vector<int>> atoms_by_key;  // key constant -> local atoms
  for (size_t i = 0; i < input.atoms.size(); ++i) {
    if (!input.owned[i]) continue;
    const GroundAtom& atom = input.db->atoms[static_cast<size_t>(input.atoms[i])];
    atoms_by_key[atom.args[static_cast<size_t>(task.key_pos)]].push_back(
        static_cast<int>(i));
  }
  std::vector<int> keys;
  std::map<int, int> key_slot;
  for (const auto& [k, _] : atoms_by_key) {
    key_slot.emplace(k, static_cast<int>(keys.size()));
    keys.push_back(k);
  }

  MulticlassInput mi;
  mi.key_count = static_cast<int>(keys.size());
  mi.label_count = static_cast<int>(labels.size());
  mi.penalty.assign(keys.size(),
                    std::vector<double>(labels.size() + 1, 0.0));

  auto atom_label = [&](int local) {
    const GroundAtom& atom = input.db->atoms[static_cast<size_t>(input.atoms[
        static_cast<size_t>(local)])];
    return label_index.at(atom.args[static_cast<size_t>(task.value_pos)]);
  };
  auto atom_key = [&](int local) {
    const GroundAtom& atom = input.db->atoms[static_cast<size_t>(input.atoms[
        static_cast<size_t>(local)])];
    return atom.args[static_cast<size_t>(task.key_pos)];
  };

  for (const GroundClause& clause : view.clauses) {
    int key = -1;
    for (const GroundLiteral& lit : clause.literals) {
      int k = atom_key(lit.atom);
      if (key == -1) key = k;
      if (k != key) {
        out.infeasible = true;
        out.message = "classification clause couples two keys";
        return out;
      }
    }
    std::vector<double>& row = mi.penalty[static_cast<size_t>(key_slot.at(key))];
    for (size_t l = 0; l < row.size(); ++l) {
      bool satisfied = false;
      for (const GroundLiteral& lit : clause.literals) {
        bool value = atom_label(lit.atom) == static_cast<int>(l);
        if (value == lit.positive) satisfied = true;
      }
      bool violated = clause.weight > 0 ? !satisfied
                      : clause.weight < 0 ? satisfied
                                          : false;
      if (violated) row[l] += std::abs(clause.weight);
    }
  }
  // priors are singleton clauses on individual atoms
  for (const auto& [key, locals] : atoms_by_key) {
    std::vector<double>& row = mi.penalty[static_cast<size_t>(key_slot.at(key))];
    for (int local : locals) {
      double lambda = input.priors[static_cast<size_t>(local)];
      if (lambda == 0) continue;
      int li = atom_label(local);
      for (size_t l = 0; l < row.size(); ++l)
        row[l] += prior_cost(lambda, static_cast<int>(l) == li);
    }
  }

  MulticlassResult r = marginal ? classify_multiclass_marginal(mi)
                                : classify_multiclass_map(mi);
  if (r.infeasible) {
    out.infeasible = true;
    out.message = "conflicting hard penalties on one key";
    return out;
  }
  for (const auto& [key, locals] : atoms_by_key) {
    int slot = key_slot.at(key);
    for (int local : locals) {
      int li = atom_label(local);
      out.assignment[static_cast<size_t>(local)] = r.label[static_cast<size_t>(slot)] == li;
      if (marginal)
        out.marginals[static_cast<size_t>(local)] =
            r.probability[static_cast<size_t>(slot)][static_cast<size_t>(li)];
    }
  }
  out.cost += r.cost;
  return out;
}

}  // namespace dmln
