#include "core/solvers/chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/util.hpp"

namespace dmln {

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  double m = -kHardWeight;
  for (double x : xs) m = std::max(m, x);
  if (std::isinf(m) && m < 0) return m;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

void ChainModel::validate() const {
  size_t w = static_cast<size_t>(width());
  for (const auto& row : node)
    if (row.size() != w) throw SemanticError("node potential table size");
  if (!node.empty() && edge.size() != node.size() - 1)
    throw SemanticError("edge potential table count");
  for (const auto& table : edge) {
    if (table.size() != w) throw SemanticError("edge potential table size");
    for (const auto& row : table)
      if (row.size() != w) throw SemanticError("edge potential table size");
  }
}

ChainMapResult chain_map(const ChainModel& model) {
  model.validate();
  ChainMapResult out;
  int n = model.length();
  if (n == 0) return out;
  int w = model.width();
  std::vector<std::vector<double>> best(static_cast<size_t>(n),
                                        std::vector<double>(w, kHardWeight));
  std::vector<std::vector<int>> back(static_cast<size_t>(n),
                                     std::vector<int>(w, 0));
  for (int l = 0; l < w; ++l) best[0][static_cast<size_t>(l)] = model.node[0][static_cast<size_t>(l)];
  for (int i = 1; i < n; ++i) {
    for (int l = 0; l < w; ++l) {
      double b = kHardWeight;
      int arg = 0;
      for (int pl = 0; pl < w; ++pl) {
        double c = best[static_cast<size_t>(i - 1)][static_cast<size_t>(pl)] +
                   model.edge[static_cast<size_t>(i - 1)][static_cast<size_t>(pl)][static_cast<size_t>(l)];
        if (c < b) {  // strict: ties keep the lowest previous label
          b = c;
          arg = pl;
        }
      }
      best[static_cast<size_t>(i)][static_cast<size_t>(l)] =
          b + model.node[static_cast<size_t>(i)][static_cast<size_t>(l)];
      back[static_cast<size_t>(i)][static_cast<size_t>(l)] = arg;
    }
  }
  int last = 0;
  for (int l = 1; l < w; ++l)
    if (best[static_cast<size_t>(n - 1)][static_cast<size_t>(l)] <
        best[static_cast<size_t>(n - 1)][static_cast<size_t>(last)])
      last = l;
  out.cost = best[static_cast<size_t>(n - 1)][static_cast<size_t>(last)];
  if (std::isinf(out.cost)) {
    out.infeasible = true;
    out.labels.assign(static_cast<size_t>(n), 0);
    return out;
  }
  out.labels.assign(static_cast<size_t>(n), 0);
  out.labels[static_cast<size_t>(n - 1)] = last;
  for (int i = n - 1; i > 0; --i)
    out.labels[static_cast<size_t>(i - 1)] =
        back[static_cast<size_t>(i)][static_cast<size_t>(out.labels[static_cast<size_t>(i)])];
  return out;
}

ChainMarginalResult chain_marginal(const ChainModel& model) {
  model.validate();
  ChainMarginalResult out;
  int n = model.length();
  if (n == 0) return out;
  int w = model.width();
  // log-space alpha/beta with scores = -penalty
  std::vector<std::vector<double>> alpha(static_cast<size_t>(n),
                                         std::vector<double>(w));
  std::vector<std::vector<double>> beta(static_cast<size_t>(n),
                                        std::vector<double>(w));
  for (int l = 0; l < w; ++l)
    alpha[0][static_cast<size_t>(l)] = -model.node[0][static_cast<size_t>(l)];
  for (int i = 1; i < n; ++i)
    for (int l = 0; l < w; ++l) {
      std::vector<double> terms(static_cast<size_t>(w));
      for (int pl = 0; pl < w; ++pl)
        terms[static_cast<size_t>(pl)] =
            alpha[static_cast<size_t>(i - 1)][static_cast<size_t>(pl)] -
            model.edge[static_cast<size_t>(i - 1)][static_cast<size_t>(pl)][static_cast<size_t>(l)];
      alpha[static_cast<size_t>(i)][static_cast<size_t>(l)] =
          log_sum_exp(terms) - model.node[static_cast<size_t>(i)][static_cast<size_t>(l)];
    }
  for (int l = 0; l < w; ++l) beta[static_cast<size_t>(n - 1)][static_cast<size_t>(l)] = 0;
  for (int i = n - 2; i >= 0; --i)
    for (int l = 0; l < w; ++l) {
      std::vector<double> terms(static_cast<size_t>(w));
      for (int nl = 0; nl < w; ++nl)
        terms[static_cast<size_t>(nl)] =
            beta[static_cast<size_t>(i + 1)][static_cast<size_t>(nl)] -
            model.edge[static_cast<size_t>(i)][static_cast<size_t>(l)][static_cast<size_t>(nl)] -
            model.node[static_cast<size_t>(i + 1)][static_cast<size_t>(nl)];
      beta[static_cast<size_t>(i)][static_cast<size_t>(l)] = log_sum_exp(terms);
    }
  out.probability.assign(static_cast<size_t>(n), std::vector<double>(w, 0.0));
  for (int i = 0; i < n; ++i) {
    std::vector<double> logp(static_cast<size_t>(w));
    for (int l = 0; l < w; ++l)
      logp[static_cast<size_t>(l)] = alpha[static_cast<size_t>(i)][static_cast<size_t>(l)] +
                                     beta[static_cast<size_t>(i)][static_cast<size_t>(l)];
    double z = log_sum_exp(logp);
    if (std::isinf(z) && z < 0) {
      out.infeasible = true;
      return out;
    }
    for (int l = 0; l < w; ++l)
      out.probability[static_cast<size_t>(i)][static_cast<size_t>(l)] =
          std::exp(logp[static_cast<size_t>(l)] - z);
  }
  return out;
}

namespace {

struct ChainStructure {
  std::vector<std::vector<int>> chains;  // key constants in order
  bool ok = true;
};

// Orders the active key constants along the TrREC evidence relation's
// successor edges. Keys touched by no edge form length-1 chains.
ChainStructure build_chains(const TaskInput& input,
                            const std::set<int>& keys, int chain_pred) {
  ChainStructure out;
  const MLNProgram& program = *input.db->program;
  std::map<int, int> succ;
  std::set<int> has_pred;
  for (const EvidenceAtom& ev : program.evidence) {
    if (ev.predicate != chain_pred || !ev.positive) continue;
    int a = ev.constants[0], b = ev.constants[1];
    if (!keys.count(a) || !keys.count(b)) continue;
    auto [it, inserted] = succ.emplace(a, b);
    if (!inserted && it->second != b) {
      out.ok = false;  // not functional on the data
      return out;
    }
    has_pred.insert(b);
  }
  std::set<int> placed;
  for (int k : keys) {
    if (has_pred.count(k) || placed.count(k)) continue;
    std::vector<int> chain;
    int cur = k;
    while (true) {
      if (placed.count(cur)) {
        out.ok = false;  // would revisit: cycle
        return out;
      }
      chain.push_back(cur);
      placed.insert(cur);
      auto it = succ.find(cur);
      if (it == succ.end()) break;
      cur = it->second;
    }
    out.chains.push_back(std::move(chain));
  }
  if (placed.size() != keys.size()) out.ok = false;  // cycle remained
  return out;
}

}  // namespace

SolverResult run_chain_task(const TaskInput& input, bool marginal) {
  SolverResult out;
  out.assignment.assign(input.atoms.size(), 0);
  if (marginal) out.marginals.assign(input.atoms.size(), 0.0);
  for (size_t i = 0; i < input.atoms.size(); ++i) {
    if (input.owned[i]) continue;
    out.assignment[i] = input.input_values[i];
    if (marginal) out.marginals[i] = 1.0 / (1.0 + std::exp(-input.priors[i]));
  }

  ConditionedView view = condition_on_inputs(input);
  out.cost = view.base_cost;
  const Task& task = *input.task;
  int rel = task.owned_relations.at(0);
  const MLNProgram& program = *input.db->program;
  int value_dom = program.predicates[static_cast<size_t>(rel)]
                      .domains[static_cast<size_t>(task.value_pos)];

  std::vector<int> labels = program.symbols.sorted_constants(value_dom);
  std::map<int, int> label_index;  // constant -> 1..L
  for (size_t i = 0; i < labels.size(); ++i)
    label_index.emplace(labels[i], static_cast<int>(i) + 1);

  // group owned atoms by key
  std::map<int, std::vector<int>> atoms_by_key;
  std::set<int> keys;
  auto key_of = [&](int local) {
    const GroundAtom& atom =
        input.db->atoms[static_cast<size_t>(input.atoms[static_cast<size_t>(local)])];
    return atom.args[static_cast<size_t>(task.key_pos)];
  };
  auto label_of = [&](int local) {
    const GroundAtom& atom =
        input.db->atoms[static_cast<size_t>(input.atoms[static_cast<size_t>(local)])];
    return label_index.at(atom.args[static_cast<size_t>(task.value_pos)]);
  };
  for (size_t i = 0; i < input.atoms.size(); ++i)
    if (input.owned[i]) {
      atoms_by_key[key_of(static_cast<int>(i))].push_back(static_cast<int>(i));
      keys.insert(key_of(static_cast<int>(i)));
    }

  ChainStructure structure = build_chains(input, keys, task.chain_pred);
  if (!structure.ok) {
    out.infeasible = true;
    out.message = "chain structure is not a set of simple chains";
    return out;
  }
  std::map<int, std::pair<int, int>> position;  // key -> (chain, offset)
  for (size_t c = 0; c < structure.chains.size(); ++c)
    for (size_t i = 0; i < structure.chains[c].size(); ++i)
      position.emplace(structure.chains[c][i],
                       std::make_pair(static_cast<int>(c), static_cast<int>(i)));

  int w = static_cast<int>(labels.size()) + 1;
  std::vector<ChainModel> models(structure.chains.size());
  for (size_t c = 0; c < structure.chains.size(); ++c) {
    models[c].label_count = static_cast<int>(labels.size());
    models[c].node.assign(structure.chains[c].size(),
                          std::vector<double>(static_cast<size_t>(w), 0.0));
    if (structure.chains[c].size() > 1)
      models[c].edge.assign(
          structure.chains[c].size() - 1,
          std::vector<std::vector<double>>(
              static_cast<size_t>(w),
              std::vector<double>(static_cast<size_t>(w), 0.0)));
  }

  // clause penalties: evaluate each residual clause under candidate labels
  for (const GroundClause& clause : view.clauses) {
    std::set<int> clause_keys;
    for (const GroundLiteral& lit : clause.literals)
      clause_keys.insert(key_of(lit.atom));
    if (clause_keys.size() == 1) {
      int key = *clause_keys.begin();
      auto [c, offset] = position.at(key);
      std::vector<double>& row = models[static_cast<size_t>(c)]
                                     .node[static_cast<size_t>(offset)];
      for (int l = 0; l < w; ++l) {
        bool satisfied = false;
        for (const GroundLiteral& lit : clause.literals)
          if ((label_of(lit.atom) == l) == lit.positive) satisfied = true;
        bool violated = clause.weight > 0 ? !satisfied
                        : clause.weight < 0 ? satisfied
                                            : false;
        if (violated) row[static_cast<size_t>(l)] += std::abs(clause.weight);
      }
    } else if (clause_keys.size() == 2) {
      auto it = clause_keys.begin();
      int ka = *it++;
      int kb = *it;
      auto [ca, oa] = position.at(ka);
      auto [cb, ob] = position.at(kb);
      if (ca != cb || std::abs(oa - ob) != 1) {
        out.infeasible = true;
        out.message = "clause couples non-adjacent keys";
        return out;
      }
      if (oa > ob) {
        std::swap(ka, kb);
        std::swap(oa, ob);
      }
      auto& table =
          models[static_cast<size_t>(ca)].edge[static_cast<size_t>(oa)];
      for (int la = 0; la < w; ++la)
        for (int lb = 0; lb < w; ++lb) {
          bool satisfied = false;
          for (const GroundLiteral& lit : clause.literals) {
            int l = key_of(lit.atom) == ka ? la : lb;
            if ((label_of(lit.atom) == l) == lit.positive) satisfied = true;
          }
          bool violated = clause.weight > 0 ? !satisfied
                          : clause.weight < 0 ? satisfied
                                              : false;
          if (violated)
            table[static_cast<size_t>(la)][static_cast<size_t>(lb)] +=
                std::abs(clause.weight);
        }
    } else {
      out.infeasible = true;
      out.message = "clause couples more than two keys";
      return out;
    }
  }

  // priors as singleton penalties
  for (const auto& [key, locals] : atoms_by_key) {
    auto [c, offset] = position.at(key);
    std::vector<double>& row =
        models[static_cast<size_t>(c)].node[static_cast<size_t>(offset)];
    for (int local : locals) {
      double lambda = input.priors[static_cast<size_t>(local)];
      if (lambda == 0) continue;
      int li = label_of(local);
      for (int l = 0; l < w; ++l) row[static_cast<size_t>(l)] += prior_cost(lambda, l == li);
    }
  }

  for (size_t c = 0; c < structure.chains.size(); ++c) {
    if (marginal) {
      ChainMarginalResult r = chain_marginal(models[c]);
      if (r.infeasible) {
        out.infeasible = true;
        out.message = "hard-infeasible chain";
        return out;
      }
      ChainMapResult m = chain_map(models[c]);
      out.cost += m.cost;
      for (size_t i = 0; i < structure.chains[c].size(); ++i) {
        int key = structure.chains[c][i];
        for (int local : atoms_by_key.at(key)) {
          int li = label_of(local);
          out.marginals[static_cast<size_t>(local)] = r.probability[i][static_cast<size_t>(li)];
          out.assignment[static_cast<size_t>(local)] = m.labels[i] == li;
        }
      }
    } else {
      ChainMapResult r = chain_map(models[c]);
      if (r.infeasible) {
        out.infeasible = true;
        out.message = "hard-infeasible chain";
        return out;
      }
      out.cost += r.cost;
      for (size_t i = 0; i < structure.chains[c].size(); ++i) {
        int key = structure.chains[c][i];
        for (int local : atoms_by_key.at(key))
          out.assignment[static_cast<size_t>(local)] =
              r.labels[i] == label_of(local);
      }
    }
  }
  return out;
}

}  // namespace dmln
