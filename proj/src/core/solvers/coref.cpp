#include "core/solvers/coref.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "core/rng.hpp"
#include "core/util.hpp"

namespace dmln {

CorefGraph::Edge CorefGraph::edge(int a, int b) const {
  auto it = edges.find(std::minmax(a, b));
  return it == edges.end() ? Edge{} : it->second;
}

void CorefGraph::add(int a, int b, double soft, int hard) {
  if (a == b) return;
  Edge& e = edges[std::minmax(a, b)];
  e.soft += soft;
  if (hard != 0) {
    if (e.hard != 0 && e.hard != hard)
      e.hard = 2;  // marks a must/cannot conflict, detected by the solver
    else
      e.hard = hard;
  }
}

std::vector<int> CorefGraph::positive_neighbors(int node) const {
  if (neighbor_oracle) return neighbor_oracle(node);
  std::vector<int> out;
  for (const auto& [key, e] : edges) {
    if (key.first != node && key.second != node) continue;
    if (e.hard == 1 || (e.hard == 0 && e.soft > 0))
      out.push_back(key.first == node ? key.second : key.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double coref_cost(const CorefGraph& graph, const std::vector<int>& cluster) {
  double cost = 0;
  for (const auto& [key, e] : graph.edges) {
    bool together = cluster[static_cast<size_t>(key.first)] ==
                    cluster[static_cast<size_t>(key.second)];
    if (e.hard == 1 && !together) return kHardWeight;
    if (e.hard == -1 && together) return kHardWeight;
    if (together && e.soft < 0) cost += -e.soft;
    if (!together && e.soft > 0) cost += e.soft;
  }
  return cost;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

}  // namespace

CorefResult solve_coref(const CorefGraph& graph, std::uint64_t seed) {
  CorefResult out;
  int n = graph.node_count;
  out.cluster.assign(static_cast<size_t>(n), -1);

  // contract must-links
  UnionFind uf(n);
  for (const auto& [key, e] : graph.edges) {
    if (e.hard == 2) {
      out.infeasible = true;
      out.message = "pair is both must-link and cannot-link";
      return out;
    }
    if (e.hard == 1) uf.unite(key.first, key.second);
  }
  // cannot-link inside one contracted group is unsatisfiable
  for (const auto& [key, e] : graph.edges) {
    if (e.hard == -1 && uf.find(key.first) == uf.find(key.second)) {
      out.infeasible = true;
      out.message = "must-link path joins a cannot-link pair";
      return out;
    }
  }

  // supernode adjacency: positive soft weight sums and cannot-links
  std::map<int, std::set<int>> members;
  for (int v = 0; v < n; ++v) members[uf.find(v)].insert(v);
  std::map<std::pair<int, int>, double> soft;
  std::set<std::pair<int, int>> cannot;
  for (const auto& [key, e] : graph.edges) {
    int a = uf.find(key.first), b = uf.find(key.second);
    if (a == b) continue;
    auto k = std::minmax(a, b);
    if (e.hard == -1)
      cannot.insert(k);
    else if (e.hard == 0)
      soft[k] += e.soft;
  }

  std::vector<int> supers;
  for (const auto& [root, _] : members) supers.push_back(root);
  Rng rng(seed);
  std::vector<int> order = supers;
  std::shuffle(order.begin(), order.end(), rng);

  std::map<int, int> assigned;  // supernode -> cluster id
  int next_cluster = 0;
  for (int pivot : order) {
    if (assigned.count(pivot)) continue;
    int cluster = next_cluster++;
    assigned[pivot] = cluster;
    std::vector<int> chosen{pivot};
    // positive-weight neighborhood probe of the pivot, supernode level;
    // uses the injected oracle on representatives when present
    std::vector<int> neighbors;
    for (int member : members.at(pivot))
      for (int v : graph.positive_neighbors(member)) {
        int s = uf.find(v);
        if (s != pivot) neighbors.push_back(s);
      }
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()),
                    neighbors.end());
    for (int cand : neighbors) {
      if (assigned.count(cand)) continue;
      auto k = std::minmax(pivot, cand);
      if (!soft.count(k) || soft.at(k) <= 0) continue;
      bool blocked = false;
      for (int member : chosen)
        if (cannot.count(std::minmax(member, cand))) blocked = true;
      if (blocked) continue;
      assigned[cand] = cluster;
      chosen.push_back(cand);
    }
  }

  for (int v = 0; v < n; ++v)
    out.cluster[static_cast<size_t>(v)] = assigned.at(uf.find(v));
  out.cost = coref_cost(graph, out.cluster);
  return out;
}

SolverResult run_coref_task(const TaskInput& input, std::uint64_t seed,
                            bool marginal) {
  SolverResult out;
  out.assignment.assign(input.atoms.size(), 0);
  if (marginal) out.marginals.assign(input.atoms.size(), 0.0);
  for (size_t i = 0; i < input.atoms.size(); ++i) {
    if (input.owned[i]) continue;
    out.assignment[i] = input.input_values[i];
    if (marginal) out.marginals[i] = 1.0 / (1.0 + std::exp(-input.priors[i]));
  }

  const Task& task = *input.task;
  int rel = task.owned_relations.at(0);
  const MLNProgram& program = *input.db->program;
  int dom = program.predicates[static_cast<size_t>(rel)].domains[0];

  // nodes: the active mention constants
  std::vector<int> nodes = program.symbols.sorted_constants(dom);
  std::map<int, int> node_index;
  for (size_t i = 0; i < nodes.size(); ++i)
    node_index.emplace(nodes[i], static_cast<int>(i));

  CorefGraph graph;
  graph.node_count = static_cast<int>(nodes.size());

  ConditionedView view = condition_on_inputs(input);
  out.cost = view.base_cost;

  auto pair_of = [&](int local) {
    const GroundAtom& atom =
        input.db->atoms[static_cast<size_t>(input.atoms[static_cast<size_t>(local)])];
    return std::make_pair(node_index.at(atom.args[0]),
                          node_index.at(atom.args[1]));
  };

  // Mixed-sign contributions on one pair differ from the aggregated edge
  // weight by a constant min(pos, neg); track it so the reported cost stays
  // the true clause cost.
  std::map<std::pair<int, int>, std::pair<double, double>> pos_neg;
  auto add_soft = [&](int a, int b, double w) {
    auto& pn = pos_neg[std::minmax(a, b)];
    if (w > 0)
      pn.first += w;
    else
      pn.second += -w;
    graph.add(a, b, w, 0);
  };

  for (const GroundClause& clause : view.clauses) {
    if (is_equivalence_structure_rule(program, clause.rule_index, rel))
      continue;
    if (clause.literals.size() != 1) {
      out.infeasible = true;
      out.message = "coref task with a non-unit residual clause";
      return out;
    }
    const GroundLiteral& lit = clause.literals[0];
    auto [a, b] = pair_of(lit.atom);
    double w = lit.positive ? clause.weight : -clause.weight;
    if (a == b) {
      // diagonal atoms are true in the output equivalence relation
      if (is_hard(clause.weight) && !lit.positive) {
        out.infeasible = true;
        out.message = "hard rule forbids a reflexive pair";
        return out;
      }
      if (w < 0) out.cost += -w;
      continue;
    }
    if (is_hard(clause.weight))
      graph.add(a, b, 0, lit.positive ? 1 : -1);
    else
      add_soft(a, b, w);
  }
  // multipliers on owned pair atoms act as singleton edge rules
  for (size_t i = 0; i < input.atoms.size(); ++i) {
    if (!input.owned[i]) continue;
    double lambda = input.priors[i];
    if (lambda == 0) continue;
    auto [a, b] = pair_of(static_cast<int>(i));
    if (a == b) {
      if (lambda < 0) out.cost += -lambda;
      continue;
    }
    add_soft(a, b, lambda);
  }
  for (const auto& [pair, pn] : pos_neg)
    out.cost += std::min(pn.first, pn.second);

  CorefResult r = solve_coref(graph, seed);
  if (r.infeasible) {
    out.infeasible = true;
    out.message = r.message;
    return out;
  }
  out.cost += r.cost;
  for (size_t i = 0; i < input.atoms.size(); ++i) {
    if (!input.owned[i]) continue;
    auto [a, b] = pair_of(static_cast<int>(i));
    bool together = a == b || r.cluster[static_cast<size_t>(a)] ==
                                  r.cluster[static_cast<size_t>(b)];
    out.assignment[i] = together ? 1 : 0;
    if (marginal) out.marginals[i] = together ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace dmln
