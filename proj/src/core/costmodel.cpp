#include "core/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/util.hpp"

namespace dmln {

namespace {

void partitions_rec(int n, int i, std::vector<int>& rgs, int max_used,
                    std::vector<std::vector<std::vector<int>>>& out) {
  if (i == n) {
    int blocks = max_used + 1;
    std::vector<std::vector<int>> part(static_cast<size_t>(blocks));
    for (int k = 0; k < n; ++k)
      part[static_cast<size_t>(rgs[static_cast<size_t>(k)])].push_back(k);
    out.push_back(std::move(part));
    return;
  }
  for (int b = 0; b <= max_used + 1; ++b) {
    rgs[static_cast<size_t>(i)] = b;
    partitions_rec(n, i + 1, rgs, std::max(max_used, b), out);
  }
}

// union-find over view variables connected by intra-block equalities
struct VarUnion {
  std::vector<int> parent;
  explicit VarUnion(int n) : parent(static_cast<size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
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

double log2_clamped(double x) { return std::log2(std::max(x, 2.0)); }

}  // namespace

std::vector<std::vector<std::vector<int>>> all_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  if (n == 0) return out;
  std::vector<int> rgs(static_cast<size_t>(n), 0);
  partitions_rec(n, 1, rgs, 0, out);
  return out;
}

double estimate_conjunction(const AdornedView& view,
                            const std::vector<int>& subgoals,
                            const std::set<int>& fixed,
                            const Catalog& catalog) {
  if (subgoals.empty()) return 0;
  VarUnion uf(view.var_count);
  for (const ViewConstraint& c : view.constraints)
    if (c.equal && c.lhs.is_var && c.rhs.is_var) uf.unite(c.lhs.id, c.rhs.id);

  double card = 1;
  std::map<int, std::vector<double>> slots;  // var class -> distinct counts
  double const_sel = 1;
  for (int gi : subgoals) {
    const Subgoal& g = view.subgoals[static_cast<size_t>(gi)];
    const Relation& rel = catalog.at(g.relation);
    card *= rel.cardinality();
    for (size_t pos = 0; pos < g.args.size(); ++pos) {
      double d = rel.distinct(static_cast<int>(pos));
      if (d <= 0) continue;
      if (g.args[pos].is_var)
        slots[uf.find(g.args[pos].id)].push_back(d);
      else
        const_sel /= d;
    }
  }
  if (card == 0) return 0;
  double sel = const_sel;
  for (auto& [var, ds] : slots) {
    std::sort(ds.begin(), ds.end(), std::greater<double>());
    bool is_fixed = false;
    for (int f : fixed)
      if (uf.find(f) == var) is_fixed = true;
    size_t start = is_fixed ? 0 : 1;  // bound vars select within every slot
    for (size_t i = start; i < ds.size(); ++i) sel /= ds[i];
  }
  return card * sel;
}

double estimate_mat(const AdornedView& view, const PlanBlock& block,
                    const Catalog& catalog, const CostModelParams& params) {
  double reads = 0;
  for (int gi : block.subgoals)
    reads += catalog.at(view.subgoals[static_cast<size_t>(gi)].relation)
                 .cardinality();
  double writes =
      block.uses_base ? 0 : estimate_conjunction(view, block.subgoals, {}, catalog);
  return params.alpha_io * (reads + writes);
}

double inc_probe_cost(double n1, double n, double probed_size,
                      const CostModelParams& params) {
  if (n1 <= 0) return 0;
  double c = params.alpha_io * n1 *
             (std::ceil(n / n1) + log2_clamped(probed_size));
  if (probed_size < params.buffer_tuples) c *= params.beta;
  return c;
}

double estimate_inc(const AdornedView& view, const MaterializationPlan& plan,
                    const Catalog& catalog, const CostModelParams& params) {
  std::set<int> bound;
  for (int pos : view.bound_positions())
    bound.insert(view.head_vars[static_cast<size_t>(pos)]);

  std::vector<size_t> order(plan.blocks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> probe_sizes(plan.blocks.size());
  std::vector<double> full_sizes(plan.blocks.size());
  for (size_t i = 0; i < plan.blocks.size(); ++i) {
    probe_sizes[i] =
        estimate_conjunction(view, plan.blocks[i].subgoals, bound, catalog);
    full_sizes[i] =
        estimate_conjunction(view, plan.blocks[i].subgoals, {}, catalog);
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (probe_sizes[a] != probe_sizes[b]) return probe_sizes[a] < probe_sizes[b];
    return a < b;
  });

  // cumulative per-access result sizes along the join chain
  std::vector<int> joined;
  std::vector<double> cumulative;
  for (size_t k = 0; k < order.size(); ++k) {
    for (int gi : plan.blocks[order[k]].subgoals) joined.push_back(gi);
    cumulative.push_back(estimate_conjunction(view, joined, bound, catalog));
  }

  if (plan.blocks.size() == 1) {
    double c = params.alpha_io *
               (log2_clamped(full_sizes[0]) + std::max(cumulative[0], 0.0));
    if (full_sizes[0] < params.buffer_tuples) c *= params.beta;
    return c;
  }

  double cost = 0;
  double prev_rows = probe_sizes[order[0]];
  for (size_t k = 1; k < order.size(); ++k) {
    size_t b = order[k];
    double n = cumulative[k];
    cost += inc_probe_cost(prev_rows, n, full_sizes[b], params);
    prev_rows = n;
  }
  return cost;
}

void cost_plan(const AdornedView& view, MaterializationPlan& plan,
               const Catalog& catalog, const CostModelParams& params) {
  double mat_total = 0;
  for (PlanBlock& block : plan.blocks) {
    block.est_size = estimate_conjunction(view, block.subgoals, {}, catalog);
    block.mat_cost = estimate_mat(view, block, catalog, params);
    mat_total += block.mat_cost;
  }
  plan.inc_cost = estimate_inc(view, plan, catalog, params);
  plan.exec_cost = view.access_estimate * plan.inc_cost + mat_total;
}

MaterializationPlan choose_plan(const AdornedView& view, const Catalog& catalog,
                                const CostModelParams& params) {
  int n = static_cast<int>(view.subgoals.size());
  std::vector<std::vector<std::vector<int>>> partitions;
  if (n <= 8) {
    partitions = all_partitions(n);
  } else {
    // plan space too large: compare only the two extremes
    std::vector<std::vector<int>> eager(1);
    std::vector<std::vector<int>> lazy;
    for (int i = 0; i < n; ++i) {
      eager[0].push_back(i);
      lazy.push_back({i});
    }
    partitions = {eager, lazy};
  }

  MaterializationPlan best;
  bool have = false;
  std::vector<std::vector<int>> best_key;
  for (const auto& part : partitions) {
    MaterializationPlan plan = make_plan(view, part);
    cost_plan(view, plan, catalog, params);
    std::vector<std::vector<int>> key;
    for (const PlanBlock& b : plan.blocks) key.push_back(b.subgoals);
    std::sort(key.begin(), key.end());
    bool better = !have || plan.exec_cost < best.exec_cost ||
                  (plan.exec_cost == best.exec_cost &&
                   (plan.blocks.size() < best.blocks.size() ||
                    (plan.blocks.size() == best.blocks.size() && key < best_key)));
    if (better) {
      best = std::move(plan);
      best_key = std::move(key);
      have = true;
    }
  }
  return best;
}

}  // namespace dmln
