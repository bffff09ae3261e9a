#include "core/query.hpp"

#include <algorithm>
#include <set>

#include "core/util.hpp"

namespace dmln {

namespace {

constexpr int kUnset = INT32_MIN;

// A join input: a relation scanned/probed with argument pattern `args`.
struct Source {
  const Relation* rel = nullptr;
  std::vector<VTerm> args;
};

bool constraint_ok(const ViewConstraint& c, const std::vector<int>& assign,
                   bool* decided) {
  int lv = c.lhs.is_var ? assign[static_cast<size_t>(c.lhs.id)] : c.lhs.id;
  int rv = c.rhs.is_var ? assign[static_cast<size_t>(c.rhs.id)] : c.rhs.id;
  if (lv == kUnset || rv == kUnset) {
    *decided = false;
    return true;
  }
  *decided = true;
  return (lv == rv) == c.equal;
}

// Backtracking join over `sources` with greedy most-bound-first ordering.
// Calls `emit` for every satisfying assignment.
class Joiner {
 public:
  Joiner(const std::vector<Source>& sources,
         const std::vector<ViewConstraint>& constraints, int var_count)
      : sources_(sources), constraints_(constraints) {
    assign_.assign(static_cast<size_t>(var_count), kUnset);
    used_.assign(sources.size(), false);
  }

  std::vector<int>& assignment() { return assign_; }

  template <typename Emit>
  void run(Emit&& emit) {
    if (!check_constraints()) return;
    recurse(0, emit);
  }

 private:
  bool check_constraints() const {
    for (const ViewConstraint& c : constraints_) {
      bool decided;
      if (!constraint_ok(c, assign_, &decided)) return false;
    }
    return true;
  }

  int pick_next() const {
    int best = -1, best_bound = -1;
    for (size_t i = 0; i < sources_.size(); ++i) {
      if (used_[i]) continue;
      int bound = 0;
      for (const VTerm& t : sources_[i].args)
        if (!t.is_var || assign_[static_cast<size_t>(t.id)] != kUnset) ++bound;
      if (bound > best_bound) {
        best_bound = bound;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  template <typename Emit>
  void recurse(size_t depth, Emit&& emit) {
    if (depth == sources_.size()) {
      emit(assign_);
      return;
    }
    int si = pick_next();
    const Source& src = sources_[static_cast<size_t>(si)];
    used_[static_cast<size_t>(si)] = true;

    std::vector<int> bound_cols;
    Tuple key;
    for (size_t pos = 0; pos < src.args.size(); ++pos) {
      const VTerm& t = src.args[pos];
      int val = t.is_var ? assign_[static_cast<size_t>(t.id)] : t.id;
      if (val != kUnset) {
        bound_cols.push_back(static_cast<int>(pos));
        key.push_back(val);
      }
    }

    auto try_row = [&](const Tuple& row) {
      std::vector<std::pair<int, int>> trail;  // (var, previous value)
      bool ok = true;
      for (size_t pos = 0; pos < src.args.size() && ok; ++pos) {
        const VTerm& t = src.args[pos];
        if (!t.is_var) {
          if (row[pos] != t.id) ok = false;
          continue;
        }
        int& slot = assign_[static_cast<size_t>(t.id)];
        if (slot == kUnset) {
          trail.emplace_back(t.id, kUnset);
          slot = row[pos];
        } else if (slot != row[pos]) {
          ok = false;
        }
      }
      if (ok) ok = check_constraints();
      if (ok) recurse(depth + 1, emit);
      for (auto it = trail.rbegin(); it != trail.rend(); ++it)
        assign_[static_cast<size_t>(it->first)] = it->second;
    };

    if (bound_cols.empty()) {
      for (const Tuple& row : src.rel->tuples()) try_row(row);
    } else {
      for (std::uint32_t idx : src.rel->probe(bound_cols, key))
        try_row(src.rel->tuples()[idx]);
    }
    used_[static_cast<size_t>(si)] = false;
  }

  const std::vector<Source>& sources_;
  const std::vector<ViewConstraint>& constraints_;
  std::vector<int> assign_;
  std::vector<bool> used_;
};

std::vector<Source> base_sources(const AdornedView& view,
                                 const std::vector<int>& subgoal_idx,
                                 const Catalog& catalog) {
  std::vector<Source> out;
  for (int i : subgoal_idx) {
    const Subgoal& g = view.subgoals[static_cast<size_t>(i)];
    const Relation* rel = catalog.find(g.relation);
    if (!rel) throw SemanticError(cat("unknown relation ", g.relation));
    out.push_back({rel, g.args});
  }
  return out;
}

void check_head(const AdornedView& view) {
  std::set<int> body_vars;
  for (const Subgoal& g : view.subgoals)
    for (const VTerm& t : g.args)
      if (t.is_var) body_vars.insert(t.id);
  for (int v : view.head_vars)
    if (!body_vars.count(v))
      throw SemanticError(cat("unbound head variable in view ", view.name));
}

}  // namespace

std::vector<Tuple> eval_eager(const AdornedView& view, const Catalog& catalog) {
  check_head(view);
  std::vector<int> all(view.subgoals.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  std::vector<Source> sources = base_sources(view, all, catalog);
  std::vector<Tuple> out;
  Joiner joiner(sources, view.constraints, view.var_count);
  joiner.run([&](const std::vector<int>& assign) {
    Tuple t(view.head_vars.size());
    for (size_t i = 0; i < view.head_vars.size(); ++i)
      t[i] = assign[static_cast<size_t>(view.head_vars[i])];
    out.push_back(std::move(t));
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MaterializationPlan make_plan(const AdornedView& view,
                              const std::vector<std::vector<int>>& partition) {
  MaterializationPlan plan;
  // which vars appear in which block
  std::vector<std::set<int>> block_vars(partition.size());
  for (size_t b = 0; b < partition.size(); ++b)
    for (int gi : partition[b])
      for (const VTerm& t : view.subgoals[static_cast<size_t>(gi)].args)
        if (t.is_var) block_vars[b].insert(t.id);

  std::set<int> head(view.head_vars.begin(), view.head_vars.end());
  for (const ViewConstraint& c : view.constraints) {
    if (c.lhs.is_var) head.insert(c.lhs.id);
    if (c.rhs.is_var) head.insert(c.rhs.id);
  }

  for (size_t b = 0; b < partition.size(); ++b) {
    PlanBlock block;
    block.subgoals = partition[b];
    std::sort(block.subgoals.begin(), block.subgoals.end());
    for (int v : block_vars[b]) {
      bool shared = head.count(v) > 0;
      for (size_t o = 0; o < partition.size() && !shared; ++o)
        if (o != b && block_vars[o].count(v)) shared = true;
      if (shared) block.head_vars.push_back(v);
    }
    if (block.subgoals.size() == 1) {
      const Subgoal& g = view.subgoals[static_cast<size_t>(block.subgoals[0])];
      std::set<int> seen;
      bool plain = true;
      for (const VTerm& t : g.args) {
        if (!t.is_var || !seen.insert(t.id).second) plain = false;
      }
      // The residual join can scan/probe the base table directly; private
      // existential columns fall out at the final projection.
      if (plain) block.uses_base = true;
    }
    plan.blocks.push_back(std::move(block));
  }
  return plan;
}

void prepare_plan(const AdornedView& view, MaterializationPlan& plan,
                  const Catalog& catalog) {
  if (plan.prepared) return;
  plan.tables.assign(plan.blocks.size(), nullptr);
  for (size_t b = 0; b < plan.blocks.size(); ++b) {
    PlanBlock& block = plan.blocks[b];
    if (block.uses_base) continue;
    auto table = std::make_shared<Relation>(
        cat(view.name, ".block", b), static_cast<int>(block.head_vars.size()));
    std::vector<Source> sources = base_sources(view, block.subgoals, catalog);
    // constraints fully inside the block apply at materialization time
    std::vector<ViewConstraint> local;
    std::set<int> vars;
    for (int gi : block.subgoals)
      for (const VTerm& t : view.subgoals[static_cast<size_t>(gi)].args)
        if (t.is_var) vars.insert(t.id);
    for (const ViewConstraint& c : view.constraints) {
      bool inside = (!c.lhs.is_var || vars.count(c.lhs.id)) &&
                    (!c.rhs.is_var || vars.count(c.rhs.id));
      if (inside) local.push_back(c);
    }
    Joiner joiner(sources, local, view.var_count);
    joiner.run([&](const std::vector<int>& assign) {
      Tuple t(block.head_vars.size());
      for (size_t i = 0; i < block.head_vars.size(); ++i)
        t[i] = assign[static_cast<size_t>(block.head_vars[i])];
      table->insert(t);
    });
    plan.tables[b] = std::move(table);
  }
  plan.prepared = true;
}

std::vector<Tuple> eval_bound(const AdornedView& view,
                              MaterializationPlan& plan, const Tuple& binding,
                              const Catalog& catalog) {
  check_head(view);
  if (!plan.prepared) prepare_plan(view, plan, catalog);
  std::vector<int> bound = view.bound_positions();
  if (binding.size() != bound.size())
    throw SemanticError(cat("binding arity mismatch on view ", view.name,
                            ": got ", binding.size(), ", expected ",
                            bound.size()));

  std::vector<Source> sources;
  for (size_t b = 0; b < plan.blocks.size(); ++b) {
    const PlanBlock& block = plan.blocks[b];
    if (block.uses_base) {
      const Subgoal& g = view.subgoals[static_cast<size_t>(block.subgoals[0])];
      sources.push_back({&catalog.at(g.relation), g.args});
    } else {
      std::vector<VTerm> args;
      for (int v : block.head_vars) args.push_back(VTerm::var(v));
      sources.push_back({plan.tables[b].get(), std::move(args)});
    }
  }

  Joiner joiner(sources, view.constraints, view.var_count);
  for (size_t i = 0; i < bound.size(); ++i) {
    int var = view.head_vars[static_cast<size_t>(bound[i])];
    joiner.assignment()[static_cast<size_t>(var)] = binding[i];
  }
  std::vector<int> free = view.free_positions();
  std::vector<Tuple> out;
  joiner.run([&](const std::vector<int>& assign) {
    Tuple t(free.size());
    for (size_t i = 0; i < free.size(); ++i)
      t[i] =
          assign[static_cast<size_t>(view.head_vars[static_cast<size_t>(free[i])])];
    out.push_back(std::move(t));
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dmln
