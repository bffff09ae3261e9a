#include "core/solvers/dmo.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "core/util.hpp"

namespace dmln {

namespace {

enum class HeadShape {
  ObjectBound,  // owned literal's arguments bound, existentials free
  PairBF,       // owned pair: first argument bound, second free
  AllFree,
};

// Builds a view from one rule clause. Subgoals come from the clause's
// negative non-owned literals (the rule body); a clause-positive body
// literal would need negation and produces no view.
std::optional<AdornedView> build_rule_view(const MLNProgram& program,
                                           const Clause& clause,
                                           int rule_index, int owned_rel,
                                           HeadShape shape) {
  AdornedView v;
  v.name = cat("dmo.r", rule_index);
  v.var_count = static_cast<int>(clause.vars.size());

  const Literal* owned_lit = nullptr;
  for (const Literal& lit : clause.literals) {
    if (lit.is_head) {
      // head literals are the rule's outputs, not part of the body query
      if (lit.predicate == owned_rel && owned_lit == nullptr) owned_lit = &lit;
      continue;
    }
    if (!lit.positive) {
      Subgoal g;
      g.relation = program.predicates[static_cast<size_t>(lit.predicate)].name;
      for (const Term& t : lit.args)
        g.args.push_back(t.is_var ? VTerm::var(t.index)
                                  : VTerm::constant(t.index));
      v.subgoals.push_back(std::move(g));
    } else {
      return std::nullopt;  // negated body conjunct, not a conjunctive view
    }
  }
  if (v.subgoals.empty()) return std::nullopt;
  for (const EqConstraint& c : clause.constraints) {
    ViewConstraint vc;
    // the clause keeps the disjunct; the body conjunct is its negation
    vc.equal = !c.equal;
    vc.lhs = c.lhs.is_var ? VTerm::var(c.lhs.index) : VTerm::constant(c.lhs.index);
    vc.rhs = c.rhs.is_var ? VTerm::var(c.rhs.index) : VTerm::constant(c.rhs.index);
    v.constraints.push_back(vc);
  }

  std::set<int> body_vars;
  for (const Subgoal& g : v.subgoals)
    for (const VTerm& t : g.args)
      if (t.is_var) body_vars.insert(t.id);

  auto push = [&](int var, Binding b) {
    v.head_vars.push_back(var);
    v.adornment.push_back(b);
  };

  switch (shape) {
    case HeadShape::ObjectBound: {
      std::set<int> head;
      if (owned_lit)
        for (const Term& t : owned_lit->args)
          if (t.is_var && body_vars.count(t.index) && head.insert(t.index).second)
            push(t.index, Binding::Bound);
      for (int var : body_vars)
        if (!head.count(var)) push(var, Binding::Free);
      break;
    }
    case HeadShape::PairBF: {
      if (!owned_lit || owned_lit->args.size() != 2 ||
          !owned_lit->args[0].is_var || !owned_lit->args[1].is_var)
        return std::nullopt;
      if (!body_vars.count(owned_lit->args[0].index) ||
          !body_vars.count(owned_lit->args[1].index))
        return std::nullopt;
      push(owned_lit->args[0].index, Binding::Bound);
      push(owned_lit->args[1].index, Binding::Free);
      break;
    }
    case HeadShape::AllFree:
      for (int var : body_vars) push(var, Binding::Free);
      break;
  }
  return v;
}

double view_size_estimate(const AdornedView& v, const Catalog& catalog) {
  std::vector<int> all(v.subgoals.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return estimate_conjunction(v, all, {}, catalog);
}

}  // namespace

std::vector<AdornedView> register_dmos(const MLNProgram& program,
                                       const GroundDatabase& db,
                                       const Task& task,
                                       const Catalog& catalog) {
  std::vector<AdornedView> out;
  int owned = task.owned_relations.empty() ? -1 : task.owned_relations[0];

  switch (task.kind) {
    case TaskKind::SimpleClassification: {
      double objects =
          owned >= 0 ? static_cast<double>(db.atoms_of(owned).size()) : 1;
      for (int ri : task.rules) {
        const Clause& clause = program.rules[static_cast<size_t>(ri)];
        bool mentions = false;
        for (const Literal& lit : clause.literals)
          mentions = mentions || lit.predicate == owned;
        if (!mentions) continue;
        auto v = build_rule_view(program, clause, ri, owned,
                                 HeadShape::ObjectBound);
        if (!v) continue;
        v->access_estimate = std::max(1.0, objects);
        out.push_back(std::move(*v));
      }
      break;
    }
    case TaskKind::Coref: {
      double nodes = 1;
      if (owned >= 0) {
        int dom = program.predicates[static_cast<size_t>(owned)].domains[0];
        nodes = std::max(1, program.symbols.domain_size(dom));
      }
      std::vector<AdornedView> views;
      double positive_pairs = 0;
      for (int ri : task.rules) {
        const Clause& clause = program.rules[static_cast<size_t>(ri)];
        if (is_hard(clause.weight) || clause.weight <= 0) continue;
        const Literal* head = nullptr;
        for (const Literal& lit : clause.literals)
          if (lit.predicate == owned && lit.positive) head = &lit;
        if (!head) continue;
        auto v = build_rule_view(program, clause, ri, owned, HeadShape::PairBF);
        if (!v) continue;
        positive_pairs += view_size_estimate(*v, catalog);
        views.push_back(std::move(*v));
      }
      // the paper's heuristic: accesses ~ mentions / average node degree
      double degree = std::max(1.0, positive_pairs / nodes);
      for (AdornedView& v : views) {
        v.access_estimate = std::max(1.0, nodes / degree);
        out.push_back(std::move(v));
      }
      break;
    }
    case TaskKind::CorrelatedClassification:
    case TaskKind::Generic: {
      for (int ri : task.rules) {
        const Clause& clause = program.rules[static_cast<size_t>(ri)];
        auto v = build_rule_view(program, clause, ri,
                                 task.kind == TaskKind::Generic ? -1 : owned,
                                 HeadShape::AllFree);
        if (!v) continue;
        v->access_estimate = 1.0;
        out.push_back(std::move(*v));
      }
      break;
    }
  }
  return out;
}

}  // namespace dmln
