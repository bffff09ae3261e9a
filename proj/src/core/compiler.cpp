#include "core/compiler.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "core/util.hpp"

namespace dmln {

namespace {

bool same_var(const Term& a, const Term& b) {
  return a.is_var && b.is_var && a.index == b.index;
}

int count_pred_literals(const Clause& c, int pred) {
  int n = 0;
  for (const Literal& lit : c.literals)
    if (lit.predicate == pred) ++n;
  return n;
}

// inf: p(a, a)
bool match_ref_unit(const Clause& c, int pred) {
  if (!is_hard(c.weight) || c.literals.size() != 1 || !c.constraints.empty())
    return false;
  const Literal& lit = c.literals[0];
  return lit.positive && lit.predicate == pred && lit.args.size() == 2 &&
         same_var(lit.args[0], lit.args[1]);
}

// inf: p(a, b) v !R(a) v !R(b)  -- guards both arguments with one unary
// relation, which forces reflexivity and symmetry on the guarded set
bool match_guarded(const Clause& c, int pred) {
  if (!is_hard(c.weight) || c.literals.size() != 3 || !c.constraints.empty())
    return false;
  const Literal* pos = nullptr;
  std::vector<const Literal*> negs;
  for (const Literal& lit : c.literals) {
    if (lit.positive) {
      if (pos) return false;
      pos = &lit;
    } else {
      negs.push_back(&lit);
    }
  }
  if (!pos || pos->predicate != pred || pos->args.size() != 2) return false;
  if (negs.size() != 2) return false;
  if (negs[0]->predicate != negs[1]->predicate) return false;
  if (negs[0]->predicate == pred) return false;
  if (negs[0]->args.size() != 1 || negs[1]->args.size() != 1) return false;
  for (int order = 0; order < 2; ++order) {
    const Literal* r1 = negs[static_cast<size_t>(order)];
    const Literal* r2 = negs[static_cast<size_t>(1 - order)];
    if (same_var(pos->args[0], r1->args[0]) &&
        same_var(pos->args[1], r2->args[0]))
      return true;
  }
  return false;
}

// inf: p(a, b) => p(b, a)
bool match_sym(const Clause& c, int pred) {
  if (!is_hard(c.weight) || c.literals.size() != 2 || !c.constraints.empty())
    return false;
  const Literal* pos = nullptr;
  const Literal* neg = nullptr;
  for (const Literal& lit : c.literals)
    (lit.positive ? pos : neg) = &lit;
  if (!pos || !neg) return false;
  if (pos->predicate != pred || neg->predicate != pred) return false;
  if (pos->args.size() != 2) return false;
  return same_var(pos->args[0], neg->args[1]) &&
         same_var(pos->args[1], neg->args[0]) &&
         !same_var(pos->args[0], pos->args[1]);
}

// inf: p(a, b), p(b, c) => p(a, c)
bool match_trn(const Clause& c, int pred) {
  if (!is_hard(c.weight) || c.literals.size() != 3 || !c.constraints.empty())
    return false;
  const Literal* pos = nullptr;
  std::vector<const Literal*> negs;
  for (const Literal& lit : c.literals) {
    if (lit.positive) {
      if (pos) return false;
      pos = &lit;
    } else {
      negs.push_back(&lit);
    }
  }
  if (!pos || negs.size() != 2) return false;
  for (const Literal* l : {pos, negs[0], negs[1]})
    if (l->predicate != pred || l->args.size() != 2) return false;
  for (int order = 0; order < 2; ++order) {
    const Literal* first = negs[static_cast<size_t>(order)];
    const Literal* second = negs[static_cast<size_t>(1 - order)];
    if (same_var(first->args[1], second->args[0]) &&
        same_var(pos->args[0], first->args[0]) &&
        same_var(pos->args[1], second->args[1]))
      return true;
  }
  return false;
}

// inf: p(x, y), p(x, z) => y = z   (or keyed on the second position)
std::optional<int> match_key(const Clause& c, int pred) {
  if (!is_hard(c.weight) || c.literals.size() != 2 || c.constraints.size() != 1)
    return std::nullopt;
  const EqConstraint& eq = c.constraints[0];
  if (!eq.equal || !eq.lhs.is_var || !eq.rhs.is_var) return std::nullopt;
  const Literal& l1 = c.literals[0];
  const Literal& l2 = c.literals[1];
  if (l1.positive || l2.positive) return std::nullopt;
  if (l1.predicate != pred || l2.predicate != pred) return std::nullopt;
  if (l1.args.size() != 2) return std::nullopt;
  for (int key_pos = 0; key_pos < 2; ++key_pos) {
    int val_pos = 1 - key_pos;
    if (!same_var(l1.args[static_cast<size_t>(key_pos)],
                  l2.args[static_cast<size_t>(key_pos)]))
      continue;
    const Term& v1 = l1.args[static_cast<size_t>(val_pos)];
    const Term& v2 = l2.args[static_cast<size_t>(val_pos)];
    bool direct = same_var(v1, eq.lhs) && same_var(v2, eq.rhs);
    bool swapped = same_var(v1, eq.rhs) && same_var(v2, eq.lhs);
    if (direct || swapped) return key_pos;
  }
  return std::nullopt;
}

// p(x, y), T(y, z) => p(x, z) with sign variants on the p literals; T links
// the chained argument position. Returns (T predicate, chained position).
std::optional<std::pair<int, int>> match_trrec(const MLNProgram& program,
                                               const Clause& c, int pred) {
  if (c.literals.size() != 3 || !c.constraints.empty()) return std::nullopt;
  std::vector<const Literal*> ps;
  const Literal* t = nullptr;
  for (const Literal& lit : c.literals) {
    if (lit.predicate == pred) {
      ps.push_back(&lit);
    } else {
      if (t) return std::nullopt;
      t = &lit;
    }
  }
  if (ps.size() != 2 || !t) return std::nullopt;
  if (program.is_query(t->predicate)) return std::nullopt;
  if (t->args.size() != 2 || ps[0]->args.size() != 2) return std::nullopt;
  for (int order = 0; order < 2; ++order) {
    const Literal* p1 = ps[static_cast<size_t>(order)];
    const Literal* p2 = ps[static_cast<size_t>(1 - order)];
    // preserved attribute: same term (variable or identical constant)
    if (!(p1->args[0] == p2->args[0])) continue;
    if (same_var(p1->args[1], t->args[0]) && same_var(p2->args[1], t->args[1]))
      return std::make_pair(t->predicate, 1);
  }
  return std::nullopt;
}

// T's tuples must be functional on the first attribute, acyclic, and form
// simple chains (in-degree <= 1); branching data routes to the generic
// solver instead.
bool chain_data_ok(const MLNProgram& program, int t_pred) {
  std::map<int, int> succ;
  std::set<int> has_pred;
  for (const EvidenceAtom& ev : program.evidence) {
    if (ev.predicate != t_pred || !ev.positive) continue;
    if (ev.constants.size() != 2) return false;
    int a = ev.constants[0], b = ev.constants[1];
    auto [it, inserted] = succ.emplace(a, b);
    if (!inserted && it->second != b) return false;  // first attr not a key
    if (it->second == b && !inserted) continue;      // duplicate tuple
    if (!has_pred.insert(b).second) return false;    // in-degree 2: a tree
  }
  // cycle detection over successor edges
  std::map<int, int> state;  // 0 unseen, 1 on stack, 2 done
  std::vector<int> stack;
  for (const auto& [start, _] : succ) {
    if (state[start]) continue;
    int cur = start;
    stack.clear();
    while (true) {
      state[cur] = 1;
      stack.push_back(cur);
      auto it = succ.find(cur);
      if (it == succ.end()) break;
      int nxt = it->second;
      if (state[nxt] == 1) return false;  // cycle
      if (state[nxt] == 2) break;
      cur = nxt;
    }
    for (int v : stack) state[v] = 2;
  }
  return true;
}

std::vector<int> all_rule_indices(const MLNProgram& program) {
  std::vector<int> out(program.rules.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

}  // namespace

bool is_equivalence_structure_rule(const MLNProgram& program, int rule_index,
                                   int predicate) {
  const Clause& c = program.rules[static_cast<size_t>(rule_index)];
  if (program.predicates[static_cast<size_t>(predicate)].arity() != 2)
    return false;
  return match_ref_unit(c, predicate) || match_guarded(c, predicate) ||
         match_sym(c, predicate) || match_trn(c, predicate);
}

bool is_key_constraint_rule(const MLNProgram& program, int rule_index,
                            int predicate) {
  const Clause& c = program.rules[static_cast<size_t>(rule_index)];
  if (program.predicates[static_cast<size_t>(predicate)].arity() != 2)
    return false;
  return match_key(c, predicate).has_value();
}

std::string property_name(Property p) {
  switch (p) {
    case Property::REF: return "REF";
    case Property::SYM: return "SYM";
    case Property::TRN: return "TRN";
    case Property::KEY: return "KEY";
    case Property::NoREC: return "NoREC";
    case Property::TrREC: return "TrREC";
  }
  return "?";
}

std::set<Property> PropertyInfo::as_set() const {
  std::set<Property> s;
  if (ref) s.insert(Property::REF);
  if (sym) s.insert(Property::SYM);
  if (trn) s.insert(Property::TRN);
  if (key()) s.insert(Property::KEY);
  if (norec) s.insert(Property::NoREC);
  if (trrec) s.insert(Property::TrREC);
  return s;
}

PropertyInfo detect_properties(const MLNProgram& program, int predicate,
                               const std::vector<int>& rules) {
  PropertyInfo info;
  const PredicateSchema& schema = program.predicates[predicate];
  bool binary = schema.arity() == 2;

  // schema-like properties from every hard rule
  for (const Clause& c : program.rules) {
    if (!is_hard(c.weight)) continue;
    if (binary) {
      if (match_ref_unit(c, predicate)) info.ref = true;
      if (match_guarded(c, predicate)) info.ref = info.sym = true;
      if (match_sym(c, predicate)) info.sym = true;
      if (match_trn(c, predicate)) info.trn = true;
      if (auto key_pos = match_key(c, predicate)) info.key_positions.insert(*key_pos);
    }
  }

  // recursion properties over the given rule set
  info.norec = true;
  info.trrec = binary;
  int chain_pred = -1, chain_pos = -1;
  bool any_recursive = false;
  for (int ri : rules) {
    const Clause& c = program.rules[static_cast<size_t>(ri)];
    int n = count_pred_literals(c, predicate);
    if (n <= 1) continue;
    // key constraints are schema-like, not recursion
    if (binary && is_hard(c.weight) && match_key(c, predicate)) continue;
    info.norec = false;
    any_recursive = true;
    std::optional<std::pair<int, int>> m;
    if (binary) m = match_trrec(program, c, predicate);
    if (!m) {
      info.trrec = false;
      break;
    }
    if (chain_pred == -1) {
      chain_pred = m->first;
      chain_pos = m->second;
    } else if (chain_pred != m->first || chain_pos != m->second) {
      info.trrec = false;  // recursion through two different relations
      break;
    }
  }
  if (!any_recursive) info.trrec = false;
  if (info.trrec && !chain_data_ok(program, chain_pred)) info.trrec = false;
  if (info.trrec) {
    info.chain_pred = chain_pred;
    info.chain_pos = chain_pos;
  }
  return info;
}

PropertyInfo detect_properties(const MLNProgram& program, int predicate) {
  return detect_properties(program, predicate, all_rule_indices(program));
}

std::string task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::Coref: return "Coref";
    case TaskKind::SimpleClassification: return "SimpleClassification";
    case TaskKind::CorrelatedClassification: return "CorrelatedClassification";
    case TaskKind::Generic: return "Generic";
  }
  return "?";
}

namespace {

std::vector<int> query_relations_of_rule(const MLNProgram& program,
                                         const Clause& c) {
  std::set<int> rels;
  for (const Literal& lit : c.literals)
    if (program.is_query(lit.predicate)) rels.insert(lit.predicate);
  return {rels.begin(), rels.end()};
}

struct Assigner {
  const MLNProgram& program;
  std::vector<bool> consumed;      // soft, unannotated rules
  std::map<int, int> owner;        // relation -> task index
  LogicalPlan plan;

  explicit Assigner(const MLNProgram& p)
      : program(p), consumed(p.rules.size(), false) {}

  bool soft(int ri) const {
    return !is_hard(program.rules[static_cast<size_t>(ri)].weight);
  }
  bool annotated(int ri) const {
    return !program.rules[static_cast<size_t>(ri)].task_annotation.empty();
  }

  // unannotated, unconsumed rules whose head is R; a rule belongs to the
  // task of its head relation, body occurrences are inputs
  std::vector<int> candidate_rules(int rel) const {
    std::vector<int> out;
    for (size_t ri = 0; ri < program.rules.size(); ++ri) {
      if (annotated(static_cast<int>(ri))) continue;
      if (soft(static_cast<int>(ri)) && consumed[ri]) continue;
      std::vector<int> heads = head_query_predicates(program, program.rules[ri]);
      if (std::find(heads.begin(), heads.end(), rel) != heads.end())
        out.push_back(static_cast<int>(ri));
    }
    return out;
  }

  // Every soft rule must use R exactly once. Hard rules may additionally be
  // the structural patterns the solver enforces by construction.
  bool shapes_ok(int rel, const std::vector<int>& rules, TaskKind kind) const {
    for (int ri : rules) {
      const Clause& c = program.rules[static_cast<size_t>(ri)];
      int n = count_pred_literals(c, rel);
      if (n <= 1) continue;
      if (kind == TaskKind::Coref && is_hard(c.weight) &&
          (match_ref_unit(c, rel) || match_guarded(c, rel) ||
           match_sym(c, rel) || match_trn(c, rel)))
        continue;
      if (kind == TaskKind::CorrelatedClassification &&
          (match_trrec(program, c, rel) ||
           (is_hard(c.weight) && match_key(c, rel))))
        continue;
      return false;
    }
    return true;
  }

  // Shared inputs must come from somewhere: every other query relation in the
  // candidate rules is either owned by an existing task or has no rules of
  // its own outside this candidate set.
  bool inputs_resolved(int rel, const std::vector<int>& rules) const {
    std::set<int> rule_set(rules.begin(), rules.end());
    for (int ri : rules) {
      for (int other :
           query_relations_of_rule(program, program.rules[static_cast<size_t>(ri)])) {
        if (other == rel) continue;
        if (owner.count(other)) continue;
        bool contained = true;
        for (int oi : candidate_rules(other))
          if (!rule_set.count(oi)) contained = false;
        if (!contained) return false;
      }
    }
    return true;
  }

  std::optional<Task> try_make(int rel, TaskKind kind) {
    std::vector<int> rules = candidate_rules(rel);
    bool any_soft = false;
    for (int ri : rules) any_soft = any_soft || soft(ri);
    if (rules.empty()) return std::nullopt;
    PropertyInfo props = detect_properties(program, rel, rules);
    const PredicateSchema& schema = program.predicates[static_cast<size_t>(rel)];
    Task task;
    task.kind = kind;
    switch (kind) {
      case TaskKind::Coref:
        if (!(props.ref && props.sym && props.trn)) return std::nullopt;
        if (schema.arity() != 2) return std::nullopt;
        if (schema.domains[0] != schema.domains[1]) return std::nullopt;
        break;
      case TaskKind::SimpleClassification:
        if (!props.norec) return std::nullopt;
        if (!any_soft) return std::nullopt;
        if (!inputs_resolved(rel, rules)) return std::nullopt;
        if (props.key()) {
          task.key_pos = *props.key_positions.begin();
          task.value_pos = 1 - task.key_pos;
        }
        // Boolean relations satisfy KEY vacuously: the whole tuple is the
        // object and the task decides in/out.
        break;
      case TaskKind::CorrelatedClassification:
        if (!props.trrec) return std::nullopt;
        if (!props.key_positions.count(props.chain_pos)) return std::nullopt;
        if (!inputs_resolved(rel, rules)) return std::nullopt;
        task.key_pos = props.chain_pos;
        task.value_pos = 1 - task.key_pos;
        task.chain_pred = props.chain_pred;
        break;
      case TaskKind::Generic:
        break;
    }
    if (!shapes_ok(rel, rules, kind)) return std::nullopt;
    task.rules = rules;
    task.owned_relations = {rel};
    task.name = program.predicates[static_cast<size_t>(rel)].name;
    return task;
  }

  void commit(Task task) {
    int index = static_cast<int>(plan.tasks.size());
    for (int ri : task.rules)
      if (soft(ri)) consumed[static_cast<size_t>(ri)] = true;
    for (int rel : task.owned_relations) owner[rel] = index;
    plan.tasks.push_back(std::move(task));
  }
};

void finish_plan(const MLNProgram& program, LogicalPlan& plan,
                 std::map<int, int>& owner) {
  // replicate hard rules into every task touching their relation, compute
  // relation sets
  for (Task& task : plan.tasks) {
    std::set<int> rels;
    for (int ri : task.rules)
      for (int r :
           query_relations_of_rule(program, program.rules[static_cast<size_t>(ri)]))
        rels.insert(r);
    bool changed = true;
    std::set<int> rule_set(task.rules.begin(), task.rules.end());
    while (changed) {
      changed = false;
      for (size_t ri = 0; ri < program.rules.size(); ++ri) {
        if (!is_hard(program.rules[ri].weight)) continue;
        if (rule_set.count(static_cast<int>(ri))) continue;
        for (int r : query_relations_of_rule(program, program.rules[ri])) {
          if (rels.count(r)) {
            rule_set.insert(static_cast<int>(ri));
            for (int r2 :
                 query_relations_of_rule(program, program.rules[ri]))
              if (rels.insert(r2).second) changed = true;
            changed = true;
            break;
          }
        }
      }
    }
    task.rules.assign(rule_set.begin(), rule_set.end());
    task.relations.assign(rels.begin(), rels.end());
  }

  for (size_t t = 0; t < plan.tasks.size(); ++t)
    for (int r : plan.tasks[t].relations)
      plan.relation_tasks[r].push_back(static_cast<int>(t));
  for (const auto& [rel, tasks] : plan.relation_tasks)
    if (tasks.size() >= 2) plan.shared_relations.push_back(rel);
  plan.owner = owner;

  // breadth-first traversal of the bipartite task/relation graph
  std::vector<bool> seen(plan.tasks.size(), false);
  std::set<int> seen_rel;
  std::deque<int> queue;
  for (size_t start = 0; start < plan.tasks.size(); ++start) {
    if (seen[start]) continue;
    queue.push_back(static_cast<int>(start));
    seen[start] = true;
    while (!queue.empty()) {
      int t = queue.front();
      queue.pop_front();
      plan.sigma.push_back(t);
      for (int rel : plan.tasks[static_cast<size_t>(t)].relations) {
        if (!seen_rel.insert(rel).second) continue;
        for (int t2 : plan.relation_tasks[rel]) {
          if (!seen[static_cast<size_t>(t2)]) {
            seen[static_cast<size_t>(t2)] = true;
            queue.push_back(t2);
          }
        }
      }
    }
  }

  for (int q : program.query_predicates())
    plan.properties.emplace(q, detect_properties(program, q));
}

}  // namespace

LogicalPlan assign_tasks(const MLNProgram& program, bool monolithic) {
  Assigner a(program);

  if (monolithic) {
    Task task;
    task.kind = TaskKind::Generic;
    task.name = "all";
    std::set<int> rels;
    for (size_t ri = 0; ri < program.rules.size(); ++ri) {
      task.rules.push_back(static_cast<int>(ri));
      for (int r :
           query_relations_of_rule(program, program.rules[ri]))
        rels.insert(r);
    }
    task.owned_relations.assign(rels.begin(), rels.end());
    a.commit(std::move(task));
    finish_plan(program, a.plan, a.owner);
    return a.plan;
  }

  // user-pinned tasks first, in order of first appearance
  std::vector<std::string> user_names;
  for (const Clause& c : program.rules)
    if (!c.task_annotation.empty() &&
        std::find(user_names.begin(), user_names.end(), c.task_annotation) ==
            user_names.end())
      user_names.push_back(c.task_annotation);
  for (const std::string& name : user_names) {
    Task task;
    task.name = name;
    std::set<int> rels;
    for (size_t ri = 0; ri < program.rules.size(); ++ri) {
      if (program.rules[ri].task_annotation != name) continue;
      task.rules.push_back(static_cast<int>(ri));
      for (int r :
           query_relations_of_rule(program, program.rules[ri]))
        rels.insert(r);
    }
    for (int r : rels)
      if (!a.owner.count(r)) task.owned_relations.push_back(r);
    // pick the solver by the owned relation's properties over this rule set
    task.kind = TaskKind::Generic;
    if (task.owned_relations.size() == 1) {
      int rel = task.owned_relations[0];
      PropertyInfo props = detect_properties(program, rel, task.rules);
      const PredicateSchema& schema = program.predicates[static_cast<size_t>(rel)];
      if (props.ref && props.sym && props.trn && schema.arity() == 2 &&
          schema.domains[0] == schema.domains[1] &&
          a.shapes_ok(rel, task.rules, TaskKind::Coref)) {
        task.kind = TaskKind::Coref;
      } else if (props.norec &&
                 a.shapes_ok(rel, task.rules, TaskKind::SimpleClassification)) {
        task.kind = TaskKind::SimpleClassification;
        if (props.key()) {
          task.key_pos = *props.key_positions.begin();
          task.value_pos = 1 - task.key_pos;
        }
      } else if (props.trrec && props.key_positions.count(props.chain_pos) &&
                 a.shapes_ok(rel, task.rules,
                             TaskKind::CorrelatedClassification)) {
        task.kind = TaskKind::CorrelatedClassification;
        task.key_pos = props.chain_pos;
        task.value_pos = 1 - task.key_pos;
        task.chain_pred = props.chain_pred;
      }
    }
    a.commit(std::move(task));
  }

  // automatic passes until fixpoint
  const TaskKind kinds[] = {TaskKind::Coref, TaskKind::SimpleClassification,
                            TaskKind::CorrelatedClassification};
  bool progress = true;
  while (progress) {
    progress = false;
    for (TaskKind kind : kinds) {
      for (int rel : program.query_predicates()) {
        if (a.owner.count(rel)) continue;
        if (auto task = a.try_make(rel, kind)) {
          a.commit(std::move(*task));
          progress = true;
        }
      }
    }
  }

  // leftovers: connected components of the remaining rules become Generic
  // tasks (rules are connected when they share a query relation)
  auto uncovered = [&](size_t ri) {
    if (a.annotated(static_cast<int>(ri))) return false;
    if (a.soft(static_cast<int>(ri))) return !a.consumed[ri];
    // hard rule: uncovered while no existing task touches any of its
    // relations (replication will pick it up otherwise)
    for (int r : query_relations_of_rule(program, program.rules[ri]))
      for (const Task& t : a.plan.tasks)
        for (int tr : t.rules) {
          const Clause& c = program.rules[static_cast<size_t>(tr)];
          if (count_pred_literals(c, r) > 0) return false;
        }
    return !query_relations_of_rule(program, program.rules[ri]).empty();
  };
  while (true) {
    int seed = -1;
    for (size_t ri = 0; ri < program.rules.size(); ++ri)
      if (uncovered(ri)) {
        seed = static_cast<int>(ri);
        break;
      }
    if (seed < 0) break;
    std::set<int> component{seed};
    std::set<int> rels;
    for (int r : query_relations_of_rule(program,
                                         program.rules[static_cast<size_t>(seed)]))
      rels.insert(r);
    bool grew = true;
    while (grew) {
      grew = false;
      for (size_t ri = 0; ri < program.rules.size(); ++ri) {
        if (component.count(static_cast<int>(ri)) ||
            a.annotated(static_cast<int>(ri)))
          continue;
        if (a.soft(static_cast<int>(ri)) && a.consumed[ri]) continue;
        auto rs = query_relations_of_rule(program, program.rules[ri]);
        bool touches = false;
        for (int r : rs) touches = touches || rels.count(r);
        if (touches) {
          component.insert(static_cast<int>(ri));
          for (int r : rs)
            if (rels.insert(r).second) grew = true;
          grew = true;
        }
      }
    }
    Task task;
    task.kind = TaskKind::Generic;
    task.rules.assign(component.begin(), component.end());
    for (int r : rels)
      if (!a.owner.count(r)) task.owned_relations.push_back(r);
    task.name = task.owned_relations.empty()
                    ? "generic"
                    : program.predicates[static_cast<size_t>(
                                             task.owned_relations[0])]
                          .name;
    a.commit(std::move(task));
  }

  finish_plan(program, a.plan, a.owner);
  return a.plan;
}

std::string explain(const MLNProgram& program, const LogicalPlan& plan) {
  std::ostringstream os;
  os << "tasks: " << plan.tasks.size() << "\n";
  for (size_t t = 0; t < plan.tasks.size(); ++t) {
    const Task& task = plan.tasks[t];
    os << "task " << t << ": kind=" << task_kind_name(task.kind) << " name="
       << task.name << " owns=[";
    for (size_t i = 0; i < task.owned_relations.size(); ++i) {
      if (i) os << ", ";
      os << program.predicates[static_cast<size_t>(task.owned_relations[i])].name;
    }
    os << "] relations=[";
    for (size_t i = 0; i < task.relations.size(); ++i) {
      if (i) os << ", ";
      os << program.predicates[static_cast<size_t>(task.relations[i])].name;
    }
    os << "] rules=[";
    for (size_t i = 0; i < task.rules.size(); ++i) {
      if (i) os << ", ";
      os << task.rules[i];
    }
    os << "]";
    if (task.key_pos >= 0) os << " key_pos=" << task.key_pos;
    if (task.chain_pred >= 0)
      os << " chain="
         << program.predicates[static_cast<size_t>(task.chain_pred)].name;
    os << "\n";
  }
  os << "sigma:";
  for (int t : plan.sigma) os << ' ' << t;
  os << "\n";
  os << "shared:";
  for (int r : plan.shared_relations)
    os << ' ' << program.predicates[static_cast<size_t>(r)].name;
  os << "\n";
  os << "properties:\n";
  for (const auto& [rel, info] : plan.properties) {
    os << "  " << program.predicates[static_cast<size_t>(rel)].name << ":";
    for (Property p : info.as_set()) os << ' ' << property_name(p);
    if (info.key()) {
      os << " key_pos=";
      for (int kp : info.key_positions) os << kp;
    }
    if (info.trrec)
      os << " chain="
         << program.predicates[static_cast<size_t>(info.chain_pred)].name;
    os << "\n";
  }
  return os.str();
}

}  // namespace dmln
