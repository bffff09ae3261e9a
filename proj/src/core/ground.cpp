#include "core/ground.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dmln {

EvidenceIndex::EvidenceIndex(const MLNProgram& program) {
  for (const EvidenceAtom& atom : program.evidence) {
    auto key = std::make_pair(atom.predicate, atom.constants);
    if (atom.positive) {
      truth_[key] = true;
    } else {
      // explicit negatives are the closed-world default; a tuple listed both
      // ways stays positive
      truth_.emplace(key, false);
    }
  }
}

bool EvidenceIndex::is_true(int predicate,
                            const std::vector<int>& args) const {
  auto it = truth_.find(std::make_pair(predicate, args));
  return it != truth_.end() && it->second;
}

int GroundDatabase::find_atom(int predicate,
                              const std::vector<int>& args) const {
  auto it = atom_ids_.find(std::make_pair(predicate, args));
  return it == atom_ids_.end() ? -1 : it->second;
}

std::string GroundDatabase::atom_name(int id) const {
  const GroundAtom& atom = atoms[static_cast<size_t>(id)];
  if (program == nullptr) return cat("atom", id);
  const PredicateSchema& schema = program->predicates[atom.predicate];
  std::ostringstream os;
  os << schema.name << '(';
  for (size_t i = 0; i < atom.args.size(); ++i) {
    if (i) os << ", ";
    os << program->symbols.constant_name(schema.domains[i], atom.args[i]);
  }
  os << ')';
  return os.str();
}

std::vector<int> GroundDatabase::atoms_of(int predicate) const {
  std::vector<int> out;
  for (size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i].predicate == predicate) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// Appends every grounding of `predicate` in lexicographic constant order.
void create_atoms(const MLNProgram& program, int predicate,
                  GroundDatabase& db,
                  std::map<std::pair<int, std::vector<int>>, int>& ids) {
  const PredicateSchema& schema = program.predicates[predicate];
  std::vector<std::vector<int>> domains;
  for (int d : schema.domains)
    domains.push_back(program.symbols.sorted_constants(d));
  for (const auto& dom : domains)
    if (dom.empty()) return;  // empty domain: no groundings

  std::vector<size_t> idx(domains.size(), 0);
  while (true) {
    std::vector<int> args(domains.size());
    for (size_t i = 0; i < domains.size(); ++i) args[i] = domains[i][idx[i]];
    int id = static_cast<int>(db.atoms.size());
    ids.emplace(std::make_pair(predicate, args), id);
    db.atoms.push_back({predicate, std::move(args)});
    size_t k = domains.size();
    while (k > 0) {
      --k;
      if (++idx[k] < domains[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
  }
}

struct Simplified {
  bool satisfied = false;  // clause fixed true by evidence/constraints
  std::vector<GroundLiteral> literals;
  bool tautology = false;
};

Simplified simplify(const MLNProgram& program, const GroundDatabase& db,
                    const Clause& clause, const std::vector<int>& binding) {
  Simplified out;
  auto term_value = [&](const Term& t) {
    return t.is_var ? binding[static_cast<size_t>(t.index)] : t.index;
  };
  for (const EqConstraint& c : clause.constraints) {
    bool holds = (term_value(c.lhs) == term_value(c.rhs)) == c.equal;
    if (holds) {
      out.satisfied = true;
      return out;
    }
    // false constraint: drops out of the disjunction
  }
  std::map<int, bool> seen;  // atom -> sign
  for (const Literal& lit : clause.literals) {
    std::vector<int> args(lit.args.size());
    for (size_t i = 0; i < lit.args.size(); ++i)
      args[i] = term_value(lit.args[i]);
    if (!program.is_query(lit.predicate)) {
      bool truth = db.evidence.is_true(lit.predicate, args);
      if (truth == lit.positive) {
        out.satisfied = true;
        return out;
      }
      continue;  // literal fixed false
    }
    int atom = db.find_atom(lit.predicate, args);
    auto it = seen.find(atom);
    if (it == seen.end()) {
      seen.emplace(atom, lit.positive);
      out.literals.push_back({lit.positive, atom});
    } else if (it->second != lit.positive) {
      out.tautology = true;
      return out;
    }
  }
  return out;
}

}  // namespace

GroundDatabase ground(const MLNProgram& program) {
  validate_program(program);
  GroundDatabase db;
  db.program = &program;
  db.evidence = EvidenceIndex(program);

  // atoms for query predicates mentioned by at least one rule
  std::set<int> mentioned;
  for (const Clause& clause : program.rules)
    for (const Literal& lit : clause.literals)
      if (program.is_query(lit.predicate)) mentioned.insert(lit.predicate);
  for (size_t p = 0; p < program.predicates.size(); ++p)
    if (mentioned.count(static_cast<int>(p)))
      create_atoms(program, static_cast<int>(p), db, db.atom_ids_);

  for (size_t r = 0; r < program.rules.size(); ++r) {
    const Clause& clause = program.rules[r];
    if (clause.weight == 0) continue;
    std::vector<std::vector<int>> domains;
    bool empty_domain = false;
    for (const ClauseVar& v : clause.vars) {
      if (v.domain < 0)
        throw SemanticError(cat("variable ", v.name, " has no domain"));
      domains.push_back(program.symbols.sorted_constants(v.domain));
      if (domains.back().empty()) empty_domain = true;
    }
    if (empty_domain) continue;  // no instantiations

    std::vector<size_t> idx(domains.size(), 0);
    std::vector<int> binding(domains.size(), 0);
    while (true) {
      for (size_t i = 0; i < domains.size(); ++i)
        binding[i] = domains[i][idx[i]];
      Simplified s = simplify(program, db, clause, binding);
      if (!s.tautology) {
        if (s.satisfied) {
          // satisfied for every world: violated iff w < 0
          if (clause.weight < 0) db.base_cost += -clause.weight;
        } else if (s.literals.empty()) {
          // false for every world: violated iff w > 0 (hard included)
          if (clause.weight > 0) db.base_cost += clause.weight;
        } else {
          db.clauses.push_back(
              {clause.weight, std::move(s.literals), static_cast<int>(r)});
        }
      }
      if (domains.empty()) break;
      size_t k = domains.size();
      bool done = false;
      while (k > 0) {
        --k;
        if (++idx[k] < domains[k].size()) break;
        idx[k] = 0;
        if (k == 0) done = true;
      }
      if (done) break;
    }
  }
  return db;
}

bool clause_true(const GroundClause& clause, const World& world) {
  for (const GroundLiteral& lit : clause.literals)
    if (world.get(lit.atom) == lit.positive) return true;
  return false;
}

bool clause_violated(const GroundClause& clause, const World& world) {
  if (clause.weight > 0) return !clause_true(clause, world);
  if (clause.weight < 0) return clause_true(clause, world);
  return false;
}

double world_cost(const GroundDatabase& db, const World& world) {
  double cost = db.base_cost;
  for (const GroundClause& clause : db.clauses)
    if (clause_violated(clause, world)) cost += std::abs(clause.weight);
  return cost;
}

}  // namespace dmln
