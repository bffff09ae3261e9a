#include "support/brute_force.hpp"

#include <cmath>

#include "core/util.hpp"

namespace dmln::testing {

bool naive_violated(const GroundClause& clause, const World& world) {
  bool truth = false;
  for (const GroundLiteral& lit : clause.literals) {
    bool atom = world.get(lit.atom);
    if ((lit.positive && atom) || (!lit.positive && !atom)) truth = true;
  }
  if (clause.weight < 0) return truth;
  return !truth;  // hard counts as positive
}

double naive_cost(const GroundDatabase& db, const World& world) {
  double cost = db.base_cost;
  for (const GroundClause& clause : db.clauses)
    if (naive_violated(clause, world)) cost += std::abs(clause.weight);
  return cost;
}

std::pair<World, double> brute_force_map(const GroundDatabase& db) {
  int n = db.atom_count();
  if (n > 25) throw TooLargeError("brute_force_map: instance too large");
  World best;
  double best_cost = kHardWeight;
  bool first = true;
  for_all_worlds(n, [&](const World& w) {
    double c = naive_cost(db, w);
    if (first || c < best_cost) {
      best = w;
      best_cost = c;
      first = false;
    }
  });
  return {best, best_cost};
}

std::vector<double> brute_force_marginals(const GroundDatabase& db) {
  int n = db.atom_count();
  if (n > 20) throw TooLargeError("brute_force_marginals: instance too large");
  std::vector<double> sums(static_cast<size_t>(n), 0.0);
  double z = 0;
  for_all_worlds(n, [&](const World& w) {
    double c = naive_cost(db, w);
    if (std::isinf(c)) return;  // zero probability
    double weight = std::exp(-c);
    z += weight;
    for (int a = 0; a < n; ++a)
      if (w.get(a)) sums[static_cast<size_t>(a)] += weight;
  });
  if (z > 0)
    for (double& s : sums) s /= z;
  return sums;
}

}  // namespace dmln::testing
