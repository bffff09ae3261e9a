#include "core/solvers/generic.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"
#include "core/util.hpp"

namespace dmln {

namespace {

// Incremental clause-state tracker: true-literal counts per clause plus
// occurrence lists per atom.
struct SearchState {
  const std::vector<GroundClause>& clauses;
  World world;
  std::vector<int> true_literals;
  std::vector<std::vector<int>> occurrences;  // atom -> clause indices
  std::vector<double> surrogate;              // |w| with hard replaced
  double cost = 0;                            // surrogate cost
  std::vector<int> violated;                  // indices, unordered
  std::vector<int> violated_pos;              // clause -> slot or -1

  SearchState(int atom_count, const std::vector<GroundClause>& cs,
              double hard_surrogate)
      : clauses(cs), world(static_cast<size_t>(atom_count)) {
    occurrences.assign(static_cast<size_t>(atom_count), {});
    true_literals.assign(clauses.size(), 0);
    violated_pos.assign(clauses.size(), -1);
    surrogate.reserve(clauses.size());
    for (size_t c = 0; c < clauses.size(); ++c) {
      surrogate.push_back(is_hard(clauses[c].weight)
                              ? hard_surrogate
                              : std::abs(clauses[c].weight));
      for (const GroundLiteral& lit : clauses[c].literals)
        occurrences[static_cast<size_t>(lit.atom)].push_back(
            static_cast<int>(c));
    }
  }

  bool clause_violated_now(size_t c) const {
    bool truth = true_literals[c] > 0;
    const GroundClause& clause = clauses[c];
    if (clause.weight < 0) return truth;
    return !truth;
  }

  void reset(const World& w) {
    world = w;
    cost = 0;
    violated.clear();
    std::fill(violated_pos.begin(), violated_pos.end(), -1);
    for (size_t c = 0; c < clauses.size(); ++c) {
      int t = 0;
      for (const GroundLiteral& lit : clauses[c].literals)
        if (world.get(lit.atom) == lit.positive) ++t;
      true_literals[c] = t;
      if (clause_violated_now(c)) mark_violated(c);
    }
  }

  void mark_violated(size_t c) {
    cost += surrogate[c];
    violated_pos[c] = static_cast<int>(violated.size());
    violated.push_back(static_cast<int>(c));
  }

  void unmark_violated(size_t c) {
    cost -= surrogate[c];
    int slot = violated_pos[c];
    int last = violated.back();
    violated[static_cast<size_t>(slot)] = last;
    violated_pos[static_cast<size_t>(last)] = slot;
    violated.pop_back();
    violated_pos[c] = -1;
  }

  void flip(int atom) {
    bool nv = !world.get(atom);
    world.set(atom, nv);
    for (int c : occurrences[static_cast<size_t>(atom)]) {
      size_t cc = static_cast<size_t>(c);
      bool was = clause_violated_now(cc);
      for (const GroundLiteral& lit : clauses[cc].literals)
        if (lit.atom == atom) true_literals[cc] += (nv == lit.positive) ? 1 : -1;
      bool now = clause_violated_now(cc);
      if (was && !now) unmark_violated(cc);
      if (!was && now) mark_violated(cc);
    }
  }

  double flip_delta(int atom) {
    double before = cost;
    flip(atom);
    double after = cost;
    flip(atom);
    return after - before;
  }
};

double exact_cost(const std::vector<GroundClause>& clauses, const World& w,
                  bool* feasible) {
  double cost = 0;
  *feasible = true;
  for (const GroundClause& c : clauses) {
    if (clause_violated(c, w)) {
      if (is_hard(c.weight)) *feasible = false;
      cost += std::abs(c.weight);
    }
  }
  return cost;
}

World random_start(int atom_count, const std::vector<GroundClause>& clauses,
                   Rng& rng) {
  World w(static_cast<size_t>(atom_count));
  std::uniform_int_distribution<int> coin(0, 1);
  for (int a = 0; a < atom_count; ++a) w.set(a, coin(rng) == 1);
  // honor unit hard clauses
  for (const GroundClause& c : clauses) {
    if (!is_hard(c.weight) || c.literals.size() != 1) continue;
    w.set(c.literals[0].atom, c.literals[0].positive);
  }
  return w;
}

}  // namespace

GenericMapResult maxwalksat(int atom_count,
                            const std::vector<GroundClause>& clauses,
                            const WalkSatParams& params, std::uint64_t seed) {
  Rng rng(seed);
  double soft_total = 0;
  for (const GroundClause& c : clauses)
    if (!is_hard(c.weight)) soft_total += std::abs(c.weight);
  double hard_surrogate = 1e4 + soft_total;

  GenericMapResult best;
  best.world = World(static_cast<size_t>(atom_count));
  best.cost = kHardWeight;
  best.feasible = false;
  double best_surrogate = kHardWeight;

  SearchState state(atom_count, clauses, hard_surrogate);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int restart = 0; restart < std::max(1, params.restarts); ++restart) {
    state.reset(random_start(atom_count, clauses, rng));
    if (state.cost < best_surrogate) {
      best_surrogate = state.cost;
      best.world = state.world;
    }
    for (int flip = 0; flip < params.max_flips; ++flip) {
      if (state.violated.empty()) break;  // cost 0 is globally optimal
      std::uniform_int_distribution<size_t> pick(0, state.violated.size() - 1);
      const GroundClause& clause =
          state.clauses[static_cast<size_t>(state.violated[pick(rng)])];
      int atom;
      if (unit(rng) < params.noise) {
        std::uniform_int_distribution<size_t> lit(0, clause.literals.size() - 1);
        atom = clause.literals[lit(rng)].atom;
      } else {
        atom = clause.literals[0].atom;
        double best_delta = state.flip_delta(atom);
        for (size_t i = 1; i < clause.literals.size(); ++i) {
          double d = state.flip_delta(clause.literals[i].atom);
          if (d < best_delta) {
            best_delta = d;
            atom = clause.literals[i].atom;
          }
        }
      }
      state.flip(atom);
      if (state.cost < best_surrogate) {
        best_surrogate = state.cost;
        best.world = state.world;
      }
    }
    if (state.violated.empty()) break;
  }
  best.cost = exact_cost(clauses, best.world, &best.feasible);
  return best;
}

std::vector<double> gibbs_marginals(int atom_count,
                                    const std::vector<GroundClause>& clauses,
                                    const GibbsParams& params,
                                    std::uint64_t seed) {
  Rng rng(seed);
  SearchState state(atom_count, clauses, 0.0);  // surrogate unused here
  state.reset(random_start(atom_count, clauses, rng));
  std::vector<double> sums(static_cast<size_t>(atom_count), 0.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto conditional_cost = [&](int atom, bool value) {
    double c = 0;
    for (int ci : state.occurrences[static_cast<size_t>(atom)]) {
      const GroundClause& clause = clauses[static_cast<size_t>(ci)];
      int t = state.true_literals[static_cast<size_t>(ci)];
      bool cur = state.world.get(atom);
      for (const GroundLiteral& lit : clause.literals)
        if (lit.atom == atom) {
          t -= (cur == lit.positive) ? 1 : 0;
          t += (value == lit.positive) ? 1 : 0;
        }
      bool truth = t > 0;
      bool violated = clause.weight < 0 ? truth : !truth;
      if (violated) c += is_hard(clause.weight) ? kHardWeight
                                                : std::abs(clause.weight);
    }
    return c;
  };

  int total = params.burn_in + params.samples;
  for (int sweep = 0; sweep < total; ++sweep) {
    for (int a = 0; a < atom_count; ++a) {
      double ct = conditional_cost(a, true);
      double cf = conditional_cost(a, false);
      bool nv;
      if (std::isinf(ct) && std::isinf(cf)) {
        nv = state.world.get(a);  // boxed in by hard clauses: keep
      } else if (std::isinf(ct)) {
        nv = false;
      } else if (std::isinf(cf)) {
        nv = true;
      } else {
        double m = std::min(ct, cf);
        double pt = std::exp(-(ct - m));
        double pf = std::exp(-(cf - m));
        nv = unit(rng) < pt / (pt + pf);
      }
      if (nv != state.world.get(a)) state.flip(a);
    }
    if (sweep >= params.burn_in)
      for (int a = 0; a < atom_count; ++a)
        sums[static_cast<size_t>(a)] += state.world.get(a) ? 1.0 : 0.0;
  }
  for (double& s : sums) s /= std::max(1, params.samples);
  return sums;
}

namespace {

// The joint subprogram: task clauses plus one singleton clause per nonzero
// multiplier, all over local indices.
std::vector<GroundClause> with_prior_singletons(const TaskInput& input) {
  std::vector<GroundClause> clauses = input.clauses;
  for (size_t i = 0; i < input.atoms.size(); ++i) {
    if (input.priors[i] == 0) continue;
    GroundClause c;
    c.weight = input.priors[i];
    c.literals.push_back({true, static_cast<int>(i)});
    c.rule_index = -1;
    clauses.push_back(std::move(c));
  }
  return clauses;
}

}  // namespace

SolverResult run_generic_task_map(const TaskInput& input,
                                  const WalkSatParams& params,
                                  std::uint64_t seed) {
  std::vector<GroundClause> clauses = with_prior_singletons(input);
  GenericMapResult r =
      maxwalksat(static_cast<int>(input.atoms.size()), clauses, params, seed);
  SolverResult out;
  out.assignment.assign(input.atoms.size(), 0);
  for (size_t i = 0; i < input.atoms.size(); ++i)
    out.assignment[i] = r.world.get(static_cast<int>(i)) ? 1 : 0;
  out.cost = r.cost;
  out.infeasible = !r.feasible;
  if (!r.feasible) out.message = "hard clauses unsatisfied after search";
  return out;
}

SolverResult run_generic_task_marginal(const TaskInput& input,
                                       const GibbsParams& params,
                                       std::uint64_t seed) {
  std::vector<GroundClause> clauses = with_prior_singletons(input);
  SolverResult out;
  out.marginals =
      gibbs_marginals(static_cast<int>(input.atoms.size()), clauses, params, seed);
  out.assignment.assign(input.atoms.size(), 0);
  for (size_t i = 0; i < input.atoms.size(); ++i)
    out.assignment[i] = out.marginals[i] >= 0.5 ? 1 : 0;
  // cost of the rounded world, for reporting
  bool feasible = true;
  World w(input.atoms.size());
  for (size_t i = 0; i < input.atoms.size(); ++i)
    w.set(static_cast<int>(i), out.assignment[i] != 0);
  out.cost = exact_cost(clauses, w, &feasible);
  return out;
}

}  // namespace dmln
