#include "doctest.h"

#include <cmath>

#include "core/master.hpp"
#include "core/parser.hpp"
#include "core/rng.hpp"
#include "core/session.hpp"
#include "core/solvers/dmo.hpp"

#include <set>
#include "support/brute_force.hpp"
#include "support/checks.hpp"
#include "support/generators.hpp"

using namespace dmln;
namespace dt = dmln::testing;

namespace {

const char* kGamePlayProgram = R"(
token(pos, word)
next(pos, pos)
referTo(pos, team)
*lbl(tag, pos)
*winner(team)
inf: lbl(t1, p), lbl(t2, p) => t1 = t2 @task(L)
10: next(p1, p2), token(p2, Wins) => lbl(W, p1) @task(L)
1: lbl(W, p1), next(p1, p2) => !lbl(W, p2) @task(L)
10: lbl(W, p), referTo(p, team) => winner(team) @task(C)
10: lbl(L, p), referTo(p, team) => !winner(team) @task(C)
)";

const char* kGamePlayEvidence = R"(
next(P1, P2)
token(P2, Wins)
referTo(P1, GreenBay)
)";

const char* kHappySadDecomposed = R"(
GoodNews(person)
BadNews(person)
*Happy(person)
*Sad(person)
1: GoodNews(p) => Happy(p) @task(g1)
1: BadNews(p) => Sad(p) @task(g2)
5: Happy(p) <=> !Sad(p) @task(g2)
)";

MLNProgram parsed(const char* text, const char* evidence) {
  MLNProgram p = parse_program(text);
  parse_evidence(evidence, p);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("master");

TEST_CASE("subgradient update arithmetic, truth-valued copies") {
  // two tasks share one atom; copies 1 and 0, step 0.5
  SharedVariableRegistry registry;
  registry.tasks_of_atom[7] = {0, 1};
  registry.copies[7][0] = 1.0;
  registry.copies[7][1] = 0.0;
  MultiplierStore store;
  update_multipliers(registry, store, 0.5);
  CHECK(store.get(7, 0) == doctest::Approx(-0.25));
  CHECK(store.get(7, 1) == doctest::Approx(0.25));
  CHECK(std::abs(store.sum(7)) <= 1e-12);

  // equal copies leave multipliers unchanged
  registry.copies[7][0] = 1.0;
  registry.copies[7][1] = 1.0;
  MultiplierStore untouched;
  update_multipliers(registry, untouched, 0.5);
  CHECK(untouched.get(7, 0) == 0.0);
  CHECK(untouched.get(7, 1) == 0.0);
}

TEST_CASE("subgradient update arithmetic, marginal copies") {
  // the winner/label worked example: 0.99 vs 0.5 and 0.01 vs 0.5
  SharedVariableRegistry registry;
  registry.tasks_of_atom[0] = {0, 1};
  registry.tasks_of_atom[1] = {0, 1};
  registry.copies[0][0] = 0.99;
  registry.copies[0][1] = 0.5;
  registry.copies[1][0] = 0.01;
  registry.copies[1][1] = 0.5;
  MultiplierStore store;
  update_multipliers(registry, store, 0.5);
  CHECK(store.get(0, 0) == doctest::Approx(-0.1225));
  CHECK(store.get(0, 1) == doctest::Approx(0.1225));
  CHECK(store.get(1, 0) == doctest::Approx(0.1225));
  CHECK(store.get(1, 1) == doctest::Approx(-0.1225));
  CHECK(std::abs(store.sum(0)) <= 1e-12);
  CHECK(std::abs(store.sum(1)) <= 1e-12);
}

TEST_CASE("missing copy reports are an error") {
  SharedVariableRegistry registry;
  registry.tasks_of_atom[3] = {0, 1};
  registry.copies[3][0] = 1.0;
  MultiplierStore store;
  CHECK_THROWS_AS(update_multipliers(registry, store, 0.5), SemanticError);
}

TEST_CASE("task partitioning into connected components") {
  // two disjoint pairs
  std::vector<GroundClause> clauses{{1.0, {{true, 0}, {true, 1}}, 0},
                                    {1.0, {{true, 2}, {false, 3}}, 1}};
  auto components = partition_task(4, clauses);
  CHECK(components.size() == 2);
  CHECK(components[0] == std::vector<int>{0, 1});
  CHECK(components[1] == std::vector<int>{2, 3});

  // chain a-b, b-c collapses to one component
  std::vector<GroundClause> chain{{1.0, {{true, 0}, {true, 1}}, 0},
                                  {1.0, {{true, 1}, {true, 2}}, 1}};
  CHECK(partition_task(3, chain).size() == 1);
}

TEST_CASE("component-wise optima sum to the joint optimum") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    GroundDatabase db = dt::random_ground_db(rng, 10, 6, false);
    auto [w, joint] = dt::brute_force_map(db);
    auto components = partition_task(10, db.clauses);
    double total = 0;
    for (const auto& atoms : components) {
      // restrict to the component's clauses
      GroundDatabase sub;
      std::map<int, int> remap;
      for (int a : atoms) {
        remap[a] = static_cast<int>(sub.atoms.size());
        sub.atoms.push_back({-1, {a}});
      }
      for (const GroundClause& c : db.clauses) {
        if (c.literals.empty() || !remap.count(c.literals[0].atom)) continue;
        GroundClause copy = c;
        for (GroundLiteral& lit : copy.literals) lit.atom = remap.at(lit.atom);
        sub.clauses.push_back(std::move(copy));
      }
      total += dt::brute_force_map(sub).second;
    }
    CHECK(dt::cost_eq(total, joint));
  }
}

TEST_CASE("game labeling example reproduces the worked multipliers") {
  MLNProgram program = parsed(kGamePlayProgram, kGamePlayEvidence);
  GroundDatabase db = ground(program);
  LogicalPlan plan = assign_tasks(program);
  REQUIRE(plan.tasks.size() == 2);
  CHECK(plan.tasks[0].kind == TaskKind::CorrelatedClassification);
  CHECK(plan.tasks[1].kind == TaskKind::SimpleClassification);

  MasterConfig config;
  config.max_iterations = 1;
  config.schedule.mode = StepSchedule::Mode::Constant;
  config.schedule.initial = 0.5;
  Master master(db, plan, config);
  master.run();

  int lbl = program.predicate_id("lbl");
  int tag_dom = program.predicates[lbl].domains[0];
  int pos_dom = program.predicates[lbl].domains[1];
  int w_p1 = db.find_atom(lbl, {*program.symbols.lookup(tag_dom, "W"),
                                *program.symbols.lookup(pos_dom, "P1")});
  REQUIRE(w_p1 >= 0);
  // after the first update: the labeling task is pushed down by 0.25, the
  // classification task up by 0.25
  CHECK(master.multipliers().get(w_p1, 0) == doctest::Approx(-0.25));
  CHECK(master.multipliers().get(w_p1, 1) == doctest::Approx(0.25));
  // the L-tag copies agreed at zero and stay untouched
  int l_p1 = db.find_atom(lbl, {*program.symbols.lookup(tag_dom, "L"),
                                *program.symbols.lookup(pos_dom, "P1")});
  CHECK(master.multipliers().get(l_p1, 0) == 0.0);
  CHECK(master.multipliers().get(l_p1, 1) == 0.0);

  // run to convergence: the winner atom agrees with the label evidence
  MasterConfig full;
  full.schedule.mode = StepSchedule::Mode::Constant;
  full.schedule.initial = 0.5;
  Master converged(db, plan, full);
  RunResult result = converged.run();
  CHECK(!result.infeasible);
  CHECK(result.stats.stop_reason == "agreement");
  int winner = db.find_atom(program.predicate_id("winner"), {0});
  CHECK(result.world.get(winner));
  CHECK(result.world.get(w_p1));
  auto [bf_world, bf_cost] = dt::brute_force_map(db);
  CHECK(dt::cost_eq(result.stats.final_cost, bf_cost));
  CHECK(result.stats.certified);
  // sum-zero invariant after every iteration, exact
  for (const auto& [atom, per_task] : converged.multipliers().lambda)
    CHECK(std::abs(converged.multipliers().sum(atom)) <= 1e-12);
}

TEST_CASE("decomposed happy/sad reaches the brute-force optimum") {
  MLNProgram program = parsed(kHappySadDecomposed, "GoodNews(A)\n");
  GroundDatabase db = ground(program);
  LogicalPlan plan = assign_tasks(program);
  REQUIRE(plan.tasks.size() == 2);
  // the shared relation has one copy per task
  int happy = program.predicate_id("Happy");
  CHECK(plan.relation_tasks.at(happy).size() == 2);

  MasterConfig config;
  Master master(db, plan, config);
  RunResult result = master.run();
  CHECK(!result.infeasible);
  CHECK(result.stats.final_cost == 0);
  CHECK(result.stats.certified);
  int happy_a = db.find_atom(happy, {0});
  CHECK(result.world.get(happy_a));
  // both copies reported and agreeing
  CHECK(master.registry().copies.at(happy_a).size() == 2);
}

TEST_CASE("single-task plans stop without message passing") {
  MLNProgram program = parsed(
      "e(d)\n*p(d)\n2: e(x) => p(x)\n", "e(C1)\ne(C2)\n");
  GroundDatabase db = ground(program);
  LogicalPlan plan = assign_tasks(program);
  REQUIRE(plan.tasks.size() == 1);
  MasterConfig config;
  Master master(db, plan, config);
  RunResult result = master.run();
  CHECK(result.stats.iterations == 0);
  CHECK(result.stats.stop_reason == "no_shared_atoms");
  CHECK(result.stats.final_cost == 0);
  for (int a = 0; a < db.atom_count(); ++a) CHECK(result.world.get(a));
}

TEST_CASE("random decomposed programs track the brute-force optimum") {
  Rng rng(2718);
  int within = 0, total = 0;
  for (int trial = 0; trial < 15; ++trial) {
    std::string text = dt::random_program_text(rng, 3, 4, 10, 3);
    MLNProgram program = parse_program(text);
    GroundDatabase db = ground(program);
    if (db.atom_count() > 15) continue;
    auto [bf_world, bf_cost] = dt::brute_force_map(db);
    if (std::isinf(bf_cost)) continue;

    LogicalPlan plan = assign_tasks(program);
    MasterConfig config;
    config.seed = 1000 + static_cast<std::uint64_t>(trial);
    config.walksat.max_flips = 20000;
    config.walksat.restarts = 5;
    Master master(db, plan, config);
    RunResult result = master.run();
    REQUIRE(!result.infeasible);
    ++total;
    if (result.stats.certified)
      CHECK(dt::cost_eq(result.stats.final_cost, bf_cost, 1e-6));
    if (result.stats.final_cost <= bf_cost * 1.05 + 1e-9) ++within;

    // the multiplier invariant holds exactly
    for (const auto& [atom, per_task] : master.multipliers().lambda)
      CHECK(std::abs(master.multipliers().sum(atom)) <= 1e-12);
    // the best primal trace never increases
    double prev = dmln::kHardWeight;
    for (const IterationStats& s : result.stats.trace) {
      CHECK(s.best_primal <= prev + 1e-12);
      prev = s.best_primal;
    }
  }
  REQUIRE(total >= 10);
  CHECK(within >= total * 9 / 10);
}

TEST_CASE("marginal mode on the decomposed happy/sad program") {
  MLNProgram program = parsed(kHappySadDecomposed, "GoodNews(A)\n");
  GroundDatabase db = ground(program);
  LogicalPlan plan = assign_tasks(program);
  MasterConfig config;
  config.marginal = true;
  config.max_iterations = 100;
  Master master(db, plan, config);
  RunResult result = master.run();
  REQUIRE(!result.infeasible);
  std::vector<double> expect = dt::brute_force_marginals(db);
  int happy_a = db.find_atom(program.predicate_id("Happy"), {0});
  CHECK(std::abs(result.marginals[static_cast<size_t>(happy_a)] -
                 expect[static_cast<size_t>(happy_a)]) < 0.05);
}

TEST_CASE("evidence-falsified hard clauses are infeasible") {
  MLNProgram program = parsed(
      "e(d)\n*p(d)\ninf: e(x) => p(x)\ninf: e(x) => !p(x)\n", "e(C1)\n");
  GroundDatabase db = ground(program);
  LogicalPlan plan = assign_tasks(program);
  Master master(db, plan, MasterConfig{});
  RunResult result = master.run();
  CHECK(result.infeasible);
}

TEST_CASE("identical seeds reproduce identical runs") {
  MLNProgram program = parsed(kGamePlayProgram, kGamePlayEvidence);
  GroundDatabase db = ground(program);
  LogicalPlan plan = assign_tasks(program);
  MasterConfig config;
  config.seed = 42;
  RunResult a = Master(db, plan, config).run();
  RunResult b = Master(db, plan, config).run();
  CHECK(a.world == b.world);
  CHECK(a.stats.final_cost == b.stats.final_cost);
  // worker count does not change the outcome
  config.workers = 2;
  RunResult c = Master(db, plan, config).run();
  CHECK(c.world == a.world);
}


TEST_CASE("registered data-movement views carry the solvers' adornments") {
  const char* text = R"(
pSimHard(per, per)
pSimSoft(per, per)
coOccurs(per, org)
homepage(per, page)
oMention(page, org)
*affil(per, org)
*pCoref(per, per)
inf: pCoref(p, p)
inf: pCoref(p1, p2) => pCoref(p2, p1)
inf: pCoref(x, y), pCoref(y, z) => pCoref(x, z)
6: pSimHard(p1, p2) => pCoref(p1, p2)
2: affil(p1, o), affil(p2, o), pSimSoft(p1, p2) => pCoref(p1, p2)
8: homepage(p, d), oMention(d, o) => affil(p, o)
4: coOccurs(p1, o), pCoref(p1, p2) => affil(p2, o)
)";
  MLNProgram program = parse_program(text);
  parse_evidence(
      "pSimHard(A, B)\npSimSoft(A, C)\ncoOccurs(A, O1)\n"
      "homepage(B, D1)\noMention(D1, O2)\n",
      program);
  Session session(std::move(program));
  session.compile(SessionConfig{});

  // the coref task registers the neighborhood view from the pair rule:
  // bound first mention, free second, body = affil, affil, pSimSoft
  bool found_bf = false, found_bbf = false, found_generic_free = true;
  for (const DmoReport& dmo : session.dmos()) {
    if (dmo.view.adornment_string() == "bf" && dmo.view.subgoals.size() == 3) {
      std::multiset<std::string> rels;
      for (const Subgoal& g : dmo.view.subgoals) rels.insert(g.relation);
      if (rels == std::multiset<std::string>{"affil", "affil", "pSimSoft"}) {
        found_bf = true;
        CHECK(dmo.view.access_estimate >= 1.0);
      }
    }
    // classification probes per object: both owned arguments bound plus the
    // free existential
    if (dmo.view.adornment_string() == "bbf" && dmo.view.subgoals.size() == 2)
      found_bbf = true;
  }
  CHECK(found_bf);
  CHECK(found_bbf);
  CHECK(found_generic_free);
  // every registered view has a costed plan
  for (const DmoReport& dmo : session.dmos())
    CHECK(dmo.plan.exec_cost >= 0);
}

TEST_CASE("tasks without shared inputs register only grounding views") {
  MLNProgram program = parse_program("e(d)\n*a(d)\n*b(d)\n2: a(x) v b(x)\n1: e(x) => a(x)\n");
  parse_evidence("e(C1)\n", program);
  Session session(std::move(program));
  session.compile(SessionConfig{});
  for (const DmoReport& dmo : session.dmos()) {
    for (Binding bind : dmo.view.adornment) CHECK(bind == Binding::Free);
    CHECK(dmo.view.access_estimate == 1.0);
  }
}

TEST_SUITE_END();
