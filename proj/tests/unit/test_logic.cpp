#include "doctest.h"

#include <cmath>

#include "core/ground.hpp"
#include "core/parser.hpp"
#include "core/rng.hpp"
#include "support/brute_force.hpp"
#include "support/checks.hpp"
#include "support/generators.hpp"
#include "support/naive_ground.hpp"

using namespace dmln;
namespace dt = dmln::testing;

namespace {

const char* kHappySadProgram = R"(
GoodNews(person)
BadNews(person)
*Happy(person)
*Sad(person)
1: GoodNews(p) => Happy(p)
1: BadNews(p) => Sad(p)
5: Happy(p) <=> !Sad(p)
)";

MLNProgram happy_sad() {
  MLNProgram program = parse_program(kHappySadProgram);
  parse_evidence("GoodNews(A)\n", program);
  return program;
}

}  // namespace

TEST_SUITE_BEGIN("logic");

TEST_CASE("grounding the happy/sad program") {
  MLNProgram program = happy_sad();
  GroundDatabase db = ground(program);
  // GoodNews literal eliminated as true, BadNews rule satisfied and dropped
  CHECK(db.atom_count() == 2);
  CHECK(db.clauses.size() == 3);
  CHECK(db.base_cost == 0);
  CHECK(db.atom_name(0) == "Happy(A)");
  CHECK(db.atom_name(1) == "Sad(A)");
}

TEST_CASE("grounding an empty rule set") {
  MLNProgram program = parse_program("*p(dom)\nq(dom)\n");
  GroundDatabase db = ground(program);
  CHECK(db.atom_count() == 0);
  CHECK(db.clauses.empty());
}

TEST_CASE("clause violation definition") {
  // satisfied positive clause is not violated
  GroundClause c1{5.0, {{true, 0}, {false, 1}}, 0};
  World w(2);
  w.set(0, true);
  w.set(1, true);
  CHECK(!clause_violated(c1, w));
  // negative-weight unit clause, true atom: violated
  GroundClause c2{-2.0, {{true, 0}}, 0};
  CHECK(clause_violated(c2, w));
  // hard treated as positive
  GroundClause c3{kHardWeight, {{false, 0}}, 0};
  CHECK(clause_violated(c3, w));
}

TEST_CASE("random clauses agree with the naive evaluator") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    GroundDatabase db = dt::random_ground_db(rng, 6, 5, true);
    dt::for_all_worlds(6, [&](const World& w) {
      for (const GroundClause& c : db.clauses)
        CHECK(clause_violated(c, w) == dt::naive_violated(c, w));
      CHECK(dt::cost_eq(world_cost(db, w), dt::naive_cost(db, w)));
    });
  }
}

TEST_CASE("world costs on happy/sad") {
  MLNProgram program = happy_sad();
  GroundDatabase db = ground(program);
  World w(2);
  w.set(0, true);  // Happy
  CHECK(world_cost(db, w) == 0);
  w.set(1, true);  // also Sad: the biconditional pays once
  CHECK(world_cost(db, w) == 5);
  GroundDatabase empty;
  CHECK(world_cost(empty, World(4)) == 0);
}

TEST_CASE("world cost is monotone under clause addition") {
  Rng rng(21);
  GroundDatabase db = dt::random_ground_db(rng, 8, 10, false);
  GroundDatabase more = db;
  GroundClause extra{2.5, {{true, 3}, {false, 5}}, 99};
  more.clauses.push_back(extra);
  dt::for_all_worlds(8, [&](const World& w) {
    CHECK(world_cost(more, w) >= world_cost(db, w));
  });
}

TEST_CASE("brute force map on happy/sad") {
  MLNProgram program = happy_sad();
  GroundDatabase db = ground(program);
  auto [world, cost] = dt::brute_force_map(db);
  CHECK(cost == 0);
  CHECK(world.get(0));   // Happy(A)
  CHECK(!world.get(1));  // Sad(A)
}

TEST_CASE("brute force map basics") {
  GroundDatabase db;
  db.atoms.push_back({-1, {0}});
  db.clauses.push_back({3.0, {{true, 0}}, 0});
  auto [world, cost] = dt::brute_force_map(db);
  CHECK(cost == 0);
  CHECK(world.get(0));
}

TEST_CASE("negating all weights swaps optimum and pessimum") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    GroundDatabase db = dt::random_ground_db(rng, 7, 8, false);
    GroundDatabase negated = db;
    for (GroundClause& c : negated.clauses) c.weight = -c.weight;
    auto [neg_world, neg_cost] = dt::brute_force_map(negated);
    // the negated optimum achieves the original maximum
    double max_cost = 0;
    dt::for_all_worlds(7, [&](const World& w) {
      max_cost = std::max(max_cost, dt::naive_cost(db, w));
    });
    CHECK(dt::cost_eq(dt::naive_cost(db, neg_world), max_cost));
    (void)neg_cost;
  }
}

TEST_CASE("brute force marginals") {
  GroundDatabase lone;
  lone.atoms.push_back({-1, {0}});
  CHECK(dt::brute_force_marginals(lone)[0] == doctest::Approx(0.5));

  GroundDatabase unit;
  unit.atoms.push_back({-1, {0}});
  unit.clauses.push_back({2.0, {{true, 0}}, 0});
  CHECK(dt::brute_force_marginals(unit)[0] ==
        doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));

  MLNProgram program = happy_sad();
  GroundDatabase db = ground(program);
  std::vector<double> m = dt::brute_force_marginals(db);
  for (double p : m) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  // golden values from the four-world enumeration
  double z = std::exp(0.0) + std::exp(-5.0) + std::exp(-6.0) + std::exp(-1.0);
  CHECK(m[0] == doctest::Approx((1.0 + std::exp(-5.0)) / z));
  CHECK(m[1] == doctest::Approx((std::exp(-5.0) + std::exp(-1.0)) / z));
}

TEST_CASE("grounding matches the no-elimination instantiator") {
  // reduced figure-style program: rules over three persons, two orgs
  const char* text = R"(
faculty(org, person)
homepage(person, page)
oMention(page, org)
coOccurs(person, org)
*affil(person, org)
inf: faculty(o, p) => affil(p, o)
8: homepage(p, d), oMention(d, o) => affil(p, o)
3: coOccurs(p, o) => affil(p, o)
4: coOccurs(p1, o), coOccurs(p2, o) => affil(p2, o)
)";
  MLNProgram program = parse_program(text);
  parse_evidence(R"(
faculty(O1, P1)
homepage(P2, D1)
oMention(D1, O2)
coOccurs(P1, O1)
coOccurs(P2, O1)
coOccurs(P3, O2)
)",
                 program);
  GroundDatabase db = ground(program);
  CHECK(db.atom_count() == 6);  // 3 persons x 2 orgs
  dt::NaiveGroundResult naive = dt::naive_ground(program, db);
  CHECK(naive.clauses.size() == db.clauses.size());
  CHECK(dt::cost_eq(naive.base_cost, db.base_cost));
  // identical cost for every world over the query atoms
  dt::for_all_worlds(db.atom_count(), [&](const World& w) {
    double via_naive = naive.base_cost;
    for (const GroundClause& c : naive.clauses)
      if (dt::naive_violated(c, w)) via_naive += std::abs(c.weight);
    CHECK(dt::cost_eq(world_cost(db, w), via_naive));
  });
}

TEST_CASE("random programs ground consistently with the instantiator") {
  Rng rng(91);
  for (int trial = 0; trial < 25; ++trial) {
    std::string text = dt::random_program_text(rng, 3, 3, 8, 0);
    MLNProgram program = parse_program(text);
    GroundDatabase db = ground(program);
    if (db.atom_count() > 12) continue;
    dt::NaiveGroundResult naive = dt::naive_ground(program, db);
    dt::for_all_worlds(db.atom_count(), [&](const World& w) {
      double via_naive = naive.base_cost;
      for (const GroundClause& c : naive.clauses)
        if (dt::naive_violated(c, w)) via_naive += std::abs(c.weight);
      CHECK(dt::cost_eq(world_cost(db, w), via_naive));
    });
  }
}

TEST_SUITE_END();
