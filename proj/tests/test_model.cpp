#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "lll/lll.hpp"
#include "test_util.hpp"

using namespace lll;

namespace {

Instance two_clause_instance() {
  // clause 0 = (x0 or x1), clause 1 = (x1 or x2), clause 2 = (x3)
  Instance inst;
  for (int v = 0; v < 4; ++v) inst.variables.push_back(VarSpec::uniform(v, 2));
  inst.events.push_back(Event::clause(0, {{0, true}, {1, true}}));
  inst.events.push_back(Event::clause(1, {{1, true}, {2, true}}));
  inst.events.push_back(Event::clause(2, {{3, true}}));
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("instance validation rejects malformed inputs") {
  Instance inst;
  inst.variables.push_back(VarSpec::uniform(0, 2));

  SUBCASE("weights must sum to 1") {
    inst.variables[0].weights = {0.5, 0.6};
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  }
  SUBCASE("weight count must match domain") {
    inst.variables[0].weights = {1.0};
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  }
  SUBCASE("event support must be nonempty") {
    inst.events.push_back(Event::constant(0, {}, false));
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  }
  SUBCASE("event support must be duplicate-free") {
    inst.events.push_back(Event::constant(0, {0, 0}, false));
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  }
  SUBCASE("referenced variables must exist") {
    inst.events.push_back(Event::constant(0, {3}, false));
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  }
  SUBCASE("event ids must be dense") {
    Event e = Event::constant(5, {0}, false);
    inst.events.push_back(e);
    CHECK_THROWS_AS(inst.validate(), std::invalid_argument);
  }
}

TEST_CASE("dependency graph matches the support-sharing definition") {
  SUBCASE("disjoint supports give an edgeless graph") {
    Instance inst;
    for (int v = 0; v < 4; ++v) inst.variables.push_back(VarSpec::uniform(v, 2));
    inst.events.push_back(Event::clause(0, {{0, true}, {1, true}}));
    inst.events.push_back(Event::clause(1, {{2, true}, {3, true}}));
    inst.validate();
    const DependencyGraph g = build_dependency_graph(inst);
    CHECK(g.size() == 2);
    CHECK(g.edge_count() == 0);
    CHECK_FALSE(g.adjacent(0, 1));
  }
  SUBCASE("one event: no edges, inclusive neighborhood is itself") {
    Instance inst;
    inst.variables.push_back(VarSpec::uniform(0, 2));
    inst.events.push_back(Event::clause(0, {{0, true}}));
    inst.validate();
    const DependencyGraph g = build_dependency_graph(inst);
    CHECK(g.size() == 1);
    CHECK(g.edge_count() == 0);
    CHECK(g.neighbors(0).empty());
    CHECK(g.inclusive_neighbors(0) == std::vector<EventId>{0});
    CHECK(g.overlaps(0, 0));
  }
  SUBCASE("supports {1,2},{2,3},{4} give exactly edge (0,1)") {
    Instance inst;
    for (int v = 0; v < 5; ++v) inst.variables.push_back(VarSpec::uniform(v, 2));
    inst.events.push_back(Event::clause(0, {{1, true}, {2, true}}));
    inst.events.push_back(Event::clause(1, {{2, true}, {3, true}}));
    inst.events.push_back(Event::clause(2, {{4, true}}));
    inst.validate();
    const DependencyGraph g = build_dependency_graph(inst);
    const auto expected = testutil::brute_force_edges(inst);
    CHECK(expected == std::set<std::pair<int, int>>{{0, 1}});
    CHECK(g.adjacent(0, 1));
    CHECK_FALSE(g.adjacent(0, 2));
    CHECK_FALSE(g.adjacent(1, 2));
    CHECK(g.edge_count() == 1);
  }
}

TEST_CASE("dependency graph is symmetric, irreflexive, and matches brute force on random instances") {
  CounterRng rng(321);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = testutil::random_instance(rng);
    const DependencyGraph g = build_dependency_graph(inst);
    const auto expected = testutil::brute_force_edges(inst);
    for (int a = 0; a < g.size(); ++a) {
      CHECK_FALSE(g.adjacent(a, a));
      for (int b = 0; b < g.size(); ++b) {
        CHECK(g.adjacent(a, b) == g.adjacent(b, a));
        if (a < b) CHECK(g.adjacent(a, b) == (expected.count({a, b}) > 0));
      }
    }
  }
}

TEST_CASE("is_violated evaluates the predicate on the support restriction") {
  const Instance inst = two_clause_instance();
  Assignment a{{0, 0, 1, 1}};
  CHECK(is_violated(inst, a, 0));        // x0, x1 both false
  CHECK_FALSE(is_violated(inst, a, 1));  // x2 true
  a.values = {1, 0, 0, 0};
  CHECK_FALSE(is_violated(inst, a, 0));  // x0 true, regardless of x2,x3
  a.values = {1, 0, 0, 1};
  CHECK_FALSE(is_violated(inst, a, 0));
  CHECK_THROWS_AS(is_violated(inst, a, 7), std::invalid_argument);
  CHECK_THROWS_AS(is_violated(inst, a, -1), std::invalid_argument);
}

TEST_CASE("monochromatic event on a 3-edge") {
  Instance inst;
  for (int v = 0; v < 3; ++v) inst.variables.push_back(VarSpec::uniform(v, 2));
  inst.events.push_back(Event::monochromatic(0, {0, 1, 2}));
  inst.validate();
  CHECK_FALSE(is_violated(inst, Assignment{{0, 0, 1}}, 0));
  CHECK(is_violated(inst, Assignment{{1, 1, 1}}, 0));
  CHECK(is_violated(inst, Assignment{{0, 0, 0}}, 0));
  CHECK(event_probability(inst, 0) == doctest::Approx(0.25));
}

TEST_CASE("is_violated ignores variables outside the support") {
  CounterRng rng(777);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = testutil::random_instance(rng);
    Assignment a = sample_assignment(inst, rng);
    for (int e = 0; e < inst.num_events(); ++e) {
      const bool before = is_violated(inst, a, e);
      Assignment perturbed = a;
      for (int v = 0; v < inst.num_variables(); ++v) {
        const auto& vbl = inst.events[e].vbl;
        if (std::find(vbl.begin(), vbl.end(), v) != vbl.end()) continue;
        perturbed.values[v] =
            static_cast<int>(rng.next_below(static_cast<std::uint64_t>(inst.variables[v].domain_size)));
      }
      CHECK(is_violated(inst, perturbed, e) == before);
    }
  }
}

TEST_CASE("event_probability enumerates exactly") {
  Instance inst;
  for (int v = 0; v < 3; ++v) inst.variables.push_back(VarSpec::uniform(v, 2));
  inst.events.push_back(Event::constant(0, {0}, false));
  inst.events.push_back(Event::clause(1, {{0, true}, {1, true}, {2, true}}));
  inst.events.push_back(Event::constant(2, {1}, true));
  inst.validate();
  CHECK(event_probability(inst, 0) == 0.0);
  CHECK(event_probability(inst, 1) == doctest::Approx(0.125));
  CHECK(event_probability(inst, 2) == 1.0);
}

TEST_CASE("event_probability respects weighted variables") {
  Instance inst;
  VarSpec v0;
  v0.id = 0;
  v0.domain_size = 2;
  v0.weights = {0.25, 0.75};
  inst.variables.push_back(v0);
  inst.variables.push_back(VarSpec::uniform(1, 3));
  Event e;
  e.id = 0;
  e.vbl = {0, 1};
  e.violated = [](std::span<const int> vals) { return vals[0] == 1 && vals[1] == 2; };
  inst.events.push_back(std::move(e));
  inst.validate();
  CHECK(event_probability(inst, 0) == doctest::Approx(0.75 / 3.0));
}

TEST_CASE("event_probability refuses oversized supports with a useful message") {
  Instance inst;
  for (int v = 0; v < 30; ++v) inst.variables.push_back(VarSpec::uniform(v, 2));
  std::vector<VarId> all;
  for (int v = 0; v < 30; ++v) all.push_back(v);
  inst.events.push_back(Event::constant(0, all, false));
  inst.validate();
  CHECK_THROWS_WITH_AS(event_probability(inst, 0),
                       doctest::Contains("support too large for exact probability"),
                       std::runtime_error);
  // a generous cap allows it again
  CHECK(event_probability(inst, 0, std::uint64_t{1} << 31) == 0.0);
}

TEST_CASE("event_probability agrees with sampled violation frequency") {
  CounterRng rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = testutil::random_instance(rng);
    const std::vector<double> p = event_probabilities(inst);
    const int samples = 100000;
    std::vector<int> hits(static_cast<std::size_t>(inst.num_events()), 0);
    CounterRng sampler = rng.derive(1000 + static_cast<std::uint64_t>(trial));
    for (int s = 0; s < samples; ++s) {
      const Assignment a = sample_assignment(inst, sampler);
      for (int e = 0; e < inst.num_events(); ++e)
        if (is_violated(inst, a, e)) ++hits[static_cast<std::size_t>(e)];
    }
    for (int e = 0; e < inst.num_events(); ++e) {
      const double freq = static_cast<double>(hits[static_cast<std::size_t>(e)]) / samples;
      const double se = binomial_se(p[static_cast<std::size_t>(e)], samples);
      CHECK(std::abs(freq - p[static_cast<std::size_t>(e)]) <= 4.0 * se + 1e-12);
    }
  }
}
