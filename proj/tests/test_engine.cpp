#include <cmath>
#include <vector>

#include "doctest.h"
#include "lll/lll.hpp"
#include "test_util.hpp"

using namespace lll;

namespace {

Instance fair_coin_event() {
  // single event "x0 = 0" on a fair coin; p = 1/2
  Instance inst;
  inst.variables.push_back(VarSpec::uniform(0, 2));
  inst.events.push_back(Event::clause(0, {{0, true}}));
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("run terminates immediately when nothing can be violated") {
  Instance inst;
  inst.variables.push_back(VarSpec::uniform(0, 2));
  inst.variables.push_back(VarSpec::uniform(1, 2));
  inst.events.push_back(Event::constant(0, {0}, false));
  inst.events.push_back(Event::constant(1, {1}, false));
  inst.validate();
  const ExecutionLog log = run(inst, SelectionPolicy::lowest_id, 1, 1000);
  CHECK(log.terminated);
  CHECK(log.steps.empty());
  CHECK(log.steps_used == 0);
  CHECK(find_violated(inst, log.final_assignment).empty());
}

TEST_CASE("an impossible event exhausts max_steps in-band") {
  Instance inst;
  inst.variables.push_back(VarSpec::uniform(0, 2));
  inst.events.push_back(Event::constant(0, {0}, true));  // p = 1
  inst.validate();
  const ExecutionLog log = run(inst, SelectionPolicy::lowest_id, 7, 500);
  CHECK_FALSE(log.terminated);
  CHECK(log.steps_used == 500);
  CHECK(log.counts[0] == 500);
  CHECK_THROWS_AS(run(inst, SelectionPolicy::lowest_id, 7, 0), std::invalid_argument);
}

TEST_CASE("fair-coin event: mean resamples matches the geometric distribution") {
  const Instance inst = fair_coin_event();
  const DependencyGraph g = build_dependency_graph(inst);
  // mu = 1 certifies p = 1/2 <= mu/(1+mu) = 1/2
  const ConditionReport r = check_cluster_condition(inst, g, MuVector::uniform(1, 1.0));
  REQUIRE(r.satisfied);

  const int trials = 10000;
  std::vector<double> counts;
  counts.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    const ExecutionLog log = run(inst, SelectionPolicy::lowest_id, trial_seed(101, t), 100000);
    REQUIRE(log.terminated);
    counts.push_back(static_cast<double>(log.counts[0]));
  }
  const Summary s = summarize(counts);
  // geometric: E[N] = 1 exactly
  CHECK(std::abs(s.mean - 1.0) <= 3.0 * s.se);
  CHECK(s.mean <= 1.0 + 3.0 * s.se);
}

TEST_CASE("equal seeds give identical logs; different seeds diverge") {
  CounterRng rng(1);
  const CnfFormula f = random_ksat(12, 10, 3, 4, 77);
  const Instance inst = cnf_to_instance(f);
  for (const SelectionPolicy policy :
       {SelectionPolicy::lowest_id, SelectionPolicy::random_uniform,
        SelectionPolicy::most_recently_invalidated}) {
    const ExecutionLog a = run(inst, policy, 123, 100000);
    const ExecutionLog b = run(inst, policy, 123, 100000);
    CHECK(a.steps == b.steps);
    CHECK(a.counts == b.counts);
    CHECK(a.final_assignment.values == b.final_assignment.values);
    CHECK(a.terminated == b.terminated);
  }
  const ExecutionLog a = run(inst, SelectionPolicy::lowest_id, 123, 100000);
  const ExecutionLog c = run(inst, SelectionPolicy::lowest_id, 124, 100000);
  CHECK(a.steps != c.steps);
}

TEST_CASE("terminated runs leave no violated event, for every policy") {
  CounterRng rng(5150);
  for (int trial = 0; trial < 30; ++trial) {
    const CnfFormula f = random_ksat(10, 8, 3, 4, 1000 + static_cast<std::uint64_t>(trial));
    const Instance inst = cnf_to_instance(f);
    for (const SelectionPolicy policy :
         {SelectionPolicy::lowest_id, SelectionPolicy::random_uniform,
          SelectionPolicy::most_recently_invalidated}) {
      const ExecutionLog log = run(inst, policy, trial_seed(42, static_cast<std::uint64_t>(trial)), 200000);
      if (log.terminated) {
        CHECK(find_violated(inst, log.final_assignment).empty());
        CHECK(testutil::cnf_satisfied(f, log.final_assignment));
      }
      std::uint64_t total = 0;
      for (std::uint64_t c : log.counts) total += c;
      CHECK(total == log.steps.size());
      CHECK(log.steps_used == log.steps.size());
    }
  }
}

TEST_CASE("incremental violation tracking equals the full scan") {
  SUBCASE("empty instance") {
    Instance inst;
    inst.validate();
    Assignment a;
    CHECK(find_violated(inst, a).empty());
  }
  SUBCASE("random resampling steps") {
    CounterRng rng(60);
    int steps_checked = 0;
    for (int trial = 0; trial < 100 && steps_checked < 1000; ++trial) {
      const CnfFormula f = random_ksat(10, 10, 2, 3, 3000 + static_cast<std::uint64_t>(trial));
      const Instance inst = cnf_to_instance(f);
      const DependencyGraph g = build_dependency_graph(inst);
      CounterRng run_rng = rng.derive(static_cast<std::uint64_t>(trial));
      Assignment a = sample_assignment(inst, run_rng);
      std::vector<EventId> violated = find_violated(inst, a);
      for (int step = 0; step < 60 && !violated.empty(); ++step) {
        const EventId chosen = violated.front();
        resample(inst, inst.events[static_cast<std::size_t>(chosen)].vbl, a, run_rng);
        const std::vector<EventId> dirty = g.inclusive_neighbors(chosen);
        const std::vector<EventId> incremental = find_violated(inst, a, violated, dirty);
        CHECK(incremental == find_violated(inst, a));
        violated = incremental;
        ++steps_checked;
      }
    }
    CHECK(steps_checked > 200);
  }
}

TEST_CASE("policies pick within the violated set and alter the search order") {
  Instance inst;
  for (int v = 0; v < 2; ++v) inst.variables.push_back(VarSpec::uniform(v, 2));
  inst.events.push_back(Event::constant(0, {0}, true));
  inst.events.push_back(Event::constant(1, {1}, true));
  inst.validate();
  // with lowest-id, the always-violated pair resamples event 0 every time
  const ExecutionLog low = run(inst, SelectionPolicy::lowest_id, 3, 50);
  CHECK(low.counts[0] == 50);
  CHECK(low.counts[1] == 0);
  // random-uniform spreads the choices
  const ExecutionLog rnd = run(inst, SelectionPolicy::random_uniform, 3, 50);
  CHECK(rnd.counts[0] > 0);
  CHECK(rnd.counts[1] > 0);
}

TEST_CASE("default_max_steps keeps the floor and scales with total mu") {
  CHECK(default_max_steps(0.0) == 1'000'000);
  CHECK(default_max_steps(5.0) == 1'000'000);
  CHECK(default_max_steps(2e5) == 20'000'000);
}

TEST_CASE("run_trials is reproducible and thread count does not change results") {
  const Instance inst = fair_coin_event();
  const auto seq = run_trials(inst, SelectionPolicy::lowest_id, 5, 200, 1000, 1);
  const auto par = run_trials(inst, SelectionPolicy::lowest_id, 5, 200, 1000, 4);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].steps == par[i].steps);
    CHECK(seq[i].final_assignment.values == par[i].final_assignment.values);
  }
  const TrialStats stats = summarize_trials(inst, seq);
  CHECK(stats.trials == 200);
  CHECK(stats.nonterminated == 0);
}
