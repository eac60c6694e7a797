#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "lll/graph.hpp"
#include "lll/model.hpp"

namespace lll {

enum class SelectionPolicy { lowest_id, random_uniform, most_recently_invalidated };

inline const char* to_string(SelectionPolicy p) {
  switch (p) {
    case SelectionPolicy::lowest_id: return "lowest-id";
    case SelectionPolicy::random_uniform: return "random-uniform";
    case SelectionPolicy::most_recently_invalidated: return "most-recently-invalidated";
  }
  return "?";
}

inline SelectionPolicy parse_policy(std::string_view s) {
  if (s == "lowest-id") return SelectionPolicy::lowest_id;
  if (s == "random-uniform") return SelectionPolicy::random_uniform;
  if (s == "most-recently-invalidated") return SelectionPolicy::most_recently_invalidated;
  throw std::invalid_argument("unknown policy '" + std::string(s) +
                              "' (expected lowest-id, random-uniform, most-recently-invalidated)");
}

// One run of the resampling engine: the ordered step log, per-event resample
// tallies, and the final assignment.
struct ExecutionLog {
  std::vector<EventId> steps;
  std::vector<std::uint64_t> counts;
  Assignment final_assignment;
  bool terminated = false;
  std::uint64_t steps_used = 0;
};

inline std::uint64_t default_max_steps(double total_mu) {
  const double scaled = 100.0 * std::ceil(std::max(0.0, total_mu));
  if (!(scaled < 9e18)) return std::uint64_t{9'000'000'000'000'000'000ull};
  return std::max<std::uint64_t>(1'000'000, static_cast<std::uint64_t>(scaled));
}

// Full scan; returns violated event ids sorted ascending.
inline std::vector<EventId> find_violated(const Instance& inst, const Assignment& a) {
  std::vector<EventId> out;
  for (int e = 0; e < inst.num_events(); ++e)
    if (is_violated(inst, a, e)) out.push_back(e);
  return out;
}

// Incremental recheck. dirty must contain every event whose support
// intersects a variable changed since prev_violated was computed; both
// inputs sorted ascending. Only prev_violated and dirty events are
// re-evaluated.
inline std::vector<EventId> find_violated(const Instance& inst, const Assignment& a,
                                          std::span<const EventId> prev_violated,
                                          std::span<const EventId> dirty) {
  std::vector<EventId> candidates;
  candidates.reserve(prev_violated.size() + dirty.size());
  std::set_union(prev_violated.begin(), prev_violated.end(), dirty.begin(), dirty.end(),
                 std::back_inserter(candidates));
  std::vector<EventId> out;
  for (EventId e : candidates)
    if (is_violated(inst, a, e)) out.push_back(e);
  return out;
}

// Resampling loop: sample everything, then repeatedly pick a violated event
// per policy and redraw exactly its support, until no event is violated or
// max_steps is exhausted (reported in-band via terminated=false). Identical
// (instance, policy, seed, max_steps) produce identical logs.
inline ExecutionLog run(const Instance& inst, SelectionPolicy policy, std::uint64_t seed,
                        std::uint64_t max_steps) {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  const DependencyGraph g = build_dependency_graph(inst);
  CounterRng rng(seed);
  ExecutionLog log;
  log.counts.assign(static_cast<std::size_t>(inst.num_events()), 0);
  Assignment a = sample_assignment(inst, rng);
  std::vector<EventId> violated = find_violated(inst, a);
  std::vector<std::uint64_t> invalidated_at(static_cast<std::size_t>(inst.num_events()), 0);

  while (!violated.empty() && log.steps_used < max_steps) {
    EventId chosen = violated.front();
    switch (policy) {
      case SelectionPolicy::lowest_id:
        break;
      case SelectionPolicy::random_uniform:
        chosen = violated[rng.next_below(violated.size())];
        break;
      case SelectionPolicy::most_recently_invalidated: {
        std::uint64_t best = invalidated_at[static_cast<std::size_t>(chosen)];
        for (EventId e : violated)
          if (invalidated_at[static_cast<std::size_t>(e)] > best) {
            best = invalidated_at[static_cast<std::size_t>(e)];
            chosen = e;
          }
        break;
      }
    }

    resample(inst, inst.events[static_cast<std::size_t>(chosen)].vbl, a, rng);
    log.steps.push_back(chosen);
    ++log.counts[static_cast<std::size_t>(chosen)];
    ++log.steps_used;

    const std::vector<EventId> dirty = g.inclusive_neighbors(chosen);
    std::vector<EventId> next = find_violated(inst, a, violated, dirty);
    for (EventId e : next)
      if (!std::binary_search(violated.begin(), violated.end(), e))
        invalidated_at[static_cast<std::size_t>(e)] = log.steps_used;
    violated = std::move(next);
  }

  log.terminated = violated.empty();
  log.final_assignment = std::move(a);
  return log;
}

// Per-trial seed derivation for independent repeated runs.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) {
  return CounterRng::mix64(base_seed, trial);
}

// Repeated seeded runs; trials are independent and may execute on several
// threads. Results are stored by trial index, so output does not depend on
// scheduling.
inline std::vector<ExecutionLog> run_trials(const Instance& inst, SelectionPolicy policy,
                                            std::uint64_t base_seed, std::uint64_t trials,
                                            std::uint64_t max_steps, unsigned threads = 1) {
  std::vector<ExecutionLog> logs(trials);
  if (threads <= 1) {
    for (std::uint64_t t = 0; t < trials; ++t)
      logs[t] = run(inst, policy, trial_seed(base_seed, t), max_steps);
    return logs;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t t = next.fetch_add(1);
        if (t >= trials) break;
        logs[t] = run(inst, policy, trial_seed(base_seed, t), max_steps);
      }
    });
  for (auto& th : pool) th.join();
  return logs;
}

struct TrialStats {
  std::uint64_t trials = 0;
  std::uint64_t nonterminated = 0;
  std::vector<double> mean_resamples;
  std::vector<double> se_resamples;
  std::vector<std::uint64_t> max_resamples;
  double mean_total_steps = 0.0;
  double se_total_steps = 0.0;
};

inline TrialStats summarize_trials(const Instance& inst, std::span<const ExecutionLog> logs) {
  TrialStats s;
  s.trials = logs.size();
  const std::size_t n = static_cast<std::size_t>(inst.num_events());
  s.mean_resamples.assign(n, 0.0);
  s.se_resamples.assign(n, 0.0);
  s.max_resamples.assign(n, 0);
  if (logs.empty()) return s;

  std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
  double tot = 0.0, tot_sq = 0.0;
  for (const ExecutionLog& log : logs) {
    if (!log.terminated) ++s.nonterminated;
    for (std::size_t e = 0; e < n; ++e) {
      const double c = static_cast<double>(log.counts[e]);
      sum[e] += c;
      sum_sq[e] += c * c;
      s.max_resamples[e] = std::max(s.max_resamples[e], log.counts[e]);
    }
    const double steps = static_cast<double>(log.steps_used);
    tot += steps;
    tot_sq += steps * steps;
  }
  const double m = static_cast<double>(logs.size());
  for (std::size_t e = 0; e < n; ++e) {
    s.mean_resamples[e] = sum[e] / m;
    if (logs.size() > 1) {
      const double var = std::max(0.0, (sum_sq[e] - sum[e] * sum[e] / m) / (m - 1.0));
      s.se_resamples[e] = std::sqrt(var / m);
    }
  }
  s.mean_total_steps = tot / m;
  if (logs.size() > 1) {
    const double var = std::max(0.0, (tot_sq - tot * tot / m) / (m - 1.0));
    s.se_total_steps = std::sqrt(var / m);
  }
  return s;
}

}  // namespace lll
