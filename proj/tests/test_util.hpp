#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lll/lll.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
#ifdef LLL_DATA_DIR
  return std::string(LLL_DATA_DIR) + "/" + name;
#else
  return "data/" + name;
#endif
}

// --- fixed dependency graphs ------------------------------------------------

inline lll::DependencyGraph single_vertex() {
  return lll::DependencyGraph::from_edges(1, {});
}

inline lll::DependencyGraph single_edge() {
  const std::vector<std::pair<lll::EventId, lll::EventId>> e{{0, 1}};
  return lll::DependencyGraph::from_edges(2, e);
}

inline lll::DependencyGraph path3() {
  const std::vector<std::pair<lll::EventId, lll::EventId>> e{{0, 1}, {1, 2}};
  return lll::DependencyGraph::from_edges(3, e);
}

inline lll::DependencyGraph triangle() {
  const std::vector<std::pair<lll::EventId, lll::EventId>> e{{0, 1}, {1, 2}, {0, 2}};
  return lll::DependencyGraph::from_edges(3, e);
}

inline lll::DependencyGraph cycle5() {
  const std::vector<std::pair<lll::EventId, lll::EventId>> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}};
  return lll::DependencyGraph::from_edges(5, e);
}

inline lll::DependencyGraph random_graph(int n, double edge_prob, lll::CounterRng& rng) {
  std::vector<std::pair<lll::EventId, lll::EventId>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(edge_prob)) edges.emplace_back(i, j);
  return lll::DependencyGraph::from_edges(n, edges);
}

// --- independent oracles ----------------------------------------------------

// Z by full 2^|S| subset enumeration with a pairwise independence check.
inline double naive_independence_poly(const lll::DependencyGraph& g,
                                      const std::vector<lll::EventId>& set,
                                      const lll::MuVector& mu) {
  const std::size_t k = set.size();
  double z = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    bool independent = true;
    double prod = 1.0;
    for (std::size_t i = 0; i < k && independent; ++i) {
      if (!(mask >> i & 1u)) continue;
      prod *= mu.values[static_cast<std::size_t>(set[i])];
      for (std::size_t j = i + 1; j < k && independent; ++j)
        if ((mask >> j & 1u) && g.adjacent(set[i], set[j])) independent = false;
    }
    if (independent) z += prod;
  }
  return z;
}

// Sum over ALL subsets of the product of mu (no independence restriction).
inline double naive_all_subset_sum(const std::vector<lll::EventId>& set,
                                   const lll::MuVector& mu) {
  const std::size_t k = set.size();
  double z = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    double prod = 1.0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1u) prod *= mu.values[static_cast<std::size_t>(set[i])];
    z += prod;
  }
  return z;
}

// Pairwise support-intersection edges, straight from the definition.
inline std::set<std::pair<int, int>> brute_force_edges(const lll::Instance& inst) {
  std::set<std::pair<int, int>> edges;
  for (std::size_t a = 0; a < inst.events.size(); ++a)
    for (std::size_t b = a + 1; b < inst.events.size(); ++b) {
      bool share = false;
      for (lll::VarId u : inst.events[a].vbl)
        for (lll::VarId v : inst.events[b].vbl)
          if (u == v) share = true;
      if (share) edges.insert({static_cast<int>(a), static_cast<int>(b)});
    }
  return edges;
}

// Direct CNF evaluation, independent of the Event predicate machinery.
inline bool cnf_satisfied(const lll::CnfFormula& f, const lll::Assignment& a) {
  for (const auto& clause : f.clauses) {
    bool sat = false;
    for (int lit : clause) {
      const bool val = a.values[static_cast<std::size_t>(std::abs(lit) - 1)] != 0;
      if (val == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

// --- random instances for property tests ------------------------------------

// Random discrete instance whose events are truth tables over small supports,
// so exact probabilities stay enumerable.
inline lll::Instance random_instance(lll::CounterRng& rng, int max_vars = 8, int max_events = 6) {
  lll::Instance inst;
  const int n_vars = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_vars)));
  for (int v = 0; v < n_vars; ++v) {
    const int dom = 2 + static_cast<int>(rng.next_below(2));
    lll::VarSpec var;
    var.id = v;
    var.domain_size = dom;
    double sum = 0.0;
    for (int d = 0; d < dom; ++d) {
      const double w = 0.1 + rng.next_double();
      var.weights.push_back(w);
      sum += w;
    }
    for (double& w : var.weights) w /= sum;
    // renormalize exactly enough for the 1e-12 invariant
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < var.weights.size(); ++i) acc += var.weights[i];
    var.weights.back() = 1.0 - acc;
    inst.variables.push_back(var);
  }
  const int n_events = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_events)));
  for (int e = 0; e < n_events; ++e) {
    const int support = 1 + static_cast<int>(rng.next_below(std::min(3, n_vars)));
    std::vector<lll::VarId> vbl;
    while (static_cast<int>(vbl.size()) < support) {
      const lll::VarId v = static_cast<lll::VarId>(rng.next_below(static_cast<std::uint64_t>(n_vars)));
      if (std::find(vbl.begin(), vbl.end(), v) == vbl.end()) vbl.push_back(v);
    }
    std::size_t combos = 1;
    for (lll::VarId v : vbl) combos *= static_cast<std::size_t>(inst.variables[static_cast<std::size_t>(v)].domain_size);
    std::vector<bool> table(combos);
    for (std::size_t i = 0; i < combos; ++i) table[i] = rng.bernoulli(0.3);
    std::vector<int> radices;
    for (lll::VarId v : vbl) radices.push_back(inst.variables[static_cast<std::size_t>(v)].domain_size);
    lll::Event ev;
    ev.id = e;
    ev.vbl = vbl;
    ev.violated = [table, radices](std::span<const int> vals) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < vals.size(); ++i)
        idx = idx * static_cast<std::size_t>(radices[i]) + static_cast<std::size_t>(vals[i]);
      return static_cast<bool>(table[idx]);
    };
    inst.events.push_back(std::move(ev));
  }
  inst.validate();
  return inst;
}

}  // namespace testutil
