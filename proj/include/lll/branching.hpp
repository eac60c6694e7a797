#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lll/conditions.hpp"
#include "lll/graph.hpp"
#include "lll/rng.hpp"
#include "lll/witness.hpp"

namespace lll {

inline constexpr int kDefaultDepthCap = 64;
inline constexpr std::uint64_t kRejectionRoundGuard = 1'000'000'000ull;
inline constexpr std::size_t kTreeEnumerationCap = 1'000'000;

enum class BranchingKind { moser_tardos, independent_rejection };

inline const char* to_string(BranchingKind k) {
  return k == BranchingKind::moser_tardos ? "moser-tardos" : "independent-rejection";
}

struct BranchingOutcome {
  WitnessTree tree;  // meaningful only when !truncated
  bool truncated = false;
  int generations_used = 0;  // child-drawing rounds performed; equals the cap when truncated
  std::uint64_t rejection_rounds = 0;
};

namespace detail {

// A vertex set with adjacency restricted to it, as bit masks over positions.
struct SubsetSpace {
  std::vector<EventId> verts;
  std::vector<std::uint32_t> adj;
};

inline SubsetSpace make_subset_space(const DependencyGraph& g, std::span<const EventId> vertex_set,
                                     int cap) {
  if (static_cast<int>(vertex_set.size()) > cap)
    throw std::runtime_error("vertex set too large for exact subset enumeration (" +
                             std::to_string(vertex_set.size()) + " vertices, cap " +
                             std::to_string(cap) + ")");
  SubsetSpace s;
  s.verts.assign(vertex_set.begin(), vertex_set.end());
  const int k = static_cast<int>(s.verts.size());
  s.adj.assign(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j) {
      if (s.verts[static_cast<std::size_t>(i)] == s.verts[static_cast<std::size_t>(j)])
        throw std::invalid_argument("vertex_set contains duplicates");
      if (g.adjacent(s.verts[static_cast<std::size_t>(i)], s.verts[static_cast<std::size_t>(j)])) {
        s.adj[static_cast<std::size_t>(i)] |= std::uint32_t{1} << j;
        s.adj[static_cast<std::size_t>(j)] |= std::uint32_t{1} << i;
      }
    }
  return s;
}

inline bool mask_independent(std::uint32_t mask, const std::vector<std::uint32_t>& adj) {
  for (std::uint32_t m = mask; m != 0; m &= m - 1)
    if (adj[static_cast<std::size_t>(std::countr_zero(m))] & mask) return false;
  return true;
}

inline void enum_independent(std::uint32_t chosen, std::uint32_t banned, int next, int k,
                             const std::vector<std::uint32_t>& adj,
                             std::vector<std::uint32_t>& out) {
  if (next == k) {
    out.push_back(chosen);
    return;
  }
  enum_independent(chosen, banned, next + 1, k, adj, out);
  if (!(banned >> next & 1u))
    enum_independent(chosen | (std::uint32_t{1} << next), banned | adj[static_cast<std::size_t>(next)],
                     next + 1, k, adj, out);
}

// All independent subsets of the space, as masks sorted ascending.
inline std::vector<std::uint32_t> independent_masks(const SubsetSpace& s) {
  std::vector<std::uint32_t> out;
  enum_independent(0, 0, 0, static_cast<int>(s.verts.size()), s.adj, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<EventId> mask_to_events(std::uint32_t mask, const SubsetSpace& s) {
  std::vector<EventId> out;
  for (std::uint32_t m = mask; m != 0; m &= m - 1)
    out.push_back(s.verts[static_cast<std::size_t>(std::countr_zero(m))]);
  std::sort(out.begin(), out.end());
  return out;
}

inline void check_probabilities(std::span<const double> x, std::size_t n) {
  if (x.size() != n) throw std::invalid_argument("x vector has wrong length");
  for (double v : x)
    if (!(v >= 0.0) || !(v < 1.0))
      throw std::invalid_argument("x values must lie in [0, 1)");
}

}  // namespace detail

// One Bernoulli(x) coin per vertex of vertex_set, redrawn from scratch until
// the selected labels form an independent set. cumulative_rejections, when
// given, accumulates restarts across calls and trips a guard against
// near-critical x.
inline std::vector<EventId> rejection_child_set(const DependencyGraph& g,
                                                std::span<const EventId> vertex_set,
                                                std::span<const double> x, CounterRng& rng,
                                                std::uint64_t* cumulative_rejections = nullptr) {
  detail::check_probabilities(x, static_cast<std::size_t>(g.size()));
  const detail::SubsetSpace s = detail::make_subset_space(g, vertex_set, 32);
  const int k = static_cast<int>(s.verts.size());
  for (;;) {
    std::uint32_t mask = 0;
    for (int i = 0; i < k; ++i)
      if (rng.bernoulli(x[static_cast<std::size_t>(s.verts[static_cast<std::size_t>(i)])]))
        mask |= std::uint32_t{1} << i;
    if (detail::mask_independent(mask, s.adj)) return detail::mask_to_events(mask, s);
    if (cumulative_rejections != nullptr && ++*cumulative_rejections > kRejectionRoundGuard)
      throw std::runtime_error("rejection subprocess exceeded " +
                               std::to_string(kRejectionRoundGuard) +
                               " restarts; x values are too close to 1");
  }
}

// Direct draw of an independent subset I of vertex_set with probability
// proportional to w(I) = prod_{u in I} x_u * prod_{u not in I} (1 - x_u).
inline std::vector<EventId> weighted_independent_set_sample(const DependencyGraph& g,
                                                            std::span<const EventId> vertex_set,
                                                            std::span<const double> x,
                                                            CounterRng& rng,
                                                            int cap = kIndependencePolynomialCap) {
  detail::check_probabilities(x, static_cast<std::size_t>(g.size()));
  const detail::SubsetSpace s = detail::make_subset_space(g, vertex_set, cap);
  const std::vector<std::uint32_t> masks = detail::independent_masks(s);
  std::vector<double> weights(masks.size());
  double total = 0.0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < s.verts.size(); ++j) {
      const double xv = x[static_cast<std::size_t>(s.verts[j])];
      w *= (masks[i] >> j & 1u) ? xv : 1.0 - xv;
    }
    weights[i] = w;
    total += w;
  }
  const double u = rng.next_double() * total;
  double acc = 0.0;
  std::size_t pick = masks.size() - 1;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    acc += weights[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  return detail::mask_to_events(masks[pick], s);
}

namespace detail {

template <typename ChildDraw>
BranchingOutcome grow_tree(const DependencyGraph& g, EventId root, int depth_cap,
                           ChildDraw&& draw_children) {
  if (depth_cap < 1) throw std::invalid_argument("depth_cap must be >= 1");
  if (root < 0 || root >= g.size())
    throw std::invalid_argument("unknown event id " + std::to_string(root));
  BranchingOutcome out;
  out.tree.nodes.push_back({root, -1, 0});
  std::vector<int> frontier{0};
  while (!frontier.empty()) {
    if (out.generations_used == depth_cap) {
      out.truncated = true;
      return out;
    }
    std::vector<int> next;
    for (int v : frontier) {
      const EventId label = out.tree.nodes[static_cast<std::size_t>(v)].label;
      for (EventId b : draw_children(label, out)) {
        next.push_back(static_cast<int>(out.tree.nodes.size()));
        out.tree.nodes.push_back({b, v, out.tree.nodes[static_cast<std::size_t>(v)].depth + 1});
      }
    }
    ++out.generations_used;
    frontier = std::move(next);
  }
  return out;
}

}  // namespace detail

// Galton-Watson style growth: each node labeled A gains, for each event B in
// the inclusive neighborhood of A, an independent child labeled B with
// probability x_B. Stops when a generation is empty or depth_cap rounds have
// been drawn.
inline BranchingOutcome simulate_mt_branching(const DependencyGraph& g, std::span<const double> x,
                                              EventId root, int depth_cap, CounterRng& rng) {
  detail::check_probabilities(x, static_cast<std::size_t>(g.size()));
  return detail::grow_tree(g, root, depth_cap, [&](EventId label, BranchingOutcome&) {
    std::vector<EventId> children;
    for (EventId b : g.inclusive_neighbors(label))
      if (rng.bernoulli(x[static_cast<std::size_t>(b)])) children.push_back(b);
    return children;
  });
}

// Same growth with x_A = mu_A / (mu_A + 1), except each node's child draw is
// restarted until the drawn label set is independent, so every sibling set
// is an independent set.
inline BranchingOutcome simulate_improved_branching(const DependencyGraph& g, const MuVector& mu,
                                                    EventId root, int depth_cap, CounterRng& rng) {
  mu.validate(static_cast<std::size_t>(g.size()));
  std::vector<double> x(mu.values.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = mu.values[i] / (mu.values[i] + 1.0);
  return detail::grow_tree(g, root, depth_cap, [&](EventId label, BranchingOutcome& out) {
    return rejection_child_set(g, g.inclusive_neighbors(label), x, rng, &out.rejection_rounds);
  });
}

// p_T = (1-x_root)/x_root * prod over nodes v of [ x_{A_v} * prod_{B ~ A_v} (1-x_B) ].
inline double closed_form_p_T(const WitnessTree& t, const DependencyGraph& g, const XVector& x) {
  x.validate(static_cast<std::size_t>(g.size()));
  if (!is_proper(t, g))
    throw std::invalid_argument("closed_form_p_T requires a proper witness tree");
  std::vector<double> factor(static_cast<std::size_t>(g.size()), -1.0);
  auto node_factor = [&](EventId e) {
    double& f = factor[static_cast<std::size_t>(e)];
    if (f < 0.0) {
      f = x.values[static_cast<std::size_t>(e)];
      for (EventId b : g.neighbors(e)) f *= 1.0 - x.values[static_cast<std::size_t>(b)];
    }
    return f;
  };
  const EventId root = t.nodes.front().label;
  double p = (1.0 - x.values[static_cast<std::size_t>(root)]) / x.values[static_cast<std::size_t>(root)];
  for (const auto& n : t.nodes) p *= node_factor(n.label);
  return p;
}

// p'_T = mu_root^{-1} * prod over nodes v of [ mu_{A_v} / Z(inclusive neighborhood of A_v) ].
inline double closed_form_p_T_prime(const WitnessTree& t, const DependencyGraph& g,
                                    const MuVector& mu, int cap = kIndependencePolynomialCap) {
  mu.validate(static_cast<std::size_t>(g.size()));
  if (!is_strongly_proper(t, g))
    throw std::invalid_argument("closed_form_p_T_prime requires a strongly proper witness tree");
  std::vector<double> factor(static_cast<std::size_t>(g.size()), -1.0);
  auto node_factor = [&](EventId e) {
    double& f = factor[static_cast<std::size_t>(e)];
    if (f < 0.0) {
      const std::vector<EventId> nbhd = g.inclusive_neighbors(e);
      f = mu.values[static_cast<std::size_t>(e)] / independence_polynomial_sum(g, nbhd, mu, cap);
    }
    return f;
  };
  double p = 1.0 / mu.values[static_cast<std::size_t>(t.nodes.front().label)];
  for (const auto& n : t.nodes) p *= node_factor(n.label);
  return p;
}

// Exhaustive enumeration of strongly proper witness trees with the given
// root label and at most max_nodes nodes, generated generation by
// generation: each frontier node receives an independent subset of its
// label's inclusive neighborhood as children. Duplicate-free by
// construction; order is deterministic.
inline std::vector<WitnessTree> enumerate_strongly_proper_trees(
    const DependencyGraph& g, EventId root, int max_nodes,
    std::size_t result_cap = kTreeEnumerationCap, int cap = kIndependencePolynomialCap) {
  if (max_nodes < 1) throw std::invalid_argument("max_nodes must be >= 1");
  if (root < 0 || root >= g.size())
    throw std::invalid_argument("unknown event id " + std::to_string(root));

  std::vector<std::vector<std::vector<EventId>>> options(static_cast<std::size_t>(g.size()));
  std::vector<bool> ready(static_cast<std::size_t>(g.size()), false);
  auto child_options = [&](EventId e) -> const std::vector<std::vector<EventId>>& {
    if (!ready[static_cast<std::size_t>(e)]) {
      const std::vector<EventId> nbhd = g.inclusive_neighbors(e);
      const detail::SubsetSpace s = detail::make_subset_space(g, nbhd, cap);
      for (std::uint32_t mask : detail::independent_masks(s))
        options[static_cast<std::size_t>(e)].push_back(detail::mask_to_events(mask, s));
      ready[static_cast<std::size_t>(e)] = true;
    }
    return options[static_cast<std::size_t>(e)];
  };

  std::vector<WitnessTree> out;
  WitnessTree t;
  t.nodes.push_back({root, -1, 0});

  std::function<void(const std::vector<int>&)> grow = [&](const std::vector<int>& frontier) {
    std::vector<int> next;
    std::function<void(std::size_t)> assign = [&](std::size_t idx) {
      if (idx == frontier.size()) {
        if (next.empty()) {
          if (out.size() >= result_cap)
            throw std::runtime_error("strongly proper tree enumeration exceeded result cap of " +
                                     std::to_string(result_cap));
          out.push_back(t);
        } else {
          grow(next);
        }
        return;
      }
      const int v = frontier[idx];
      for (const auto& childset : child_options(t.nodes[static_cast<std::size_t>(v)].label)) {
        if (t.nodes.size() + childset.size() > static_cast<std::size_t>(max_nodes)) continue;
        const std::size_t base = t.nodes.size();
        for (EventId b : childset) {
          next.push_back(static_cast<int>(t.nodes.size()));
          t.nodes.push_back({b, v, t.nodes[static_cast<std::size_t>(v)].depth + 1});
        }
        assign(idx + 1);
        t.nodes.resize(base);
        next.resize(next.size() - childset.size());
      }
    };
    assign(0);
  };
  grow({0});
  return out;
}

struct TreeTally {
  std::map<std::string, std::uint64_t> counts;  // canonical encoding -> completed-tree tally
  std::uint64_t truncated = 0;
  std::uint64_t trials = 0;
  std::uint64_t rejection_rounds = 0;

  double frequency(const std::string& encoding) const {
    const auto it = counts.find(encoding);
    return it == counts.end() ? 0.0
                              : static_cast<double>(it->second) / static_cast<double>(trials);
  }
};

// Repeated simulation with one derived stream per trial. Truncated outcomes
// are counted separately and contribute no tree. For moser_tardos, values
// are the per-event x; for independent_rejection, the per-event mu.
inline TreeTally monte_carlo_tree_tally(const DependencyGraph& g, BranchingKind kind,
                                        std::span<const double> values, EventId root,
                                        std::uint64_t trials, int depth_cap, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  TreeTally tally;
  tally.trials = trials;
  const CounterRng base(seed);
  MuVector mu;
  if (kind == BranchingKind::independent_rejection)
    mu.values.assign(values.begin(), values.end());
  for (std::uint64_t i = 0; i < trials; ++i) {
    CounterRng rng = base.derive(i);
    BranchingOutcome o = kind == BranchingKind::moser_tardos
                             ? simulate_mt_branching(g, values, root, depth_cap, rng)
                             : simulate_improved_branching(g, mu, root, depth_cap, rng);
    tally.rejection_rounds += o.rejection_rounds;
    if (o.truncated)
      ++tally.truncated;
    else
      ++tally.counts[canonical_encoding(o.tree)];
  }
  return tally;
}

}  // namespace lll
