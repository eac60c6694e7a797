#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lll/engine.hpp"
#include "lll/graph.hpp"
#include "lll/model.hpp"

namespace lll {

// Rooted tree with event labels. Node 0 is the root; node ids follow
// creation order, so a larger id means a later addition. parent depth is
// always child depth - 1.
struct WitnessTree {
  struct Node {
    EventId label = -1;
    int parent = -1;
    int depth = 0;
  };
  std::vector<Node> nodes;
};

inline std::vector<std::vector<int>> children_lists(const WitnessTree& t) {
  std::vector<std::vector<int>> ch(t.nodes.size());
  for (int v = 1; v < static_cast<int>(t.nodes.size()); ++v)
    ch[static_cast<std::size_t>(t.nodes[static_cast<std::size_t>(v)].parent)].push_back(v);
  return ch;
}

// Witness tree for step t (1-based) of the log. The root carries the step-t
// event; steps t-1..1 are scanned in reverse, and each event that shares a
// variable with a current label (itself included) is attached under the
// deepest such node, breaking depth ties toward the most recently added
// node. Non-overlapping events are skipped.
inline WitnessTree build_witness_tree(const ExecutionLog& log, std::size_t t,
                                      const Instance& inst) {
  if (t < 1 || t > log.steps.size())
    throw std::invalid_argument("step index " + std::to_string(t) + " out of range 1.." +
                                std::to_string(log.steps.size()));
  std::vector<std::vector<VarId>> support(static_cast<std::size_t>(inst.num_events()));
  auto sorted_vbl = [&](EventId e) -> const std::vector<VarId>& {
    auto& s = support[static_cast<std::size_t>(e)];
    if (s.empty()) {
      s = inst.events[static_cast<std::size_t>(e)].vbl;
      std::sort(s.begin(), s.end());
    }
    return s;
  };
  auto overlap = [&](EventId a, EventId b) {
    if (a == b) return true;
    const auto& x = sorted_vbl(a);
    const auto& y = sorted_vbl(b);
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
      if (x[i] == y[j]) return true;
      if (x[i] < y[j])
        ++i;
      else
        ++j;
    }
    return false;
  };

  WitnessTree tree;
  tree.nodes.push_back({log.steps[t - 1], -1, 0});
  for (std::size_t i = t - 1; i >= 1; --i) {
    const EventId ev = log.steps[i - 1];
    int best = -1, best_depth = -1;
    for (int v = 0; v < static_cast<int>(tree.nodes.size()); ++v) {
      const auto& node = tree.nodes[static_cast<std::size_t>(v)];
      if (node.depth >= best_depth && overlap(ev, node.label)) {
        best = v;
        best_depth = node.depth;
      }
    }
    if (best >= 0)
      tree.nodes.push_back({ev, best, best_depth + 1});
  }
  return tree;
}

// Every child overlaps its parent and siblings carry pairwise distinct
// labels.
inline bool is_proper(const WitnessTree& t, const DependencyGraph& g) {
  if (t.nodes.empty()) return false;
  const auto ch = children_lists(t);
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    std::vector<EventId> labels;
    labels.reserve(ch[v].size());
    for (int c : ch[v]) {
      if (!g.overlaps(t.nodes[v].label, t.nodes[static_cast<std::size_t>(c)].label)) return false;
      labels.push_back(t.nodes[static_cast<std::size_t>(c)].label);
    }
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) return false;
  }
  return true;
}

// Proper, and every sibling label set is an independent set in the
// dependency graph.
inline bool is_strongly_proper(const WitnessTree& t, const DependencyGraph& g) {
  if (!is_proper(t, g)) return false;
  const auto ch = children_lists(t);
  for (std::size_t v = 0; v < t.nodes.size(); ++v)
    for (std::size_t i = 0; i < ch[v].size(); ++i)
      for (std::size_t j = i + 1; j < ch[v].size(); ++j)
        if (g.adjacent(t.nodes[static_cast<std::size_t>(ch[v][i])].label,
                       t.nodes[static_cast<std::size_t>(ch[v][j])].label))
          return false;
  return true;
}

// Product over nodes of the exact violation probability of the node's label.
inline double tree_probability_product(const WitnessTree& t, const Instance& inst,
                                       std::uint64_t enum_cap = kProbabilityEnumCap) {
  std::map<EventId, double> cache;
  double prod = 1.0;
  for (const auto& n : t.nodes) {
    auto it = cache.find(n.label);
    if (it == cache.end())
      it = cache.emplace(n.label, event_probability(inst, n.label, enum_cap)).first;
    prod *= it->second;
  }
  return prod;
}

// Stable text form: "<label>" for a leaf, "<label>(c1,c2,...)" otherwise,
// child encodings sorted by (label, encoding). Two trees are equal as
// labeled rooted trees with unordered children iff their encodings match.
inline std::string canonical_encoding(const WitnessTree& t) {
  if (t.nodes.empty()) return {};
  const auto ch = children_lists(t);
  std::function<std::string(int)> enc = [&](int v) -> std::string {
    std::string s = std::to_string(t.nodes[static_cast<std::size_t>(v)].label);
    if (ch[static_cast<std::size_t>(v)].empty()) return s;
    std::vector<std::pair<EventId, std::string>> parts;
    parts.reserve(ch[static_cast<std::size_t>(v)].size());
    for (int c : ch[static_cast<std::size_t>(v)])
      parts.emplace_back(t.nodes[static_cast<std::size_t>(c)].label, enc(c));
    std::sort(parts.begin(), parts.end());
    s += '(';
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += ',';
      s += parts[i].second;
    }
    s += ')';
    return s;
  };
  return enc(0);
}

}  // namespace lll
