#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lll/model.hpp"

namespace lll {

// Event adjacency induced by shared variable support: A ~ B iff A != B and
// vbl(A) intersects vbl(B). Symmetric and irreflexive; immutable once built.
class DependencyGraph {
 public:
  DependencyGraph() = default;

  static DependencyGraph from_instance(const Instance& inst) {
    DependencyGraph g;
    g.adj_.assign(static_cast<std::size_t>(inst.num_events()), {});
    std::vector<std::vector<EventId>> by_var(static_cast<std::size_t>(inst.num_variables()));
    for (const Event& e : inst.events)
      for (VarId v : e.vbl) by_var[static_cast<std::size_t>(v)].push_back(e.id);
    for (const auto& evs : by_var)
      for (std::size_t i = 0; i < evs.size(); ++i)
        for (std::size_t j = i + 1; j < evs.size(); ++j) {
          g.adj_[static_cast<std::size_t>(evs[i])].push_back(evs[j]);
          g.adj_[static_cast<std::size_t>(evs[j])].push_back(evs[i]);
        }
    g.dedupe();
    return g;
  }

  static DependencyGraph from_edges(int n, std::span<const std::pair<EventId, EventId>> edges) {
    if (n < 0) throw std::invalid_argument("vertex count must be nonnegative");
    DependencyGraph g;
    g.adj_.assign(static_cast<std::size_t>(n), {});
    for (const auto& [a, b] : edges) {
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw std::invalid_argument("edge endpoint out of range");
      if (a == b) throw std::invalid_argument("self loops are not allowed");
      g.adj_[static_cast<std::size_t>(a)].push_back(b);
      g.adj_[static_cast<std::size_t>(b)].push_back(a);
    }
    g.dedupe();
    return g;
  }

  int size() const { return static_cast<int>(adj_.size()); }

  // Open neighborhood, sorted ascending.
  std::span<const EventId> neighbors(EventId a) const {
    check(a);
    return adj_[static_cast<std::size_t>(a)];
  }

  // Inclusive neighborhood (the event plus its neighbors), sorted ascending.
  std::vector<EventId> inclusive_neighbors(EventId a) const {
    check(a);
    std::vector<EventId> out = adj_[static_cast<std::size_t>(a)];
    out.insert(std::lower_bound(out.begin(), out.end(), a), a);
    return out;
  }

  bool adjacent(EventId a, EventId b) const {
    check(a);
    check(b);
    const auto& nbrs = adj_[static_cast<std::size_t>(a)];
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
  }

  // Shared-variable overlap; unlike adjacency, every event overlaps itself.
  bool overlaps(EventId a, EventId b) const { return a == b || adjacent(a, b); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& nbrs : adj_) twice += nbrs.size();
    return twice / 2;
  }

  int max_degree() const {
    std::size_t d = 0;
    for (const auto& nbrs : adj_) d = std::max(d, nbrs.size());
    return static_cast<int>(d);
  }

 private:
  void check(EventId a) const {
    if (a < 0 || a >= size())
      throw std::invalid_argument("unknown event id " + std::to_string(a));
  }

  void dedupe() {
    for (auto& nbrs : adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
  }

  std::vector<std::vector<EventId>> adj_;
};

inline DependencyGraph build_dependency_graph(const Instance& inst) {
  return DependencyGraph::from_instance(inst);
}

}  // namespace lll
