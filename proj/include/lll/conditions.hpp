#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lll/graph.hpp"

namespace lll {

// Exact independence-polynomial evaluation is exponential in the worst case;
// refuse vertex sets larger than this.
inline constexpr int kIndependencePolynomialCap = 25;

// Relative slack tolerance for condition verdicts.
inline constexpr double kConditionTolerance = 1e-12;

// Per-event weights mu_A in (0, inf) for the cluster-expansion condition.
struct MuVector {
  std::vector<double> values;

  static MuVector uniform(std::size_t n, double mu) { return {std::vector<double>(n, mu)}; }

  void validate(std::size_t n) const {
    if (values.size() != n) throw std::invalid_argument("mu vector has wrong length");
    for (double m : values)
      if (!(m > 0.0) || !std::isfinite(m))
        throw std::invalid_argument("mu values must lie in (0, inf)");
  }
};

// Per-event weights x_A in (0, 1) for the classical condition.
struct XVector {
  std::vector<double> values;

  static XVector uniform(std::size_t n, double x) { return {std::vector<double>(n, x)}; }

  void validate(std::size_t n) const {
    if (values.size() != n) throw std::invalid_argument("x vector has wrong length");
    for (double x : values)
      if (!(x > 0.0) || !(x < 1.0))
        throw std::invalid_argument("x values must lie in (0, 1)");
  }
};

// mu = x / (1 - x) and x = mu / (mu + 1) are mutually inverse bijections
// between (0,1) and (0,inf).
inline MuVector mu_from_x(const XVector& x) {
  MuVector mu;
  mu.values.reserve(x.values.size());
  for (double v : x.values) mu.values.push_back(v / (1.0 - v));
  return mu;
}

inline XVector x_from_mu(const MuVector& mu) {
  XVector x;
  x.values.reserve(mu.values.size());
  for (double v : mu.values) x.values.push_back(v / (v + 1.0));
  return x;
}

namespace detail {

// Z over the vertices still in `mask`: include/exclude on the lowest bit,
// with a product shortcut when that vertex has no neighbor left in the mask.
inline double z_recurse(std::uint32_t mask, const std::vector<double>& mu,
                        const std::vector<std::uint32_t>& adj) {
  double prefix = 1.0;
  while (mask != 0) {
    const int i = std::countr_zero(mask);
    const std::uint32_t rest = mask ^ (std::uint32_t{1} << i);
    if ((adj[static_cast<std::size_t>(i)] & mask) == 0) {
      prefix *= 1.0 + mu[static_cast<std::size_t>(i)];
      mask = rest;
      continue;
    }
    return prefix * (z_recurse(rest, mu, adj) +
                     mu[static_cast<std::size_t>(i)] *
                         z_recurse(rest & ~adj[static_cast<std::size_t>(i)], mu, adj));
  }
  return prefix;
}

}  // namespace detail

// Sum over independent subsets I of vertex_set (in the induced subgraph) of
// the product of mu over I; the empty set contributes 1.
inline double independence_polynomial_sum(const DependencyGraph& g,
                                          std::span<const EventId> vertex_set,
                                          const MuVector& mu,
                                          int cap = kIndependencePolynomialCap) {
  if (static_cast<int>(vertex_set.size()) > cap)
    throw std::runtime_error("neighborhood too large for exact independence polynomial (" +
                             std::to_string(vertex_set.size()) + " vertices, cap " +
                             std::to_string(cap) + ")");
  mu.validate(static_cast<std::size_t>(g.size()));
  const int k = static_cast<int>(vertex_set.size());
  std::vector<double> local_mu(static_cast<std::size_t>(k));
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i) {
    local_mu[static_cast<std::size_t>(i)] = mu.values[static_cast<std::size_t>(vertex_set[i])];
    for (int j = 0; j < i; ++j) {
      if (vertex_set[i] == vertex_set[j])
        throw std::invalid_argument("vertex_set contains duplicates");
      if (g.adjacent(vertex_set[i], vertex_set[j])) {
        adj[static_cast<std::size_t>(i)] |= std::uint32_t{1} << j;
        adj[static_cast<std::size_t>(j)] |= std::uint32_t{1} << i;
      }
    }
  }
  const std::uint32_t full = k == 0 ? 0 : (k == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << k) - 1);
  return detail::z_recurse(full, local_mu, adj);
}

struct ConditionReport {
  enum class Kind { classical, cluster };

  struct PerEvent {
    EventId event = 0;
    double p = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // bound - p
    bool ok = false;
  };

  Kind kind = Kind::cluster;
  std::vector<PerEvent> per_event;
  bool satisfied = false;
  double total_bound = 0.0;  // sum of mu (cluster) or sum of x/(1-x) (classical)
};

inline bool slack_ok(double p, double bound) {
  return bound - p >= -kConditionTolerance * std::max(1.0, std::abs(bound));
}

// bound_A = mu_A / Z(inclusive neighborhood of A).
inline std::vector<double> cluster_bounds(const DependencyGraph& g, const MuVector& mu,
                                          int cap = kIndependencePolynomialCap) {
  mu.validate(static_cast<std::size_t>(g.size()));
  std::vector<double> out(static_cast<std::size_t>(g.size()));
  for (EventId a = 0; a < g.size(); ++a) {
    const std::vector<EventId> nbhd = g.inclusive_neighbors(a);
    out[static_cast<std::size_t>(a)] =
        mu.values[static_cast<std::size_t>(a)] / independence_polynomial_sum(g, nbhd, mu, cap);
  }
  return out;
}

// bound_A = x_A * prod over neighbors B of (1 - x_B).
inline std::vector<double> classical_bounds(const DependencyGraph& g, const XVector& x) {
  x.validate(static_cast<std::size_t>(g.size()));
  std::vector<double> out(static_cast<std::size_t>(g.size()));
  for (EventId a = 0; a < g.size(); ++a) {
    double b = x.values[static_cast<std::size_t>(a)];
    for (EventId n : g.neighbors(a)) b *= 1.0 - x.values[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(a)] = b;
  }
  return out;
}

namespace detail {

inline ConditionReport make_report(ConditionReport::Kind kind, std::span<const double> p,
                                   std::span<const double> bounds, double total_bound) {
  ConditionReport r;
  r.kind = kind;
  r.total_bound = total_bound;
  r.satisfied = true;
  r.per_event.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    ConditionReport::PerEvent pe;
    pe.event = static_cast<EventId>(i);
    pe.p = p[i];
    pe.bound = bounds[i];
    pe.slack = bounds[i] - p[i];
    pe.ok = slack_ok(p[i], bounds[i]);
    r.satisfied = r.satisfied && pe.ok;
    r.per_event.push_back(pe);
  }
  return r;
}

}  // namespace detail

inline ConditionReport check_cluster_condition(std::span<const double> p, const DependencyGraph& g,
                                               const MuVector& mu,
                                               int cap = kIndependencePolynomialCap) {
  if (p.size() != static_cast<std::size_t>(g.size()))
    throw std::invalid_argument("probability vector has wrong length");
  const std::vector<double> bounds = cluster_bounds(g, mu, cap);
  double total = 0.0;
  for (double m : mu.values) total += m;
  return detail::make_report(ConditionReport::Kind::cluster, p, bounds, total);
}

inline ConditionReport check_cluster_condition(const Instance& inst, const DependencyGraph& g,
                                               const MuVector& mu,
                                               int cap = kIndependencePolynomialCap) {
  const std::vector<double> p = event_probabilities(inst);
  return check_cluster_condition(p, g, mu, cap);
}

inline ConditionReport check_classical_condition(std::span<const double> p,
                                                 const DependencyGraph& g, const XVector& x) {
  if (p.size() != static_cast<std::size_t>(g.size()))
    throw std::invalid_argument("probability vector has wrong length");
  const std::vector<double> bounds = classical_bounds(g, x);
  double total = 0.0;
  for (double v : x.values) total += v / (1.0 - v);
  return detail::make_report(ConditionReport::Kind::classical, p, bounds, total);
}

inline ConditionReport check_classical_condition(const Instance& inst, const DependencyGraph& g,
                                                 const XVector& x) {
  const std::vector<double> p = event_probabilities(inst);
  return check_classical_condition(p, g, x);
}

struct UniformMuResult {
  double mu = 0.0;
  bool satisfied = false;
};

// Scalar-mu convenience search. The per-event bound mu/Z(mu) is unimodal in
// mu, so the minimum slack over events is quasiconcave and the satisfiable
// mu form an interval. Locate the slack maximum by ternary search, then
// bisect for the smallest satisfying mu (which minimizes the certified
// total resampling bound sum mu).
inline UniformMuResult find_uniform_mu(std::span<const double> p, const DependencyGraph& g,
                                       int bisection_iters = 60,
                                       int cap = kIndependencePolynomialCap) {
  if (g.size() == 0) return {1.0, true};
  if (p.size() != static_cast<std::size_t>(g.size()))
    throw std::invalid_argument("probability vector has wrong length");
  auto min_slack = [&](double m) {
    const MuVector mu = MuVector::uniform(static_cast<std::size_t>(g.size()), m);
    const std::vector<double> bounds = cluster_bounds(g, mu, cap);
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < bounds.size(); ++i) s = std::min(s, bounds[i] - p[i]);
    return s;
  };
  auto ok = [](double s) { return s >= -kConditionTolerance; };

  double lo = std::log(1e-9), hi = std::log(1e9);
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (min_slack(std::exp(m1)) < min_slack(std::exp(m2)))
      lo = m1;
    else
      hi = m2;
  }
  const double peak = std::exp(0.5 * (lo + hi));
  if (!ok(min_slack(peak))) return {peak, false};

  double a = 1e-9;
  if (ok(min_slack(a))) return {a, true};
  double b = peak;
  for (int it = 0; it < bisection_iters; ++it) {
    const double mid = 0.5 * (a + b);
    if (ok(min_slack(mid)))
      b = mid;
    else
      a = mid;
  }
  return {b, true};
}

inline UniformMuResult find_uniform_mu(const Instance& inst, const DependencyGraph& g,
                                       int bisection_iters = 60,
                                       int cap = kIndependencePolynomialCap) {
  const std::vector<double> p = event_probabilities(inst);
  return find_uniform_mu(p, g, bisection_iters, cap);
}

}  // namespace lll
