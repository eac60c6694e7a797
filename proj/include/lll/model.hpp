#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lll/rng.hpp"

namespace lll {

using VarId = int;
using EventId = int;

// Exact event probabilities enumerate the event's joint support; refuse
// beyond this many joint values.
inline constexpr std::uint64_t kProbabilityEnumCap = std::uint64_t{1} << 24;

// Finite discrete random variable with an explicit distribution over
// domain values 0..domain_size-1.
struct VarSpec {
  VarId id = 0;
  int domain_size = 0;
  std::vector<double> weights;

  static VarSpec uniform(VarId id, int domain_size) {
    VarSpec v;
    v.id = id;
    v.domain_size = domain_size;
    v.weights.assign(static_cast<std::size_t>(domain_size), 1.0 / domain_size);
    return v;
  }

  void validate() const {
    if (domain_size < 1)
      throw std::invalid_argument("variable " + std::to_string(id) + ": domain_size must be >= 1");
    if (static_cast<int>(weights.size()) != domain_size)
      throw std::invalid_argument("variable " + std::to_string(id) + ": weights must have one entry per domain value");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("variable " + std::to_string(id) + ": weights must be nonnegative finite");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("variable " + std::to_string(id) + ": weights must sum to 1");
  }
};

// Value for every variable of an instance, indexed by variable id.
struct Assignment {
  std::vector<int> values;
};

// Bad event over a fixed variable support. The predicate sees the values of
// vbl in listed order and nothing else, so it cannot depend on other
// variables by construction.
struct Event {
  EventId id = 0;
  std::vector<VarId> vbl;  // duplicate-free; order fixes the predicate's argument order
  std::function<bool(std::span<const int>)> violated;
  std::string label;

  // Disjunction of literals over binary variables; violated when every
  // literal is false. Domain value 1 is "true".
  static Event clause(EventId id, const std::vector<std::pair<VarId, bool>>& literals) {
    Event e;
    e.id = id;
    std::vector<bool> positive;
    positive.reserve(literals.size());
    for (const auto& [v, pos] : literals) {
      e.vbl.push_back(v);
      positive.push_back(pos);
    }
    e.violated = [positive](std::span<const int> vals) {
      for (std::size_t i = 0; i < vals.size(); ++i)
        if ((vals[i] != 0) == static_cast<bool>(positive[i])) return false;
      return true;
    };
    e.label = "clause " + std::to_string(id);
    return e;
  }

  // Violated when every listed variable takes the same value.
  static Event monochromatic(EventId id, std::vector<VarId> vertices) {
    Event e;
    e.id = id;
    e.vbl = std::move(vertices);
    e.violated = [](std::span<const int> vals) {
      for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] != vals[0]) return false;
      return true;
    };
    e.label = "edge " + std::to_string(id);
    return e;
  }

  // Constant predicate (p = 0 or p = 1); still needs a nonempty support.
  static Event constant(EventId id, std::vector<VarId> vars, bool always_violated) {
    Event e;
    e.id = id;
    e.vbl = std::move(vars);
    e.violated = [always_violated](std::span<const int>) { return always_violated; };
    e.label = always_violated ? "always" : "never";
    return e;
  }
};

struct Instance {
  std::vector<VarSpec> variables;
  std::vector<Event> events;

  int num_variables() const { return static_cast<int>(variables.size()); }
  int num_events() const { return static_cast<int>(events.size()); }

  void validate() const {
    for (int i = 0; i < num_variables(); ++i) {
      if (variables[i].id != i)
        throw std::invalid_argument("variable ids must be 0..n-1 in order");
      variables[i].validate();
    }
    for (int i = 0; i < num_events(); ++i) {
      const Event& e = events[i];
      if (e.id != i) throw std::invalid_argument("event ids must be 0..n-1 in order");
      if (e.vbl.empty())
        throw std::invalid_argument("event " + std::to_string(i) + ": empty support");
      std::vector<VarId> sorted = e.vbl;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("event " + std::to_string(i) + ": duplicate variable in support");
      for (VarId v : e.vbl)
        if (v < 0 || v >= num_variables())
          throw std::invalid_argument("event " + std::to_string(i) + ": unknown variable " + std::to_string(v));
      if (!e.violated)
        throw std::invalid_argument("event " + std::to_string(i) + ": missing predicate");
    }
  }
};

inline bool is_violated(const Instance& inst, const Assignment& a, EventId e) {
  if (e < 0 || e >= inst.num_events())
    throw std::invalid_argument("unknown event id " + std::to_string(e));
  if (a.values.size() != inst.variables.size())
    throw std::invalid_argument("assignment is not total");
  const Event& ev = inst.events[e];
  static thread_local std::vector<int> buf;
  buf.clear();
  for (VarId v : ev.vbl) buf.push_back(a.values[v]);
  return ev.violated(buf);
}

// Exact violation probability under the product measure, by enumerating the
// joint values of the event's support.
inline double event_probability(const Instance& inst, EventId e,
                                std::uint64_t enum_cap = kProbabilityEnumCap) {
  if (e < 0 || e >= inst.num_events())
    throw std::invalid_argument("unknown event id " + std::to_string(e));
  const Event& ev = inst.events[e];
  std::uint64_t combos = 1;
  for (VarId v : ev.vbl) {
    combos *= static_cast<std::uint64_t>(inst.variables[v].domain_size);
    if (combos > enum_cap)
      throw std::runtime_error("support too large for exact probability (event " + std::to_string(e) +
                               (ev.label.empty() ? std::string{} : ", " + ev.label) + ")");
  }
  std::vector<int> vals(ev.vbl.size(), 0);
  double p = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
      w *= inst.variables[ev.vbl[i]].weights[vals[i]];
    if (w > 0.0 && ev.violated(vals)) p += w;
    std::size_t i = 0;
    for (; i < vals.size(); ++i) {
      if (++vals[i] < inst.variables[ev.vbl[i]].domain_size) break;
      vals[i] = 0;
    }
    if (i == vals.size()) break;
  }
  return p;
}

inline std::vector<double> event_probabilities(const Instance& inst,
                                               std::uint64_t enum_cap = kProbabilityEnumCap) {
  std::vector<double> out(static_cast<std::size_t>(inst.num_events()));
  for (int e = 0; e < inst.num_events(); ++e) out[e] = event_probability(inst, e, enum_cap);
  return out;
}

inline int sample_value(const VarSpec& var, CounterRng& rng) {
  return draw_weighted_index(var.weights, rng);
}

// Fresh independent draw for every variable, in variable id order.
inline Assignment sample_assignment(const Instance& inst, CounterRng& rng) {
  Assignment a;
  a.values.resize(inst.variables.size());
  for (const VarSpec& v : inst.variables) a.values[v.id] = sample_value(v, rng);
  return a;
}

// Fresh draws for exactly the listed variables, in listed order.
inline void resample(const Instance& inst, std::span<const VarId> vars, Assignment& a,
                     CounterRng& rng) {
  for (VarId v : vars) a.values[v] = sample_value(inst.variables[v], rng);
}

}  // namespace lll
