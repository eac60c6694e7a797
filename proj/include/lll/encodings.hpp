#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lll/model.hpp"
#include "lll/rng.hpp"

namespace lll {

struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;  // DIMACS literals, 1-based, sign = polarity
};

namespace detail {

inline bool parse_int(const std::string& tok, long& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtol(tok.c_str(), &end, 10);
  return end != nullptr && *end == '\0';
}

}  // namespace detail

// DIMACS CNF: 'c' comment lines, one 'p cnf <vars> <clauses>' header, then
// whitespace-separated literals with each clause terminated by 0. Clauses
// may span lines. Tautological or duplicated literals are rejected.
inline CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  bool have_header = false;
  std::size_t expected_clauses = 0;
  std::vector<int> current;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("dimacs parse error at line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == 'c') continue;
    if (line[first] == 'p') {
      if (have_header) fail("duplicate header");
      std::istringstream hs(line);
      std::string p, fmt, extra;
      long vars = -1, clauses = -1;
      if (!(hs >> p >> fmt >> vars >> clauses) || p != "p" || fmt != "cnf" || vars < 0 ||
          clauses < 0 || (hs >> extra))
        fail("malformed header (expected 'p cnf <vars> <clauses>')");
      f.num_vars = static_cast<int>(vars);
      expected_clauses = static_cast<std::size_t>(clauses);
      have_header = true;
      continue;
    }
    if (!have_header) fail("clause data before header");
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      long lit = 0;
      if (!detail::parse_int(tok, lit)) fail("bad literal '" + tok + "'");
      if (lit == 0) {
        if (current.empty()) fail("empty clause");
        for (std::size_t i = 0; i < current.size(); ++i)
          for (std::size_t j = i + 1; j < current.size(); ++j) {
            if (current[i] == current[j]) fail("duplicate literal in clause");
            if (current[i] == -current[j]) fail("tautological clause");
          }
        f.clauses.push_back(current);
        current.clear();
        if (f.clauses.size() > expected_clauses) fail("more clauses than the header declares");
      } else {
        const long v = lit < 0 ? -lit : lit;
        if (v > f.num_vars) fail("literal out of range: " + tok);
        current.push_back(static_cast<int>(lit));
      }
    }
  }
  if (!have_header) fail("missing 'p cnf' header");
  if (!current.empty()) fail("unterminated clause at end of file");
  if (f.clauses.size() != expected_clauses)
    fail("clause count mismatch: header declares " + std::to_string(expected_clauses) +
         ", file has " + std::to_string(f.clauses.size()));
  return f;
}

inline std::string serialize_dimacs(const CnfFormula& f) {
  std::string out = "p cnf " + std::to_string(f.num_vars) + " " + std::to_string(f.clauses.size()) + "\n";
  for (const auto& clause : f.clauses) {
    for (int lit : clause) {
      out += std::to_string(lit);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

// One uniform binary variable per CNF variable; one event per clause,
// violated iff every literal is false, so a k-literal clause has p = 2^-k.
inline Instance cnf_to_instance(const CnfFormula& f) {
  Instance inst;
  inst.variables.reserve(static_cast<std::size_t>(f.num_vars));
  for (int v = 0; v < f.num_vars; ++v) inst.variables.push_back(VarSpec::uniform(v, 2));
  inst.events.reserve(f.clauses.size());
  for (std::size_t c = 0; c < f.clauses.size(); ++c) {
    std::vector<std::pair<VarId, bool>> lits;
    lits.reserve(f.clauses[c].size());
    for (int lit : f.clauses[c]) lits.emplace_back(std::abs(lit) - 1, lit > 0);
    inst.events.push_back(Event::clause(static_cast<EventId>(c), lits));
  }
  inst.validate();
  return inst;
}

struct Hypergraph {
  int num_vertices = 0;
  std::vector<std::vector<int>> edges;  // vertex ids, each edge size >= 2
};

// Line-based hypergraph format: one edge per line as whitespace-separated
// vertex ids; '#' starts a comment. The vertex count is the largest id + 1.
inline Hypergraph parse_hypergraph(std::string_view text) {
  Hypergraph h;
  std::set<std::vector<int>> seen;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("hypergraph parse error at line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<int> edge;
    std::string tok;
    while (ls >> tok) {
      long v = 0;
      if (!detail::parse_int(tok, v) || v < 0) fail("bad vertex id '" + tok + "'");
      edge.push_back(static_cast<int>(v));
      h.num_vertices = std::max(h.num_vertices, static_cast<int>(v) + 1);
    }
    if (edge.empty()) continue;
    if (edge.size() < 2) fail("edge must have at least 2 vertices");
    std::vector<int> sorted = edge;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail("duplicate vertex within edge");
    if (!seen.insert(sorted).second) fail("duplicate edge");
    h.edges.push_back(std::move(edge));
  }
  return h;
}

inline std::string serialize_hypergraph(const Hypergraph& h) {
  std::string out;
  for (const auto& edge : h.edges) {
    for (std::size_t i = 0; i < edge.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(edge[i]);
    }
    out += '\n';
  }
  return out;
}

// One uniform variable with `colors` values per vertex; one event per edge,
// violated iff all endpoints share a color, so p = colors^(1-|e|).
inline Instance hypergraph_to_instance(const Hypergraph& h, int colors) {
  if (colors < 2) throw std::invalid_argument("colors must be >= 2");
  Instance inst;
  inst.variables.reserve(static_cast<std::size_t>(h.num_vertices));
  for (int v = 0; v < h.num_vertices; ++v) inst.variables.push_back(VarSpec::uniform(v, colors));
  inst.events.reserve(h.edges.size());
  for (std::size_t e = 0; e < h.edges.size(); ++e)
    inst.events.push_back(Event::monochromatic(static_cast<EventId>(e), h.edges[e]));
  inst.validate();
  return inst;
}

// Seeded k-SAT generator with a per-variable occurrence cap, which in turn
// caps the dependency-graph degree at k*(max_var_occurrence-1). Retries from
// scratch when the greedy fill runs out of eligible variables.
inline CnfFormula random_ksat(int n_vars, int n_clauses, int k, int max_var_occurrence,
                              std::uint64_t seed) {
  if (n_vars < 1 || n_clauses < 0 || k < 1 || max_var_occurrence < 1)
    throw std::invalid_argument("random_ksat: parameters must be positive");
  if (k > n_vars) throw std::invalid_argument("random_ksat: k exceeds variable count");
  if (static_cast<std::int64_t>(n_clauses) * k >
      static_cast<std::int64_t>(n_vars) * max_var_occurrence)
    throw std::runtime_error("random_ksat: occurrence budget infeasible");
  CounterRng rng(seed);
  constexpr int kAttempts = 200;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<int> occ(static_cast<std::size_t>(n_vars), 0);
    CnfFormula f;
    f.num_vars = n_vars;
    bool ok = true;
    for (int c = 0; c < n_clauses && ok; ++c) {
      std::vector<int> avail;
      for (int v = 0; v < n_vars; ++v)
        if (occ[static_cast<std::size_t>(v)] < max_var_occurrence) avail.push_back(v);
      if (static_cast<int>(avail.size()) < k) {
        ok = false;
        break;
      }
      for (int i = 0; i < k; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) + rng.next_below(avail.size() - static_cast<std::size_t>(i));
        std::swap(avail[static_cast<std::size_t>(i)], avail[j]);
      }
      std::vector<int> clause;
      clause.reserve(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        const int v = avail[static_cast<std::size_t>(i)];
        ++occ[static_cast<std::size_t>(v)];
        clause.push_back(rng.bernoulli(0.5) ? v + 1 : -(v + 1));
      }
      f.clauses.push_back(std::move(clause));
    }
    if (ok) return f;
  }
  throw std::runtime_error("random_ksat: retry limit exceeded (caps too tight)");
}

// Seeded k-uniform hypergraph generator with a vertex degree cap; duplicate
// edges are redrawn, and the whole structure is retried when stuck.
inline Hypergraph random_hypergraph(int n_vertices, int n_edges, int k, int max_degree,
                                    std::uint64_t seed) {
  if (n_vertices < 1 || n_edges < 0 || k < 2 || max_degree < 1)
    throw std::invalid_argument("random_hypergraph: parameters must be positive (k >= 2)");
  if (k > n_vertices) throw std::invalid_argument("random_hypergraph: k exceeds vertex count");
  if (static_cast<std::int64_t>(n_edges) * k >
      static_cast<std::int64_t>(n_vertices) * max_degree)
    throw std::runtime_error("random_hypergraph: degree budget infeasible");
  CounterRng rng(seed);
  constexpr int kAttempts = 200;
  constexpr int kEdgeTries = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<int> deg(static_cast<std::size_t>(n_vertices), 0);
    std::set<std::vector<int>> seen;
    Hypergraph h;
    h.num_vertices = n_vertices;
    bool ok = true;
    for (int e = 0; e < n_edges && ok; ++e) {
      bool placed = false;
      for (int t = 0; t < kEdgeTries && !placed; ++t) {
        std::vector<int> avail;
        for (int v = 0; v < n_vertices; ++v)
          if (deg[static_cast<std::size_t>(v)] < max_degree) avail.push_back(v);
        if (static_cast<int>(avail.size()) < k) break;
        for (int i = 0; i < k; ++i) {
          const std::size_t j = static_cast<std::size_t>(i) +
                                rng.next_below(avail.size() - static_cast<std::size_t>(i));
          std::swap(avail[static_cast<std::size_t>(i)], avail[j]);
        }
        std::vector<int> edge(avail.begin(), avail.begin() + k);
        std::sort(edge.begin(), edge.end());
        if (!seen.insert(edge).second) continue;
        for (int v : edge) ++deg[static_cast<std::size_t>(v)];
        h.edges.push_back(std::move(edge));
        placed = true;
      }
      if (!placed) ok = false;
    }
    if (ok) return h;
  }
  throw std::runtime_error("random_hypergraph: retry limit exceeded (caps too tight)");
}

}  // namespace lll
