#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "lll/branching.hpp"
#include "lll/conditions.hpp"
#include "lll/encodings.hpp"
#include "lll/engine.hpp"
#include "lll/json_io.hpp"
#include "lll/stats.hpp"
#include "lll/witness.hpp"

namespace lll::cli {

// Exit codes: 0 success/satisfied, 1 usage or input error, 2 condition not
// satisfied (check verdict, experiment refusal), 3 solve hit max_steps.

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << data;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline bool parse_positive_double(const std::string& s, double& v) {
  try {
    std::size_t used = 0;
    v = std::stod(s, &used);
    return used == s.size() && v > 0.0 && std::isfinite(v);
  } catch (const std::exception&) {
    return false;
  }
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

struct Options {
  std::string instance_path;
  std::string format = "auto";  // dimacs | hypergraph | auto (by extension)
  int colors = 2;
  std::string condition = "cluster";  // cluster | classical
  std::string mu_source;              // file path, "uniform", or a positive constant
  std::string x_path;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::uint64_t max_steps = 0;  // 0 = auto
  std::string policy = "lowest-id";
  std::string out_path;
  std::string out_format = "json";  // json | csv
  bool force = false;
  unsigned threads = 1;
  int root = 0;
  int max_nodes = 4;
  int depth_cap = kDefaultDepthCap;
};

struct LoadedInstance {
  Instance instance;
  std::string format;
};

inline LoadedInstance load_instance(const Options& o) {
  if (o.instance_path.empty()) throw std::runtime_error("--instance is required");
  std::string fmt = o.format;
  if (fmt == "auto") {
    if (detail::ends_with(o.instance_path, ".cnf") || detail::ends_with(o.instance_path, ".dimacs"))
      fmt = "dimacs";
    else if (detail::ends_with(o.instance_path, ".hg") || detail::ends_with(o.instance_path, ".hyp"))
      fmt = "hypergraph";
    else
      throw std::runtime_error("cannot infer format from '" + o.instance_path +
                               "'; pass --format dimacs|hypergraph");
  }
  const std::string text = detail::read_file(o.instance_path);
  if (fmt == "dimacs") return {cnf_to_instance(parse_dimacs(text)), fmt};
  if (fmt == "hypergraph")
    return {hypergraph_to_instance(parse_hypergraph(text), o.colors), fmt};
  throw std::runtime_error("unknown format '" + fmt + "' (expected dimacs or hypergraph)");
}

struct ConditionSetup {
  ConditionReport report;
  MuVector mu;  // engine-bound weights; for the classical condition, mu = x/(1-x)
  std::string param_note;
};

inline ConditionSetup resolve_condition(const Options& o, const DependencyGraph& g,
                                        const std::vector<double>& p) {
  ConditionSetup s;
  if (o.condition == "classical") {
    if (o.x_path.empty()) throw std::runtime_error("classical condition requires --x <file>");
    XVector x{parse_value_file(detail::read_file(o.x_path))};
    x.validate(static_cast<std::size_t>(g.size()));
    s.report = check_classical_condition(p, g, x);
    s.mu = mu_from_x(x);
    s.param_note = "x loaded from " + o.x_path;
    return s;
  }
  if (o.condition != "cluster")
    throw std::runtime_error("unknown condition '" + o.condition + "' (expected cluster or classical)");
  if (o.mu_source.empty())
    throw std::runtime_error("cluster condition requires --mu <file|uniform|constant>");
  MuVector mu;
  double constant = 0.0;
  if (o.mu_source == "uniform") {
    const UniformMuResult r = find_uniform_mu(p, g);
    mu = MuVector::uniform(static_cast<std::size_t>(g.size()), r.mu);
    s.param_note = "uniform mu search: mu = " + detail::fmt6(r.mu) +
                   (r.satisfied ? "" : " (no uniform mu satisfies the condition)");
  } else if (detail::parse_positive_double(o.mu_source, constant)) {
    mu = MuVector::uniform(static_cast<std::size_t>(g.size()), constant);
    s.param_note = "uniform mu = " + detail::fmt6(constant);
  } else {
    mu.values = parse_value_file(detail::read_file(o.mu_source));
    s.param_note = "mu loaded from " + o.mu_source;
  }
  mu.validate(static_cast<std::size_t>(g.size()));
  s.report = check_cluster_condition(p, g, mu);
  s.mu = std::move(mu);
  return s;
}

inline void print_condition(const ConditionReport& r, std::ostream& out) {
  out << "event  p            bound        slack        ok\n";
  for (const auto& pe : r.per_event) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-6d %-12.6g %-12.6g %-12.6g %s\n", pe.event, pe.p, pe.bound,
                  pe.slack, pe.ok ? "yes" : "NO");
    out << buf;
  }
  out << (r.kind == ConditionReport::Kind::cluster ? "cluster" : "classical") << " condition "
      << (r.satisfied ? "satisfied" : "NOT satisfied")
      << "; total bound on expected resampling steps = " << detail::fmt6(r.total_bound) << "\n";
}

inline std::string condition_csv(const ConditionReport& r) {
  std::string out = "# schema_version=" + std::to_string(kReportSchemaVersion) +
                    " condition=" + (r.kind == ConditionReport::Kind::cluster ? "cluster" : "classical") +
                    " satisfied=" + (r.satisfied ? "1" : "0") +
                    " total_bound=" + detail::fmt(r.total_bound) + "\n";
  out += "event,p,bound,slack,ok\n";
  for (const auto& pe : r.per_event)
    out += std::to_string(pe.event) + "," + detail::fmt(pe.p) + "," + detail::fmt(pe.bound) + "," +
           detail::fmt(pe.slack) + "," + (pe.ok ? "1" : "0") + "\n";
  return out;
}

inline void check_out_format(const Options& o, bool csv_supported = true) {
  if (o.out_format != "json" && o.out_format != "csv")
    throw std::runtime_error("unknown --out-format '" + o.out_format + "' (expected json or csv)");
  if (o.out_format == "csv" && !csv_supported)
    throw std::runtime_error("csv output is not supported for this command");
}

inline void write_output(const Options& o, const nlohmann::json& j, const std::string& csv) {
  if (o.out_path.empty()) return;
  if (o.out_format == "json") {
    detail::write_file(o.out_path, j.dump(2) + "\n");
  } else if (o.out_format == "csv") {
    if (csv.empty()) throw std::runtime_error("csv output is not supported for this command");
    detail::write_file(o.out_path, csv);
  } else {
    throw std::runtime_error("unknown --out-format '" + o.out_format + "' (expected json or csv)");
  }
}

inline int cmd_check(const Options& o, std::ostream& out, std::ostream&) {
  check_out_format(o);
  const LoadedInstance li = load_instance(o);
  const DependencyGraph g = build_dependency_graph(li.instance);
  const std::vector<double> p = event_probabilities(li.instance);
  const ConditionSetup s = resolve_condition(o, g, p);
  if (!s.param_note.empty()) out << s.param_note << "\n";
  print_condition(s.report, out);
  write_output(o, to_json(s.report), condition_csv(s.report));
  return s.report.satisfied ? 0 : 2;
}

inline int cmd_solve(const Options& o, std::ostream& out, std::ostream&) {
  check_out_format(o, /*csv_supported=*/false);
  const LoadedInstance li = load_instance(o);
  std::uint64_t max_steps = o.max_steps;
  if (max_steps == 0) {
    double total_mu = 0.0;
    if (!o.mu_source.empty() || !o.x_path.empty()) {
      const DependencyGraph g = build_dependency_graph(li.instance);
      const std::vector<double> p = event_probabilities(li.instance);
      for (double m : resolve_condition(o, g, p).mu.values) total_mu += m;
    }
    max_steps = default_max_steps(total_mu);
  }
  const ExecutionLog log = run(li.instance, parse_policy(o.policy), o.seed, max_steps);
  out << "terminated=" << (log.terminated ? "yes" : "no") << " steps_used=" << log.steps_used
      << " max_steps=" << max_steps << "\n";
  out << "resamples:";
  for (std::size_t e = 0; e < log.counts.size(); ++e) out << " " << e << "=" << log.counts[e];
  out << "\n";
  write_output(o, to_json(log), {});
  return log.terminated ? 0 : 3;
}

inline int cmd_experiment(const Options& o, std::ostream& out, std::ostream& err) {
  check_out_format(o);
  const LoadedInstance li = load_instance(o);
  if (o.trials < 1) throw std::runtime_error("--trials must be >= 1");
  const DependencyGraph g = build_dependency_graph(li.instance);
  const std::vector<double> p = event_probabilities(li.instance);
  const ConditionSetup s = resolve_condition(o, g, p);
  if (!s.report.satisfied && !o.force) {
    print_condition(s.report, out);
    err << "condition not satisfied; pass --force to run the experiment anyway\n";
    return 2;
  }
  const bool bounds_applicable = s.report.satisfied;
  double sum_mu = 0.0;
  for (double m : s.mu.values) sum_mu += m;
  const std::uint64_t max_steps = o.max_steps != 0 ? o.max_steps : default_max_steps(sum_mu);

  const std::vector<ExecutionLog> logs =
      run_trials(li.instance, parse_policy(o.policy), o.seed, o.trials, max_steps, o.threads);
  const TrialStats stats = summarize_trials(li.instance, logs);
  nlohmann::json nonterminated_trials = nlohmann::json::array();
  for (std::size_t t = 0; t < logs.size(); ++t)
    if (!logs[t].terminated) nonterminated_trials.push_back(t);

  nlohmann::json events = nlohmann::json::array();
  out << "event  mu           mean_N       se           max     within_bound\n";
  for (int e = 0; e < li.instance.num_events(); ++e) {
    const std::size_t i = static_cast<std::size_t>(e);
    const double mu_e = s.mu.values[i];
    const bool within = stats.mean_resamples[i] <= mu_e + 3.0 * stats.se_resamples[i];
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-6d %-12.6g %-12.6g %-12.6g %-7llu %s\n", e, mu_e,
                  stats.mean_resamples[i], stats.se_resamples[i],
                  static_cast<unsigned long long>(stats.max_resamples[i]),
                  bounds_applicable ? (within ? "yes" : "NO") : "n/a");
    out << buf;
    nlohmann::json ev = {{"event", e},
                         {"mu", mu_e},
                         {"mean_resamples", stats.mean_resamples[i]},
                         {"se_resamples", stats.se_resamples[i]},
                         {"max_resamples", stats.max_resamples[i]}};
    if (bounds_applicable)
      ev["within_bound"] = within;
    else
      ev["within_bound"] = nullptr;
    events.push_back(ev);
  }
  out << "trials=" << stats.trials << " nonterminated=" << stats.nonterminated
      << " mean_total_steps=" << detail::fmt6(stats.mean_total_steps) << " (se "
      << detail::fmt6(stats.se_total_steps) << ") sum_mu=" << detail::fmt6(sum_mu) << "\n";

  const nlohmann::json report = {{"schema_version", kReportSchemaVersion},
                                 {"command", "experiment"},
                                 {"instance", o.instance_path},
                                 {"condition", to_json(s.report)},
                                 {"policy", o.policy},
                                 {"seed", o.seed},
                                 {"trials", o.trials},
                                 {"max_steps", max_steps},
                                 {"bounds_applicable", bounds_applicable},
                                 {"nonterminated", stats.nonterminated},
                                 {"nonterminated_trials", nonterminated_trials},
                                 {"mean_total_steps", stats.mean_total_steps},
                                 {"se_total_steps", stats.se_total_steps},
                                 {"sum_mu", sum_mu},
                                 {"events", events}};

  std::string csv = "# schema_version=" + std::to_string(kReportSchemaVersion) +
                    " trials=" + std::to_string(stats.trials) +
                    " nonterminated=" + std::to_string(stats.nonterminated) +
                    " mean_total_steps=" + detail::fmt(stats.mean_total_steps) +
                    " se_total_steps=" + detail::fmt(stats.se_total_steps) +
                    " sum_mu=" + detail::fmt(sum_mu) +
                    " bounds_applicable=" + (bounds_applicable ? "1" : "0") + "\n";
  csv += "event,mu,mean_resamples,se_resamples,max_resamples,within_bound\n";
  for (int e = 0; e < li.instance.num_events(); ++e) {
    const std::size_t i = static_cast<std::size_t>(e);
    const bool within = stats.mean_resamples[i] <= s.mu.values[i] + 3.0 * stats.se_resamples[i];
    csv += std::to_string(e) + "," + detail::fmt(s.mu.values[i]) + "," +
           detail::fmt(stats.mean_resamples[i]) + "," + detail::fmt(stats.se_resamples[i]) + "," +
           std::to_string(stats.max_resamples[i]) + "," +
           (bounds_applicable ? (within ? "1" : "0") : "") + "\n";
  }
  write_output(o, report, csv);
  return 0;
}

inline int cmd_branching(const Options& o, std::ostream& out, std::ostream&) {
  check_out_format(o);
  const LoadedInstance li = load_instance(o);
  if (o.trials < 1) throw std::runtime_error("--trials must be >= 1");
  const DependencyGraph g = build_dependency_graph(li.instance);
  if (o.root < 0 || o.root >= g.size()) throw std::runtime_error("--root out of range");

  BranchingKind kind = BranchingKind::independent_rejection;
  MuVector mu;
  XVector x;
  std::vector<double> values;
  if (o.condition == "classical") {
    kind = BranchingKind::moser_tardos;
    if (o.x_path.empty()) throw std::runtime_error("classical branching requires --x <file>");
    x.values = parse_value_file(detail::read_file(o.x_path));
    x.validate(static_cast<std::size_t>(g.size()));
    values = x.values;
  } else if (o.condition == "cluster") {
    const std::vector<double> p = event_probabilities(li.instance);
    const ConditionSetup s = resolve_condition(o, g, p);
    mu = s.mu;
    values = mu.values;
    if (!s.param_note.empty()) out << s.param_note << "\n";
  } else {
    throw std::runtime_error("unknown condition '" + o.condition + "'");
  }

  const std::vector<WitnessTree> trees =
      enumerate_strongly_proper_trees(g, o.root, o.max_nodes);
  const TreeTally tally = monte_carlo_tree_tally(g, kind, values, o.root, o.trials, o.depth_cap, o.seed);
  const double truncated_fraction =
      static_cast<double>(tally.truncated) / static_cast<double>(tally.trials);

  struct Row {
    std::string encoding;
    int nodes;
    double closed_form;
    double frequency;
    double z;
  };
  std::vector<Row> rows;
  rows.reserve(trees.size());
  std::vector<double> partial_sums(static_cast<std::size_t>(o.max_nodes), 0.0);
  for (const WitnessTree& t : trees) {
    Row r;
    r.encoding = canonical_encoding(t);
    r.nodes = static_cast<int>(t.nodes.size());
    r.closed_form = kind == BranchingKind::moser_tardos ? closed_form_p_T(t, g, x)
                                                        : closed_form_p_T_prime(t, g, mu);
    r.frequency = tally.frequency(r.encoding);
    const double se = binomial_se(r.closed_form, static_cast<double>(o.trials));
    r.z = se > 0.0 ? (r.frequency - r.closed_form) / se : 0.0;
    for (int k = r.nodes; k <= o.max_nodes; ++k)
      partial_sums[static_cast<std::size_t>(k - 1)] += r.closed_form;
    rows.push_back(std::move(r));
  }

  double max_abs_z = 0.0;
  for (const Row& r : rows) max_abs_z = std::max(max_abs_z, std::abs(r.z));
  out << "process=" << to_string(kind) << " root=" << o.root << " trials=" << o.trials
      << " trees=" << rows.size() << " truncated_fraction=" << detail::fmt6(truncated_fraction)
      << "\n";
  out << "closed-form partial sums by node cap:";
  for (double s : partial_sums) out << " " << detail::fmt6(s);
  out << "\nmax |z| over enumerated trees = " << detail::fmt6(max_abs_z) << "\n";
  if (rows.size() <= 40) {
    out << "encoding                     nodes closed_form  frequency    z\n";
    for (const Row& r : rows) {
      char buf[240];
      std::snprintf(buf, sizeof buf, "%-28s %-5d %-12.6g %-12.6g %-8.3g\n", r.encoding.c_str(),
                    r.nodes, r.closed_form, r.frequency, r.z);
      out << buf;
    }
  }

  nlohmann::json jtrees = nlohmann::json::array();
  for (const Row& r : rows)
    jtrees.push_back({{"encoding", r.encoding},
                      {"nodes", r.nodes},
                      {"closed_form", r.closed_form},
                      {"frequency", r.frequency},
                      {"z", r.z}});
  const nlohmann::json report = {{"schema_version", kReportSchemaVersion},
                                 {"command", "branching"},
                                 {"instance", o.instance_path},
                                 {"process", to_string(kind)},
                                 {"root", o.root},
                                 {"trials", o.trials},
                                 {"depth_cap", o.depth_cap},
                                 {"max_nodes", o.max_nodes},
                                 {"seed", o.seed},
                                 {"truncated_fraction", truncated_fraction},
                                 {"closed_form_partial_sums", partial_sums},
                                 {"trees", jtrees}};
  std::string csv = "# schema_version=" + std::to_string(kReportSchemaVersion) +
                    " process=" + to_string(kind) + " trials=" + std::to_string(o.trials) +
                    " truncated_fraction=" + detail::fmt(truncated_fraction) + "\n";
  csv += "encoding,nodes,closed_form,frequency,z\n";
  for (const Row& r : rows)
    csv += r.encoding + "," + std::to_string(r.nodes) + "," + detail::fmt(r.closed_form) + "," +
           detail::fmt(r.frequency) + "," + detail::fmt(r.z) + "\n";
  write_output(o, report, csv);
  return 0;
}

inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Moser-Tardos resampling with certified expected-work bounds"};
  app.name("lll");
  app.require_subcommand(1);
  Options o;

  auto add_instance_opts = [&](CLI::App* c) {
    c->add_option("--instance", o.instance_path, "instance file")->required();
    c->add_option("--format", o.format, "dimacs|hypergraph (default: by file extension)");
    c->add_option("--colors", o.colors, "colors for hypergraph instances (default 2)");
  };
  auto add_condition_opts = [&](CLI::App* c) {
    c->add_option("--condition", o.condition, "cluster|classical (default cluster)");
    c->add_option("--mu", o.mu_source, "per-event mu file, 'uniform' to search, or a constant");
    c->add_option("--x", o.x_path, "per-event x file (classical condition)");
  };
  auto add_output_opts = [&](CLI::App* c) {
    c->add_option("--out", o.out_path, "write the machine-readable report here");
    c->add_option("--out-format", o.out_format, "json|csv (default json)");
  };
  auto add_run_opts = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "base seed (default 1)");
    c->add_option("--max-steps", o.max_steps, "step cap; 0 = max(1e6, 100*ceil(sum mu))");
    c->add_option("--policy", o.policy,
                  "lowest-id|random-uniform|most-recently-invalidated (default lowest-id)");
  };

  CLI::App* check = app.add_subcommand("check", "evaluate a sufficient condition");
  add_instance_opts(check);
  add_condition_opts(check);
  add_output_opts(check);

  CLI::App* solve = app.add_subcommand("solve", "run the resampler once and write its log");
  add_instance_opts(solve);
  add_condition_opts(solve);
  add_output_opts(solve);
  add_run_opts(solve);

  CLI::App* experiment =
      app.add_subcommand("experiment", "repeated seeded runs compared against the mu bounds");
  add_instance_opts(experiment);
  add_condition_opts(experiment);
  add_output_opts(experiment);
  add_run_opts(experiment);
  experiment->add_option("--trials", o.trials, "number of runs (default 1000)");
  experiment->add_option("--threads", o.threads, "worker threads (default 1)");
  experiment->add_flag("--force", o.force, "run even if the condition is not satisfied");

  CLI::App* branching =
      app.add_subcommand("branching", "validate branching-process closed forms by simulation");
  add_instance_opts(branching);
  add_condition_opts(branching);
  add_output_opts(branching);
  branching->add_option("--trials", o.trials, "simulated trees (default 1000)");
  branching->add_option("--seed", o.seed, "base seed (default 1)");
  branching->add_option("--root", o.root, "root event id (default 0)");
  branching->add_option("--max-nodes", o.max_nodes, "enumeration size cap (default 4)");
  branching->add_option("--depth-cap", o.depth_cap, "simulation generation cap (default 64)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(check)) return cmd_check(o, out, err);
    if (app.got_subcommand(solve)) return cmd_solve(o, out, err);
    if (app.got_subcommand(experiment)) return cmd_experiment(o, out, err);
    if (app.got_subcommand(branching)) return cmd_branching(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace lll::cli
