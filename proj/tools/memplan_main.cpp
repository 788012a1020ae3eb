// Copyright 2025 The memplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "memplan/analysis.hpp"
#include "memplan/encode.hpp"
#include "memplan/errors.hpp"
#include "memplan/generate.hpp"
#include "memplan/graph.hpp"
#include "memplan/graph_io.hpp"
#include "memplan/lp_format.hpp"
#include "memplan/oracle.hpp"
#include "memplan/pipeline.hpp"
#include "memplan/placement.hpp"
#include "memplan/plan.hpp"
#include "memplan/schedule.hpp"
#include "memplan/solve.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;    // unreadable, malformed or invalid input
constexpr int kExitSolver = 3;   // a solve failed or was out of reach
constexpr int kExitTimeout = 4;  // best-found result written and flagged

int exit_code_for(const memplan::Error& e) {
  using namespace memplan;
  if (dynamic_cast<const Timeout*>(&e)) return kExitTimeout;
  if (dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const CycleDetected*>(&e) ||
      dynamic_cast<const DanglingEndpoint*>(&e) ||
      dynamic_cast<const DuplicateId*>(&e) ||
      dynamic_cast<const ControlEdgeWithSize*>(&e) ||
      dynamic_cast<const InvalidStructure*>(&e) ||
      dynamic_cast<const InvalidSpec*>(&e) ||
      dynamic_cast<const InvalidOrder*>(&e) ||
      dynamic_cast<const MultiOutputUnsupported*>(&e) ||
      dynamic_cast<const NoOutputEdge*>(&e))
    return kExitInput;
  return kExitSolver;
}

std::vector<memplan::NodeIndex> program_order(const memplan::Graph& graph) {
  std::vector<memplan::NodeIndex> order(graph.num_nodes());
  std::iota(order.begin(), order.end(), 0);
  if (graph.num_nodes() == 0 || memplan::is_topological_order(graph, order))
    return order;
  return memplan::topological_order(graph);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    memplan::write_text_file(path, text);
}

void maybe_write_json(const std::string& path, const ordered_json& doc) {
  if (path.empty()) return;
  memplan::write_text_file(path, doc.dump(2) + "\n");
}

std::string default_plan_path(const std::string& input) {
  const std::string suffix = ".json";
  std::string stem = input;
  if (stem.size() > suffix.size() &&
      stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0)
    stem.resize(stem.size() - suffix.size());
  return stem + ".plan.json";
}

// Options shared by the solving subcommands.
struct CommonFlags {
  double time_limit = 300.0;
  std::string solver_cmd;
  std::uint64_t align = 1;
  bool no_control_edges = false;
  bool no_preplacement = false;
  bool no_pruning = false;
  bool joint = false;
  bool split = false;
  bool oracle = false;
  std::string json_out;
};

void add_solver_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--time-limit", flags->time_limit,
                  "seconds allowed per solve phase")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--solver-cmd", flags->solver_cmd,
                  "external solver template with {lp} and {sol} placeholders");
  cmd->add_option("--align", flags->align, "round tensor sizes up to a multiple")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-pruning", flags->no_pruning,
                "keep window-forced variables in the model");
}

memplan::PlannerOptions planner_options(const CommonFlags& flags) {
  memplan::PlannerOptions options;
  options.joint = flags.joint;
  options.control_edges = !flags.no_control_edges;
  options.preplacement = !flags.no_preplacement;
  options.pruning = !flags.no_pruning;
  options.align = flags.align;
  options.solve.time_limit = flags.time_limit;
  options.solve.solver_cmd = flags.solver_cmd;
  return options;
}

memplan::Graph load_aligned(const std::string& path, std::uint64_t align) {
  memplan::Graph graph = memplan::load_graph_file(path);
  return align > 1 ? graph.with_aligned_sizes(align) : graph;
}

std::string fixed3(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << value;
  return out.str();
}

std::string fixed1(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << value;
  return out.str();
}

int cmd_analyze(const std::string& input, const std::string& json_out) {
  memplan::Graph graph = memplan::load_graph_file(input);
  memplan::LifetimeBounds bounds = memplan::compute_bounds(graph);
  ordered_json report;
  report["horizon"] = bounds.horizon;
  ordered_json nodes = ordered_json::array();
  for (int v = 0; v < graph.num_nodes(); ++v) {
    std::cout << "node " << graph.node(v).id << ": asap " << bounds.asap[v]
              << " alap " << bounds.alap[v] << "\n";
    nodes.push_back({{"id", graph.node(v).id},
                     {"asap", bounds.asap[v]},
                     {"alap", bounds.alap[v]}});
  }
  ordered_json edges = ordered_json::array();
  for (int e = 0; e < graph.num_edges(); ++e) {
    const memplan::Interval& mul = bounds.mul[e];
    const memplan::Interval& pres = bounds.pres[e];
    std::cout << "edge " << graph.edge(e).id << ": mul [" << mul.lo << ","
              << mul.hi << "]";
    if (pres.empty())
      std::cout << " pres -\n";
    else
      std::cout << " pres [" << pres.lo << "," << pres.hi << "]\n";
    edges.push_back({{"id", graph.edge(e).id},
                     {"mul", {mul.lo, mul.hi}},
                     {"pres", pres.empty() ? ordered_json::array()
                                           : ordered_json{pres.lo, pres.hi}}});
  }
  report["nodes"] = std::move(nodes);
  report["edges"] = std::move(edges);
  maybe_write_json(json_out, report);
  return kExitOk;
}

int cmd_schedule(const std::string& input, const CommonFlags& flags) {
  memplan::Graph graph = load_aligned(input, flags.align);
  memplan::Graph work = graph;
  if (!flags.no_control_edges)
    work = memplan::enforce_early_weight_updates(graph).graph;

  memplan::SolveConfig config;
  config.time_limit = flags.time_limit;
  config.solver_cmd = flags.solver_cmd;
  memplan::SolveOutcome outcome = memplan::solve_schedule_exact(work, config);
  std::uint64_t peak = memplan::peak_resident_bytes(work, outcome.order);

  for (size_t i = 0; i < outcome.order.size(); ++i)
    std::cout << "t" << i + 1 << ": " << work.node(outcome.order[i]).id << "\n";
  std::cout << "peak_rs: " << peak << "\n";
  std::cout << "status: " << memplan::to_string(outcome.status) << "\n";

  ordered_json report;
  ordered_json steps = ordered_json::array();
  for (memplan::NodeIndex v : outcome.order) steps.push_back(work.node(v).id);
  report["sequence"] = std::move(steps);
  report["peak_rs"] = peak;
  report["status"] = memplan::to_string(outcome.status);

  int code =
      outcome.status == memplan::SolveStatus::kTimeout ? kExitTimeout : kExitOk;
  if (flags.oracle) {
    try {
      memplan::PeakWitness witness = memplan::enumerate_min_peak(work);
      bool agree = witness.min_peak == peak;
      std::cout << "oracle min peak: " << witness.min_peak
                << (agree ? " (agrees)" : " (DISAGREES)") << "\n";
      report["oracle_min_peak"] = witness.min_peak;
      if (!agree) code = kExitSolver;
    } catch (const memplan::BudgetExceeded& e) {
      std::cout << "oracle skipped: " << e.what() << "\n";
    }
  }
  maybe_write_json(flags.json_out, report);
  return code;
}

int cmd_place(const std::string& input, const CommonFlags& flags) {
  memplan::Graph graph = load_aligned(input, flags.align);
  std::vector<memplan::NodeIndex> order = program_order(graph);
  std::vector<memplan::Interval> lifetimes =
      memplan::lifetimes_from_order(graph, order);

  std::map<memplan::EdgeIndex, std::uint64_t> fixed;
  if (!flags.no_preplacement)
    fixed = memplan::preallocate_pyramid(graph, lifetimes).assigned;

  memplan::SolveConfig config;
  config.time_limit = flags.time_limit;
  config.solver_cmd = flags.solver_cmd;

  int free_tensors = 0;
  for (int e = 0; e < graph.num_edges(); ++e)
    if (graph.edge(e).size > 0 && !fixed.count(e)) ++free_tensors;

  std::map<memplan::EdgeIndex, std::uint64_t> addresses;
  std::string status;
  if (free_tensors <= config.internal_limits.max_tensors) {
    memplan::SolveOutcome outcome =
        memplan::solve_placement_exact(graph, lifetimes, fixed, config);
    addresses = outcome.addresses;
    status = memplan::to_string(outcome.status);
  } else {
    memplan::EncodeOptions encode_options{!flags.no_pruning, !flags.no_pruning};
    memplan::MilpModel model =
        memplan::encode_addresses(graph, lifetimes, fixed, encode_options);
    memplan::SolveOutcome outcome = memplan::solve_external(model, config);
    for (int e = 0; e < graph.num_edges(); ++e) {
      if (graph.edge(e).size == 0) continue;
      auto pre = fixed.find(e);
      addresses[e] = pre != fixed.end()
                         ? pre->second
                         : static_cast<std::uint64_t>(outcome.assignment.at(
                               memplan::addr_var_name(graph.edge(e).id)));
    }
    status = memplan::to_string(outcome.status);
  }

  std::uint64_t peak = 0;
  ordered_json placed = ordered_json::object();
  for (const auto& [e, addr] : addresses) {
    const memplan::TensorEdge& edge = graph.edge(e);
    std::cout << edge.id << " @ " << addr << " (+" << edge.size << ")\n";
    placed[edge.id] = addr;
    peak = std::max(peak, addr + edge.size);
  }
  std::cout << "peak_mem: " << peak << "\n";
  std::cout << "status: " << status << "\n";

  ordered_json report;
  report["addresses"] = std::move(placed);
  report["peak_mem"] = peak;
  report["status"] = status;

  int code = status == memplan::to_string(memplan::SolveStatus::kTimeout)
                 ? kExitTimeout
                 : kExitOk;
  if (flags.oracle) {
    std::vector<memplan::Interval> windows;
    std::vector<std::uint64_t> sizes;
    for (int e = 0; e < graph.num_edges(); ++e) {
      if (graph.edge(e).size == 0) continue;
      windows.push_back(lifetimes[e]);
      sizes.push_back(graph.edge(e).size);
    }
    try {
      memplan::PackingWitness witness =
          memplan::enumerate_min_packing(windows, sizes);
      bool agree = witness.min_peak == peak;
      std::cout << "oracle min peak: " << witness.min_peak
                << (agree ? " (agrees)" : " (DISAGREES)") << "\n";
      report["oracle_min_peak"] = witness.min_peak;
      if (!agree) code = kExitSolver;
    } catch (const memplan::BudgetExceeded& e) {
      std::cout << "oracle skipped: " << e.what() << "\n";
    }
  }
  maybe_write_json(flags.json_out, report);
  return code;
}

int cmd_plan(const std::string& input, std::string out_path,
             const CommonFlags& flags) {
  memplan::Graph graph = memplan::load_graph_file(input);
  memplan::PlannerOptions options = planner_options(flags);
  memplan::PlanResult result = memplan::plan_graph(graph, options);

  if (out_path.empty()) out_path = default_plan_path(input);
  memplan::save_plan_file(result.plan, out_path);

  const memplan::Graph aligned =
      options.align > 1 ? graph.with_aligned_sizes(options.align) : graph;
  memplan::ValidationReport report =
      memplan::validate_plan(result.plan, aligned);

  double frag = memplan::fragmentation(result.plan.peak_mem,
                                       result.plan.timeline.peak_rs);
  std::cout << "plan: " << out_path << "\n";
  std::cout << "sequence length: " << result.plan.sequence.steps.size() << "\n";
  std::cout << "peak_rs: " << result.plan.timeline.peak_rs << "\n";
  std::cout << "peak_mem: " << result.plan.peak_mem << "\n";
  std::cout << "fragmentation: " << fixed3(frag) << "\n";
  std::cout << "program_order_peak_rs: " << result.program_order_peak << "\n";
  std::cout << "savings: " << fixed1(result.savings_percent) << "%\n";
  std::cout << "schedule: " << result.plan.provenance.schedule_status << " ("
            << fixed3(result.plan.provenance.schedule_seconds) << " s)\n";
  std::cout << "placement: " << result.plan.provenance.placement_status << " ("
            << fixed3(result.plan.provenance.placement_seconds) << " s)\n";
  if (result.control_edges_added > 0)
    std::cout << "control edges added: " << result.control_edges_added << "\n";
  std::cout << "validation: " << (report.ok() ? "ok" : "FAILED") << "\n";
  if (!report.ok()) std::cout << memplan::format_report(report);

  ordered_json doc;
  doc["plan_file"] = out_path;
  doc["peak_rs"] = result.plan.timeline.peak_rs;
  doc["peak_mem"] = result.plan.peak_mem;
  doc["fragmentation"] = frag;
  doc["program_order_peak_rs"] = result.program_order_peak;
  doc["savings_percent"] = result.savings_percent;
  doc["schedule_status"] = result.plan.provenance.schedule_status;
  doc["placement_status"] = result.plan.provenance.placement_status;
  doc["control_edges_added"] = result.control_edges_added;
  doc["timed_out"] = result.timed_out;
  doc["violations"] = report.violations.size();

  int code = kExitOk;
  if (flags.oracle) {
    memplan::Graph work = aligned;
    if (options.control_edges)
      work = memplan::enforce_early_weight_updates(aligned).graph;
    try {
      memplan::PeakWitness witness = memplan::enumerate_min_peak(work);
      bool agree = witness.min_peak == result.plan.timeline.peak_rs;
      std::cout << "oracle min peak_rs: " << witness.min_peak
                << (agree ? " (agrees)" : " (DISAGREES)") << "\n";
      doc["oracle_min_peak_rs"] = witness.min_peak;
      if (!agree) code = kExitSolver;
    } catch (const memplan::BudgetExceeded& e) {
      std::cout << "oracle skipped: " << e.what() << "\n";
    }
  }
  maybe_write_json(flags.json_out, doc);

  if (!report.ok()) return kExitInput;
  if (result.timed_out) return kExitTimeout;
  return code;
}

int cmd_validate(const std::string& plan_path, const std::string& graph_path,
                 std::uint64_t align, const std::string& json_out) {
  memplan::MemoryPlan plan = memplan::load_plan_file(plan_path);
  memplan::Graph graph = load_aligned(graph_path, align);
  memplan::ValidationReport report = memplan::validate_plan(plan, graph);
  std::cout << memplan::format_report(report);
  ordered_json doc;
  ordered_json violations = ordered_json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"tag", v.tag}, {"detail", v.detail}});
  doc["ok"] = report.ok();
  doc["violations"] = std::move(violations);
  maybe_write_json(json_out, doc);
  return report.ok() ? kExitOk : kExitInput;
}

int cmd_baseline(const std::string& input, const std::string& policy_name,
                 std::uint64_t align, const std::string& json_out) {
  memplan::Graph graph = load_aligned(input, align);
  memplan::FitPolicy policy = policy_name == "best_fit"
                                  ? memplan::FitPolicy::kBestFit
                                  : memplan::FitPolicy::kFirstFit;
  memplan::BaselineResult result =
      memplan::run_baseline(graph, program_order(graph), policy);
  std::cout << "policy: " << policy_name << "\n";
  std::cout << "mr_peak: " << result.mr_peak << "\n";
  std::cout << "rs_at_peak: " << result.rs_at_peak << "\n";
  std::cout << "fragmentation: " << fixed3(result.fragmentation) << "\n";
  ordered_json doc;
  doc["policy"] = policy_name;
  doc["mr_peak"] = result.mr_peak;
  doc["rs_at_peak"] = result.rs_at_peak;
  doc["fragmentation"] = result.fragmentation;
  maybe_write_json(json_out, doc);
  return kExitOk;
}

int cmd_export_lp(const std::string& input, const std::string& phase,
                  const std::string& out_path, const CommonFlags& flags) {
  memplan::Graph graph = load_aligned(input, flags.align);
  memplan::Graph work = graph;
  if (!flags.no_control_edges)
    work = memplan::enforce_early_weight_updates(graph).graph;
  memplan::EncodeOptions encode_options{!flags.no_pruning, !flags.no_pruning};

  memplan::MilpModel model;
  if (phase == "schedule") {
    model = memplan::encode_scheduling(work, memplan::compute_bounds(work),
                                       encode_options);
  } else if (phase == "address") {
    std::vector<memplan::NodeIndex> order = program_order(work);
    model = memplan::encode_addresses(
        work, memplan::lifetimes_from_order(work, order), {}, encode_options);
  } else {
    model = memplan::encode_joint(work, memplan::compute_bounds(work),
                                  encode_options);
  }
  write_output(out_path, memplan::write_lp(model));
  return kExitOk;
}

int cmd_gen(const std::string& kind, int layers, std::uint64_t size,
            std::uint64_t seed, const std::string& out_path) {
  memplan::GeneratorSpec spec;
  spec.kind = memplan::graph_kind_from_string(kind);
  spec.layers = layers;
  spec.size = size;
  spec.seed = seed;
  memplan::Graph graph = memplan::generate_graph(spec);
  write_output(out_path, memplan::save_graph(graph));
  return kExitOk;
}

int cmd_stats(const std::string& input, std::uint64_t align,
              const std::string& json_out) {
  memplan::Graph graph = load_aligned(input, align);
  std::vector<memplan::NodeIndex> order = program_order(graph);
  memplan::ResidentTimeline timeline = memplan::build_timeline(
      graph, memplan::matrices_from_order(graph, order));
  std::cout << "nodes: " << graph.num_nodes() << "\n";
  std::cout << "edges: " << graph.num_edges() << "\n";
  std::cout << "total_bytes: " << graph.total_bytes() << "\n";
  for (size_t t = 0; t < timeline.bytes.size(); ++t)
    std::cout << "t" << t + 1 << ": " << timeline.bytes[t] << "\n";
  std::cout << "peak_rs: " << timeline.peak_rs << "\n";
  std::cout << "peak_step: " << timeline.peak_step << "\n";
  ordered_json doc;
  doc["nodes"] = graph.num_nodes();
  doc["edges"] = graph.num_edges();
  doc["total_bytes"] = graph.total_bytes();
  doc["resident_bytes"] = timeline.bytes;
  doc["peak_rs"] = timeline.peak_rs;
  doc["peak_step"] = timeline.peak_step;
  maybe_write_json(json_out, doc);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"static memory planner for operator dataflow graphs"};
  app.require_subcommand(1);

  std::string input;
  std::string second_input;
  std::string out_path;
  std::string phase = "schedule";
  std::string policy = "first_fit";
  std::string kind = "chain";
  int layers = 1;
  std::uint64_t size = 8;
  std::uint64_t seed = 0;
  CommonFlags flags;

  CLI::App* analyze = app.add_subcommand("analyze", "lifetime windows");
  analyze->add_option("graph", input, "graph file")->required();
  analyze->add_option("--json-out", flags.json_out, "machine-readable report");

  CLI::App* schedule =
      app.add_subcommand("schedule", "minimize the resident-set peak");
  schedule->add_option("graph", input, "graph file")->required();
  add_solver_flags(schedule, &flags);
  schedule->add_flag("--no-control-edges", flags.no_control_edges,
                     "skip early-weight-update edges");
  schedule->add_flag("--oracle", flags.oracle,
                     "cross-check against exhaustive enumeration");
  schedule->add_option("--json-out", flags.json_out, "machine-readable report");

  CLI::App* place =
      app.add_subcommand("place", "assign offsets for the program order");
  place->add_option("graph", input, "graph file")->required();
  add_solver_flags(place, &flags);
  place->add_flag("--no-preplacement", flags.no_preplacement,
                  "skip pyramid pre-placement");
  place->add_flag("--oracle", flags.oracle,
                  "cross-check against exhaustive packing search");
  place->add_option("--json-out", flags.json_out, "machine-readable report");

  CLI::App* plan = app.add_subcommand("plan", "full planning pipeline");
  plan->add_option("graph", input, "graph file")->required();
  plan->add_option("-o,--out", out_path, "plan file to write");
  add_solver_flags(plan, &flags);
  CLI::Option* joint_flag =
      plan->add_flag("--joint", flags.joint, "solve one combined model");
  plan->add_flag("--split", flags.split, "solve order then addresses (default)")
      ->excludes(joint_flag);
  plan->add_flag("--no-control-edges", flags.no_control_edges,
                 "skip early-weight-update edges");
  plan->add_flag("--no-preplacement", flags.no_preplacement,
                 "skip pyramid pre-placement");
  plan->add_flag("--oracle", flags.oracle,
                 "cross-check against exhaustive enumeration");
  plan->add_option("--json-out", flags.json_out, "machine-readable report");

  CLI::App* validate = app.add_subcommand("validate", "check a plan file");
  validate->add_option("plan", input, "plan file")->required();
  validate->add_option("graph", second_input, "graph file")->required();
  validate->add_option("--align", flags.align, "size multiple the plan used")
      ->check(CLI::PositiveNumber);
  validate->add_option("--json-out", flags.json_out,
                       "machine-readable report");

  CLI::App* baseline =
      app.add_subcommand("baseline", "arena allocator fragmentation");
  baseline->add_option("graph", input, "graph file")->required();
  baseline->add_option("--policy", policy, "first_fit or best_fit")
      ->check(CLI::IsMember({"first_fit", "best_fit"}));
  baseline->add_option("--align", flags.align,
                       "round tensor sizes up to a multiple")
      ->check(CLI::PositiveNumber);
  baseline->add_option("--json-out", flags.json_out,
                       "machine-readable report");

  CLI::App* export_lp = app.add_subcommand("export-lp", "write a model file");
  export_lp->add_option("graph", input, "graph file")->required();
  export_lp->add_option("--phase", phase, "schedule, address or joint")
      ->check(CLI::IsMember({"schedule", "address", "joint"}));
  export_lp->add_option("-o,--out", out_path, "output path (default stdout)");
  export_lp->add_option("--align", flags.align,
                        "round tensor sizes up to a multiple")
      ->check(CLI::PositiveNumber);
  export_lp->add_flag("--no-control-edges", flags.no_control_edges,
                      "skip early-weight-update edges");
  export_lp->add_flag("--no-pruning", flags.no_pruning,
                      "keep window-forced variables in the model");

  CLI::App* gen = app.add_subcommand("gen", "generate a graph family member");
  gen->add_option("--kind", kind, "chain, fork_join or training_like")
      ->check(CLI::IsMember({"chain", "fork_join", "training_like"}));
  gen->add_option("--layers", layers, "layer count")->check(CLI::PositiveNumber);
  gen->add_option("--size", size, "base tensor size in bytes")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("-o,--out", out_path, "output path (default stdout)");

  CLI::App* stats = app.add_subcommand("stats", "program-order residency");
  stats->add_option("graph", input, "graph file")->required();
  stats->add_option("--align", flags.align,
                    "round tensor sizes up to a multiple")
      ->check(CLI::PositiveNumber);
  stats->add_option("--json-out", flags.json_out, "machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*analyze) return cmd_analyze(input, flags.json_out);
    if (*schedule) return cmd_schedule(input, flags);
    if (*place) return cmd_place(input, flags);
    if (*plan) return cmd_plan(input, out_path, flags);
    if (*validate)
      return cmd_validate(input, second_input, flags.align, flags.json_out);
    if (*baseline)
      return cmd_baseline(input, policy, flags.align, flags.json_out);
    if (*export_lp) return cmd_export_lp(input, phase, out_path, flags);
    if (*gen) return cmd_gen(kind, layers, size, seed, out_path);
    if (*stats) return cmd_stats(input, flags.align, flags.json_out);
  } catch (const memplan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
