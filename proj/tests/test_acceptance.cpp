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
//
// Acceptance suite: one test case and one printed PASS/FAIL line per
// criterion. Checks aggregate into a single verdict so the line always
// prints, even when a sub-check throws.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "memplan/analysis.hpp"
#include "memplan/encode.hpp"
#include "memplan/generate.hpp"
#include "memplan/graph.hpp"
#include "memplan/graph_io.hpp"
#include "memplan/lp_format.hpp"
#include "memplan/milp.hpp"
#include "memplan/oracle.hpp"
#include "memplan/pipeline.hpp"
#include "memplan/placement.hpp"
#include "memplan/plan.hpp"
#include "memplan/schedule.hpp"
#include "memplan/solve.hpp"
#include "test_util.hpp"

using namespace memplan;

namespace {

// Pinned tolerances: structural counts and byte totals must match exactly;
// ratios quoted as percentages are compared against a fixed epsilon.
constexpr double kRatioTol = 1e-9;

void report(int idx, const char* label, bool ok) {
  std::printf("[criterion %d] %s: %s\n", idx, label, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion " << idx << " (" << label << ")");
}

Graph gen(GraphKind kind, int layers, std::uint64_t size, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.layers = layers;
  spec.size = size;
  spec.seed = seed;
  return generate_graph(spec);
}

// Deterministic mix of generated graphs small enough for the enumeration
// oracles (9 nodes at most): single and double fork-join stages, chains of
// several depths and sizes, and the one-layer training shape.
std::vector<Graph> oracle_battery() {
  std::vector<Graph> graphs;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    graphs.push_back(gen(GraphKind::kForkJoin, 1, 6, seed));
  for (std::uint64_t seed = 0; seed < 60; ++seed)
    graphs.push_back(gen(GraphKind::kForkJoin, 1, 9, 100 + seed));
  int kept = 0;
  for (std::uint64_t seed = 0; kept < 60 && seed < 1000; ++seed) {
    Graph g = gen(GraphKind::kForkJoin, 2, 5, seed);
    if (g.num_nodes() > 9) continue;
    graphs.push_back(std::move(g));
    ++kept;
  }
  for (int layers = 1; layers <= 8; ++layers)
    for (std::uint64_t size : {3, 7, 11})
      graphs.push_back(gen(GraphKind::kChain, layers, size, 0));
  for (std::uint64_t size : {4, 8, 16})
    graphs.push_back(gen(GraphKind::kTrainingLike, 1, size, 0));
  return graphs;
}

std::vector<Graph> fixture_graphs() {
  std::vector<Graph> graphs;
  for (const std::string& name : testutil::graph_fixture_names())
    graphs.push_back(testutil::load_fixture(name));
  return graphs;
}

std::vector<NodeIndex> iota_order(const Graph& g) {
  std::vector<NodeIndex> order(g.num_nodes());
  std::iota(order.begin(), order.end(), 0);
  return order;
}

bool tag_found(const ValidationReport& r, const std::string& tag) {
  for (const auto& v : r.violations)
    if (v.tag == tag) return true;
  return false;
}

std::string solution_text(const MilpModel& model, const Assignment& values) {
  const LpNames names = lp_names(model);
  std::string text;
  for (size_t i = 0; i < model.vars.size(); ++i)
    text += names.by_var[i] + " " +
            std::to_string(values.at(model.vars[i].name)) + "\n";
  return text;
}

}  // namespace

TEST_CASE("criterion 1") {
  bool ok = false;
  try {
    std::vector<Graph> graphs = oracle_battery();
    ok = graphs.size() >= 200;
    for (Graph& g : fixture_graphs()) graphs.push_back(std::move(g));
    for (const Graph& g : graphs) {
      SolveOutcome outcome = solve_schedule_exact(g);
      PeakWitness witness = enumerate_min_peak(g);
      ok = ok && outcome.status == SolveStatus::kOptimal &&
           outcome.objective ==
               static_cast<std::int64_t>(witness.min_peak);
    }
  } catch (...) {
    ok = false;
  }
  report(1, "schedule optimum equals the enumeration oracle", ok);
}

TEST_CASE("criterion 2") {
  bool ok = false;
  try {
    std::vector<Graph> graphs = fixture_graphs();
    for (std::uint64_t seed = 0; seed < 100; ++seed)
      graphs.push_back(gen(GraphKind::kForkJoin, 1, 6, seed));
    for (int layers = 1; layers <= 8; ++layers)
      for (std::uint64_t size : {3, 7, 11})
        graphs.push_back(gen(GraphKind::kChain, layers, size, 0));
    ok = graphs.size() >= 100;
    for (const Graph& g : graphs) {
      PlanResult result = plan_graph(g);
      ok = ok && result.plan.peak_mem == result.plan.timeline.peak_rs &&
           validate_plan(result.plan, g).ok();
    }
  } catch (...) {
    ok = false;
  }
  report(2, "plans reserve no byte beyond the resident-set peak", ok);
}

TEST_CASE("criterion 3") {
  bool ok = false;
  try {
    std::vector<Graph> graphs = fixture_graphs();
    for (std::uint64_t seed = 0; seed < 50; ++seed)
      graphs.push_back(gen(GraphKind::kForkJoin, 1, 6, seed));
    graphs.push_back(gen(GraphKind::kTrainingLike, 1, 8, 0));
    ok = true;
    for (const Graph& g : graphs) {
      PlannerOptions joint;
      joint.joint = true;
      ok = ok &&
           plan_graph(g, joint).plan.peak_mem == plan_graph(g).plan.peak_mem;
    }
  } catch (...) {
    ok = false;
  }
  report(3, "joint and split formulations reach the same peak", ok);
}

TEST_CASE("criterion 4") {
  bool ok = false;
  try {
    ok = true;
    for (const Graph& g : fixture_graphs()) {
      PlannerOptions bare;
      bare.control_edges = false;
      bare.preplacement = false;
      bare.pruning = false;
      ok = ok &&
           plan_graph(g, bare).plan.peak_mem == plan_graph(g).plan.peak_mem;
    }
  } catch (...) {
    ok = false;
  }
  report(4, "window pinning, pair filtering, control edges and "
            "pre-placement preserve the optimum", ok);
}

TEST_CASE("criterion 5") {
  bool ok = false;
  try {
    std::vector<Graph> graphs = oracle_battery();
    for (Graph& g : fixture_graphs()) graphs.push_back(std::move(g));
    ok = true;
    for (const Graph& g : graphs) {
      const std::int64_t law = 2LL * g.num_edges() * g.num_nodes();
      MilpModel pruned = encode_scheduling(g, compute_bounds(g), {true, true});
      MilpModel full = encode_scheduling(g, compute_bounds(g), {false, false});
      ok = ok && pruned.free_binaries + pruned.pinned_binaries == law &&
           full.free_binaries + full.pinned_binaries == law &&
           full.free_binaries == law;
    }
    for (int layers = 1; layers <= 8; ++layers) {
      Graph chain = gen(GraphKind::kChain, layers, 4, 0);
      MilpModel model =
          encode_scheduling(chain, compute_bounds(chain), {true, true});
      ok = ok && model.free_binaries == 0;
    }
  } catch (...) {
    ok = false;
  }
  report(5, "two binaries per edge and timestep, none free on chains", ok);
}

TEST_CASE("criterion 6") {
  bool ok = false;
  try {
    PlanResult order4 = plan_graph(testutil::load_fixture("order4.json"));
    ok = order4.plan.peak_mem == 21 && order4.program_order_peak == 30 &&
         std::abs(order4.savings_percent - 30.0) <= kRatioTol;
    const struct {
      int layers;
      std::uint64_t planned;
      std::uint64_t program;
    } frozen[] = {{2, 120, 136}, {3, 160, 200}, {4, 200, 264}};
    for (const auto& c : frozen) {
      PlanResult r = plan_graph(gen(GraphKind::kTrainingLike, c.layers, 8, 0));
      ok = ok && r.plan.timeline.peak_rs == c.planned &&
           r.program_order_peak == c.program &&
           r.plan.timeline.peak_rs < r.program_order_peak;
    }
  } catch (...) {
    ok = false;
  }
  report(6, "reordering beats program order by the frozen margins", ok);
}

TEST_CASE("criterion 7") {
  bool ok = false;
  try {
    Graph g = testutil::load_fixture("pack3.json");
    BaselineResult baseline =
        run_baseline(g, iota_order(g), FitPolicy::kFirstFit);
    PlanResult planned = plan_graph(g);
    double planner_frag =
        fragmentation(planned.plan.peak_mem, planned.plan.timeline.peak_rs);
    ok = std::abs(baseline.fragmentation - 0.2) <= kRatioTol &&
         planner_frag == 0.0;
  } catch (...) {
    ok = false;
  }
  report(7, "the arena baseline fragments pack3 while the planner does not",
         ok);
}

TEST_CASE("criterion 8") {
  bool ok = false;
  try {
    Graph g = testutil::load_fixture("training_mini.json");
    LifetimeBounds before = compute_bounds(g);
    ControlEdgeResult forced = enforce_early_weight_updates(g);
    LifetimeBounds after = compute_bounds(forced.graph);
    ok = !forced.added.empty();
    for (const TensorEdge& edge : forced.added) {
      NodeIndex v = g.node_index(edge.source);
      ok = ok && g.node(v).role == NodeRole::kWeightUpdate &&
           after.alap[forced.graph.node_index(edge.source)] < before.alap[v];
    }
    // Rebuilding the graph would have rejected a cycle; check explicitly.
    ok = ok && is_topological_order(forced.graph,
                                    topological_order(forced.graph));
    for (int layers = 1; layers <= 2; ++layers) {
      Graph t = gen(GraphKind::kTrainingLike, layers, 8, 0);
      PlannerOptions off;
      off.control_edges = false;
      ok = ok &&
           plan_graph(t).plan.peak_mem == plan_graph(t, off).plan.peak_mem;
    }
    ok = ok && plan_graph(g).plan.peak_mem == 80;
  } catch (...) {
    ok = false;
  }
  report(8, "forced weight updates tighten alap and keep the optimum", ok);
}

TEST_CASE("criterion 9") {
  bool ok = false;
  try {
    ok = true;
    for (const Graph& g : fixture_graphs()) {
      LifetimeBounds bounds = compute_bounds(g);
      std::vector<MilpModel> models;
      models.push_back(encode_scheduling(g, bounds, {true, true}));
      models.push_back(encode_scheduling(g, bounds, {false, false}));
      models.push_back(encode_joint(g, bounds, {true, true}));
      models.push_back(encode_addresses(
          g, lifetimes_from_order(g, iota_order(g)), {}, {true, true}));
      for (const MilpModel& model : models)
        ok = ok && models_isomorphic(model, parse_lp(write_lp(model)));
    }
    for (bool use_order4 : {false, true}) {
      Graph g = use_order4 ? testutil::make_order4() : testutil::make_chain3();
      MilpModel model = encode_scheduling(g, compute_bounds(g), {false, false});
      SolveOutcome internal = solve_schedule_exact(g);
      Assignment answer =
          schedule_assignment(g, matrices_from_order(g, internal.order));
      const std::string path = use_order4 ? "/tmp/memplan_acc_order4.sol"
                                          : "/tmp/memplan_acc_chain3.sol";
      write_text_file(path, solution_text(model, answer));
      SolveConfig config;
      config.solver_cmd = "cp " + path + " {sol}";
      SolveOutcome external = solve_external(model, config);
      ok = ok && external.status == SolveStatus::kOptimal &&
           external.objective == internal.objective;
    }
  } catch (...) {
    ok = false;
  }
  report(9, "models survive the LP bridge and a stub solver round trip", ok);
}

TEST_CASE("criterion 10") {
  bool ok = false;
  try {
    Graph g = testutil::make_chain3();
    MemoryPlan good = plan_graph(g).plan;
    ok = validate_plan(good, g).ok();

    MemoryPlan reordered = good;
    reordered.sequence.steps = {"v2", "v1", "v3"};
    reordered.sequence.timestep_of["v1"] = 2;
    reordered.sequence.timestep_of["v2"] = 1;
    ok = ok && tag_found(validate_plan(reordered, g), kTagFaninInMemory);

    MemoryPlan overlapped = good;
    overlapped.addresses.at("e2") = overlapped.addresses.at("e1");
    ok = ok && tag_found(validate_plan(overlapped, g), "below_above");

    MemoryPlan understated = good;
    understated.peak_mem = good.peak_mem - 1;
    ok = ok && tag_found(validate_plan(understated, g), kTagPeakAddress);

    MemoryPlan dropped = good;
    dropped.sequence.steps = {"v1", "v2"};
    dropped.sequence.timestep_of.erase("v3");
    ok = ok && tag_found(validate_plan(dropped, g), kTagCreateOnce);
  } catch (...) {
    ok = false;
  }
  report(10, "each tampered plan is pinned to its constraint family", ok);
}
