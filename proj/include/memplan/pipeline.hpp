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

#ifndef MEMPLAN_PIPELINE_HPP_
#define MEMPLAN_PIPELINE_HPP_

#include <cstdint>

#include "memplan/graph.hpp"
#include "memplan/plan.hpp"
#include "memplan/solve.hpp"

namespace memplan {

struct PlannerOptions {
  // Solve order and addresses as one model instead of two phases. The
  // pyramid pre-placement only applies to the two-phase path.
  bool joint = false;
  bool control_edges = true;  // add early-weight-update ordering edges
  bool preplacement = true;   // stack nested lifetimes before the placer
  bool pruning = true;        // window substitution and pair filtering
  std::uint64_t align = 1;    // round tensor sizes up to a multiple
  SolveConfig solve;
};

struct PlanResult {
  MemoryPlan plan;
  // Resident-set peak of the program-order schedule on the input graph
  // (sizes aligned, no control edges), the baseline savings are quoted
  // against.
  std::uint64_t program_order_peak = 0;
  double savings_percent = 0.0;
  int control_edges_added = 0;
  // Some phase hit its time limit; the plan is the best one found.
  bool timed_out = false;
};

// Full planning pipeline: alignment, control edges, lifetime analysis,
// scheduling solve, pyramid pre-placement, address solve, plan assembly.
// Phases run internally when the instance fits the configured limits and
// through the external solver otherwise; a phase that times out falls back
// to its baseline answer (program order, greedy packing) and flags the
// result instead of failing.
PlanResult plan_graph(const Graph& graph, const PlannerOptions& options = {});

}  // namespace memplan

#endif  // MEMPLAN_PIPELINE_HPP_
