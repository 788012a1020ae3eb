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

#ifndef MEMPLAN_PLAN_HPP_
#define MEMPLAN_PLAN_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "memplan/graph.hpp"
#include "memplan/schedule.hpp"

namespace memplan {

struct ExecutionSequence {
  std::vector<std::string> steps;          // node ids, each exactly once
  std::map<std::string, int> timestep_of;  // 1-based creation timestep
};

// Reads the execution order off the creation matrix: iterates timesteps,
// emits each edge's source once (multi-output and multi-fanout nodes are
// deduplicated, first occurrence wins), orders nodes sharing a timestep by
// id, and appends nodes that create nothing at the end. Throws
// NonTopological when the result is not a topological order or when sibling
// outputs of one node carry different creation timesteps; either indicates
// an encoder or solver bug.
ExecutionSequence decode_sequence(const Graph& graph,
                                  const ScheduleMatrices& matrices);

struct ResidentTimeline {
  std::vector<std::vector<std::string>> live;  // edge ids live per timestep
  std::vector<std::uint64_t> bytes;            // data bytes per timestep
  std::uint64_t peak_rs = 0;
  int peak_step = 0;  // first timestep attaining the peak; 0 when empty
};

ResidentTimeline build_timeline(const Graph& graph,
                                const ScheduleMatrices& matrices);

// Live interval of every edge under the given creation timesteps: resident
// from the source's timestep through the last consumer's timestep, or
// through `horizon` for edges with no consumers. This is the liveness the
// validator holds plans to, independent of how long a solver chose to
// preserve tensors.
std::vector<Interval> realized_lifetimes(
    const Graph& graph, const std::map<std::string, int>& timestep_of,
    int horizon);

ResidentTimeline timeline_from_lifetimes(const Graph& graph,
                                         const std::vector<Interval>& lifetimes,
                                         int horizon);

struct PlanProvenance {
  std::string mode = "split";  // split | joint
  std::string schedule_status = "optimal";
  std::string placement_status = "optimal";
  bool control_edges = true;
  bool preplacement = true;
  bool pruning = true;
  double schedule_seconds = 0.0;
  double placement_seconds = 0.0;
};

// Addresses are offsets into one shared buffer; binding to an absolute base
// happens in map_allocation_request only.
struct MemoryPlan {
  ExecutionSequence sequence;
  std::map<std::string, std::uint64_t> addresses;  // data edge id to offset
  std::uint64_t peak_mem = 0;
  ResidentTimeline timeline;
  PlanProvenance provenance;
};

// Canonical plan file: fixed key order, two-space indentation, trailing
// newline. The timeline is stored as its byte totals only; per-step live
// sets are recomputable from the sequence.
std::string save_plan(const MemoryPlan& plan);

// Strict parse of save_plan output. Unknown or missing fields (notably
// peak_mem) raise ParseError; semantically broken plans load fine and are
// caught by validate_plan.
MemoryPlan load_plan(const std::string& text);

void save_plan_file(const MemoryPlan& plan, const std::string& path);
MemoryPlan load_plan_file(const std::string& path);

struct ValidationReport {
  struct Violation {
    std::string tag;  // constraint family the plan breaks
    std::string detail;
  };
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Post-hoc enforcement of everything the models promise: the sequence
// covers each node exactly once (create_once), consumers run strictly after
// producers including over control edges (fanin_in_memory), concurrently
// live data tensors never overlap in memory (below_above), every tensor
// fits under peak_mem (peak_address), and peak_mem covers the resident
// bytes of every timestep (peak_mem).
ValidationReport validate_plan(const MemoryPlan& plan, const Graph& graph);

// Plain-text table of the violations, one line each; "ok" when empty.
std::string format_report(const ValidationReport& report);

// Address for the k-th runtime allocation request: requests cycle through
// the execution sequence, so request k maps to the output tensor of
// sequence step k mod |V|. Requires every node to produce at most one data
// edge (MultiOutputUnsupported otherwise); steps without a data output
// raise NoOutputEdge.
std::uint64_t map_allocation_request(const MemoryPlan& plan,
                                     const Graph& graph, std::uint64_t k,
                                     std::uint64_t buffer_base);

}  // namespace memplan

#endif  // MEMPLAN_PLAN_HPP_
