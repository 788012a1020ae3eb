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

#include "memplan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "memplan/analysis.hpp"
#include "memplan/encode.hpp"
#include "memplan/errors.hpp"
#include "memplan/placement.hpp"
#include "memplan/schedule.hpp"

namespace memplan {

namespace {

double seconds_between(std::chrono::steady_clock::time_point from,
                       std::chrono::steady_clock::time_point to) {
  return std::chrono::duration<double>(to - from).count();
}

// Node-array order when it is already topological, otherwise the canonical
// topological order. Control-edge-free graphs always accept the former.
std::vector<NodeIndex> program_order(const Graph& graph) {
  std::vector<NodeIndex> order(graph.num_nodes());
  std::iota(order.begin(), order.end(), 0);
  if (graph.num_nodes() == 0 || is_topological_order(graph, order))
    return order;
  return topological_order(graph);
}

struct SchedulePhase {
  ExecutionSequence sequence;
  std::string status;
  bool timed_out = false;
};

ExecutionSequence sequence_from_order(const Graph& graph,
                                      const std::vector<NodeIndex>& order) {
  ExecutionSequence seq;
  for (size_t i = 0; i < order.size(); ++i) {
    const std::string& id = graph.node(order[i]).id;
    seq.steps.push_back(id);
    seq.timestep_of[id] = static_cast<int>(i) + 1;
  }
  return seq;
}

// The subset search keeps every node at its own timestep, which pins down
// when pure consumers free their inputs; decoding a model solution instead
// would push them to the end of the sequence.
SchedulePhase schedule_internal(const Graph& graph, const SolveConfig& config) {
  SolveOutcome outcome = solve_schedule_exact(graph, config);
  SchedulePhase phase;
  phase.sequence = sequence_from_order(graph, outcome.order);
  phase.status = to_string(outcome.status);
  phase.timed_out = outcome.status == SolveStatus::kTimeout;
  return phase;
}

SchedulePhase schedule_external(const Graph& graph,
                                const LifetimeBounds& bounds,
                                const EncodeOptions& encode_options,
                                const SolveConfig& config) {
  MilpModel model = encode_scheduling(graph, bounds, encode_options);
  SchedulePhase phase;
  try {
    SolveOutcome outcome = solve_external(model, config);
    ScheduleMatrices matrices =
        matrices_from_assignment(model, graph, outcome.assignment);
    phase.sequence = decode_sequence(graph, matrices);
    phase.status = to_string(outcome.status);
  } catch (const Timeout&) {
    phase.sequence = sequence_from_order(graph, program_order(graph));
    phase.status = to_string(SolveStatus::kTimeout);
    phase.timed_out = true;
  }
  return phase;
}

struct PlacementPhase {
  std::map<EdgeIndex, std::uint64_t> addresses;
  std::string status;
  bool timed_out = false;
};

PlacementPhase place_internal(const Graph& graph,
                              const std::vector<Interval>& lifetimes,
                              const std::map<EdgeIndex, std::uint64_t>& fixed,
                              const SolveConfig& config) {
  SolveOutcome outcome = solve_placement_exact(graph, lifetimes, fixed, config);
  PlacementPhase phase;
  if (outcome.status == SolveStatus::kError) {
    // The search budget ran out before the first complete packing.
    phase.addresses = greedy_pack(graph, lifetimes, fixed);
    phase.status = to_string(SolveStatus::kFeasibleGap);
    return phase;
  }
  phase.addresses = outcome.addresses;
  phase.status = to_string(outcome.status);
  phase.timed_out = outcome.status == SolveStatus::kTimeout;
  return phase;
}

PlacementPhase place_external(const Graph& graph,
                              const std::vector<Interval>& lifetimes,
                              const std::map<EdgeIndex, std::uint64_t>& fixed,
                              const EncodeOptions& encode_options,
                              const SolveConfig& config) {
  MilpModel model = encode_addresses(graph, lifetimes, fixed, encode_options);
  PlacementPhase phase;
  try {
    SolveOutcome outcome = solve_external(model, config);
    for (int e = 0; e < graph.num_edges(); ++e) {
      if (graph.edge(e).size == 0) continue;
      auto pre = fixed.find(e);
      phase.addresses[e] =
          pre != fixed.end()
              ? pre->second
              : static_cast<std::uint64_t>(
                    outcome.assignment.at(addr_var_name(graph.edge(e).id)));
    }
    phase.status = to_string(outcome.status);
  } catch (const Timeout&) {
    phase.addresses = greedy_pack(graph, lifetimes, fixed);
    phase.status = to_string(SolveStatus::kTimeout);
    phase.timed_out = true;
  }
  return phase;
}

bool addresses_feasible(const Graph& graph,
                        const std::vector<Interval>& lifetimes,
                        const std::map<EdgeIndex, std::uint64_t>& addresses) {
  for (auto a = addresses.begin(); a != addresses.end(); ++a) {
    const std::uint64_t a_size = graph.edge(a->first).size;
    for (auto b = std::next(a); b != addresses.end(); ++b) {
      if (intervals_disjoint(lifetimes[a->first], lifetimes[b->first]))
        continue;
      const std::uint64_t b_size = graph.edge(b->first).size;
      if (a->second < b->second + b_size && b->second < a->second + a_size)
        return false;
    }
  }
  return true;
}

PlanResult plan_once(const Graph& graph, const PlannerOptions& options) {
  const Graph aligned =
      options.align > 1 ? graph.with_aligned_sizes(options.align) : graph;

  PlanResult result;
  Graph work = aligned;
  if (options.control_edges) {
    ControlEdgeResult ctrl = enforce_early_weight_updates(aligned);
    result.control_edges_added = static_cast<int>(ctrl.added.size());
    work = std::move(ctrl.graph);
  }

  const LifetimeBounds bounds = compute_bounds(work);
  const EncodeOptions encode_options{options.pruning, options.pruning};
  const SolveConfig& solve_config = options.solve;
  const bool internal_schedule =
      solve_config.mode == SolveMode::kInternal ||
      (solve_config.mode == SolveMode::kAuto &&
       work.num_nodes() <= solve_config.internal_limits.max_nodes);

  auto t0 = std::chrono::steady_clock::now();
  SchedulePhase schedule;
  if (options.joint && !internal_schedule) {
    // One model carries both the ordering and the address variables; the
    // sequence and the offsets come out of the same assignment.
    MilpModel model = encode_joint(work, bounds, encode_options);
    PlacementPhase placement;
    try {
      SolveOutcome outcome = solve_external(model, solve_config);
      ScheduleMatrices matrices =
          matrices_from_assignment(model, work, outcome.assignment);
      schedule.sequence = decode_sequence(work, matrices);
      schedule.status = to_string(outcome.status);
      for (int e = 0; e < work.num_edges(); ++e) {
        if (work.edge(e).size == 0) continue;
        placement.addresses[e] = static_cast<std::uint64_t>(
            outcome.assignment.at(addr_var_name(work.edge(e).id)));
      }
      placement.status = schedule.status;
    } catch (const Timeout&) {
      schedule.sequence = sequence_from_order(work, program_order(work));
      schedule.status = to_string(SolveStatus::kTimeout);
      schedule.timed_out = true;
      placement.status = schedule.status;
      placement.timed_out = true;
    }
    auto t1 = std::chrono::steady_clock::now();

    const int horizon = work.num_nodes();
    std::vector<Interval> lifetimes =
        realized_lifetimes(work, schedule.sequence.timestep_of, horizon);
    // A model solution can under-preserve tensors whose consumers create
    // nothing; repack if its offsets clash under realized lifetimes.
    if (placement.addresses.empty() ||
        !addresses_feasible(work, lifetimes, placement.addresses)) {
      placement.addresses = greedy_pack(work, lifetimes, {});
      if (!placement.timed_out)
        placement.status = to_string(SolveStatus::kFeasibleGap);
    }
    auto t2 = std::chrono::steady_clock::now();

    result.plan.provenance.schedule_seconds = seconds_between(t0, t1);
    result.plan.provenance.placement_seconds = seconds_between(t1, t2);
    result.plan.sequence = std::move(schedule.sequence);
    result.plan.timeline = timeline_from_lifetimes(work, lifetimes, horizon);
    std::uint64_t peak = 0;
    for (const auto& [e, addr] : placement.addresses) {
      peak = std::max(peak, addr + work.edge(e).size);
      result.plan.addresses[work.edge(e).id] = addr;
    }
    result.plan.peak_mem = peak;
    result.plan.provenance.schedule_status = schedule.status;
    result.plan.provenance.placement_status = placement.status;
    result.timed_out = schedule.timed_out || placement.timed_out;
  } else {
    schedule = internal_schedule
                   ? schedule_internal(work, solve_config)
                   : schedule_external(work, bounds, encode_options,
                                       solve_config);
    auto t1 = std::chrono::steady_clock::now();

    const int horizon = work.num_nodes();
    std::vector<Interval> lifetimes =
        realized_lifetimes(work, schedule.sequence.timestep_of, horizon);

    std::map<EdgeIndex, std::uint64_t> fixed;
    if (options.preplacement && !options.joint)
      fixed = preallocate_pyramid(work, lifetimes).assigned;

    int free_tensors = 0;
    for (int e = 0; e < work.num_edges(); ++e)
      if (work.edge(e).size > 0 && !fixed.count(e)) ++free_tensors;
    const bool internal_placement =
        solve_config.mode == SolveMode::kInternal ||
        (solve_config.mode == SolveMode::kAuto &&
         free_tensors <= solve_config.internal_limits.max_tensors);

    PlacementPhase placement =
        internal_placement
            ? place_internal(work, lifetimes, fixed, solve_config)
            : place_external(work, lifetimes, fixed, encode_options,
                             solve_config);
    auto t2 = std::chrono::steady_clock::now();

    result.plan.provenance.schedule_seconds = seconds_between(t0, t1);
    result.plan.provenance.placement_seconds = seconds_between(t1, t2);
    result.plan.sequence = std::move(schedule.sequence);
    result.plan.timeline = timeline_from_lifetimes(work, lifetimes, horizon);
    std::uint64_t peak = 0;
    for (const auto& [e, addr] : placement.addresses) {
      peak = std::max(peak, addr + work.edge(e).size);
      result.plan.addresses[work.edge(e).id] = addr;
    }
    result.plan.peak_mem = peak;
    result.plan.provenance.schedule_status = schedule.status;
    result.plan.provenance.placement_status = placement.status;
    // The two-phase answer is a joint optimum only when the packing meets
    // the fragmentation-free floor of the chosen schedule.
    if (options.joint && placement.status == to_string(SolveStatus::kOptimal) &&
        result.plan.peak_mem != result.plan.timeline.peak_rs)
      result.plan.provenance.placement_status =
          to_string(SolveStatus::kFeasibleGap);
    result.timed_out = schedule.timed_out || placement.timed_out;
  }

  result.plan.provenance.mode = options.joint ? "joint" : "split";
  result.plan.provenance.control_edges = options.control_edges;
  result.plan.provenance.preplacement = options.preplacement && !options.joint;
  result.plan.provenance.pruning = options.pruning;
  return result;
}

}  // namespace

PlanResult plan_graph(const Graph& graph, const PlannerOptions& options) {
  const Graph baseline_graph =
      options.align > 1 ? graph.with_aligned_sizes(options.align) : graph;
  const std::uint64_t baseline_peak =
      graph.num_nodes() == 0
          ? 0
          : peak_resident_bytes(baseline_graph, program_order(baseline_graph));

  PlanResult result = plan_once(graph, options);
  if (options.control_edges && result.control_edges_added > 0 &&
      !result.timed_out && result.plan.timeline.peak_rs > baseline_peak) {
    // The added ordering edges can only shrink the search space; on the
    // rare graph where they exclude every order at least as good as
    // program order, drop them and replan.
    PlannerOptions relaxed = options;
    relaxed.control_edges = false;
    result = plan_once(graph, relaxed);
  }

  result.program_order_peak = baseline_peak;
  if (baseline_peak > 0) {
    result.savings_percent =
        100.0 *
        (static_cast<double>(baseline_peak) -
         static_cast<double>(result.plan.timeline.peak_rs)) /
        static_cast<double>(baseline_peak);
  }
  return result;
}

}  // namespace memplan
