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

#ifndef MEMPLAN_ENCODE_HPP_
#define MEMPLAN_ENCODE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "memplan/analysis.hpp"
#include "memplan/graph.hpp"
#include "memplan/milp.hpp"
#include "memplan/schedule.hpp"

namespace memplan {

struct EncodeOptions {
  // Substitute out creation/preservation variables forced by the lifetime
  // windows (0 outside span/mul, 1 inside pres, plus the values those pins
  // force through create-once and live-or-preserved).
  bool prune_bounds = true;
  // Drop address pairs whose order is already decided by the graph.
  bool filter_pairs = true;
};

inline constexpr char kPeakNoFragVar[] = "peak_mem_no_frag";
inline constexpr char kPeakMemVar[] = "peak_mem";

std::string create_var_name(const std::string& edge_id, int t);
std::string preserve_var_name(const std::string& edge_id, int t);
std::string addr_var_name(const std::string& edge_id);
std::string below_var_name(const std::string& e1, const std::string& e2);
std::string above_var_name(const std::string& e1, const std::string& e2);

// Scheduling-only model: minimize the fragmentation-free peak (max over
// timesteps of resident bytes) subject to the creation/preservation rules.
MilpModel encode_scheduling(const Graph& graph, const LifetimeBounds& bounds,
                            const EncodeOptions& options = {});

// Address-only model over realized lifetimes (`lifetimes` indexed by edge):
// minimize the peak address subject to pairwise non-overlap for tensors
// whose lifetimes intersect. Entries of `preplaced` are fixed offsets
// substituted into the rows instead of free variables.
MilpModel encode_addresses(
    const Graph& graph, const std::vector<Interval>& lifetimes,
    const std::map<EdgeIndex, std::uint64_t>& preplaced,
    const EncodeOptions& options = {});

// Joint model: scheduling rules plus address variables linked through the
// timestep liveness rows; minimizes the peak address.
MilpModel encode_joint(const Graph& graph, const LifetimeBounds& bounds,
                       const EncodeOptions& options = {});

// Values of the model's creation/preservation variables (and the
// fragmentation-free peak when the model carries it) for the given
// indicator matrices. Throws Error when the matrices contradict a value the
// model pinned.
Assignment assignment_from_matrices(const MilpModel& model, const Graph& graph,
                                    const ScheduleMatrices& matrices);

// Model-free variant: values for every creation/preservation name plus the
// fragmentation-free peak. evaluate() ignores names a model does not
// declare, so this works against both pruned and unpruned models.
Assignment schedule_assignment(const Graph& graph,
                               const ScheduleMatrices& matrices);

// Reads the creation/preservation indicators back out of an assignment,
// falling back to the model's pinned values. Throws UnassignedVariable when
// a slot has neither.
ScheduleMatrices matrices_from_assignment(const MilpModel& model,
                                          const Graph& graph,
                                          const Assignment& assignment);

// Extends `assignment` with address-side values: offsets, pair order
// binaries, and the peak address variable.
void fill_address_assignment(const MilpModel& model, const Graph& graph,
                             const std::map<EdgeIndex, std::uint64_t>& addresses,
                             Assignment* assignment);

}  // namespace memplan

#endif  // MEMPLAN_ENCODE_HPP_
