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

#ifndef MEMPLAN_SCHEDULE_HPP_
#define MEMPLAN_SCHEDULE_HPP_

#include <cstdint>
#include <vector>

#include "memplan/analysis.hpp"
#include "memplan/graph.hpp"

namespace memplan {

// Dense creation/preservation indicators over 1-based timesteps:
// create[e][t-1], preserve[e][t-1].
struct ScheduleMatrices {
  int horizon = 0;
  std::vector<std::vector<std::uint8_t>> create;
  std::vector<std::vector<std::uint8_t>> preserve;
};

// 1-based timestep of every node under `order` (one node per timestep).
// Throws InvalidOrder when `order` is not a topological order of the graph.
std::vector<int> positions_of(const Graph& graph,
                              const std::vector<NodeIndex>& order);

// Execution-sequence semantics shared by the solvers, the simulator and the
// plan builder: an edge is created at its source's timestep and stays
// resident through its last sink's timestep (through the final timestep for
// edges with no sinks).
std::vector<Interval> lifetimes_from_order(const Graph& graph,
                                           const std::vector<NodeIndex>& order);

// Indicator matrices for `order` with minimal preservation windows.
ScheduleMatrices matrices_from_order(const Graph& graph,
                                     const std::vector<NodeIndex>& order);

// Resident data bytes per timestep under `order`, and their maximum.
std::vector<std::uint64_t> resident_bytes_per_step(
    const Graph& graph, const std::vector<NodeIndex>& order);
std::uint64_t peak_resident_bytes(const Graph& graph,
                                  const std::vector<NodeIndex>& order);

}  // namespace memplan

#endif  // MEMPLAN_SCHEDULE_HPP_
