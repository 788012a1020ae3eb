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

#ifndef MEMPLAN_PLACEMENT_HPP_
#define MEMPLAN_PLACEMENT_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "memplan/analysis.hpp"
#include "memplan/graph.hpp"

namespace memplan {

struct PrePlacement {
  std::map<EdgeIndex, std::uint64_t> assigned;
  std::vector<EdgeIndex> remaining;  // data edges left for the placer
  std::uint64_t reserved_base = 0;   // bytes consumed by the stack
};

// Stacks tensors with nested lifetimes at fixed low addresses before the
// placer runs. Repeatedly picks the longest-lived data tensor whose lifetime
// fits strictly inside the current window, assigns it the next base address,
// and tightens the window to that lifetime. Duration ties prefer the larger
// tensor, then the smaller edge id.
PrePlacement preallocate_pyramid(const Graph& graph,
                                 const std::vector<Interval>& lifetimes);

enum class FitPolicy { kFirstFit, kBestFit };

struct BaselineResult {
  std::uint64_t mr_peak = 0;     // allocator high-water mark
  std::uint64_t rs_at_peak = 0;  // live bytes when the high-water mark is set
  double fragmentation = 0.0;    // (mr_peak - rs_at_peak) / mr_peak
};

// Simulates a free-list arena allocator over the given execution order:
// each tensor is allocated when its producer runs and freed at the start of
// the timestep after its last sink runs; blocks split on allocate and
// coalesce on free; the arena grows at the top when nothing fits. This is
// the fragmentation the planner is measured against.
// Throws InvalidOrder when `order` is not topological.
BaselineResult run_baseline(const Graph& graph,
                            const std::vector<NodeIndex>& order,
                            FitPolicy policy = FitPolicy::kFirstFit);

// (mr - rs) / mr, with 0/0 defined as 0.
double fragmentation(std::uint64_t mr, std::uint64_t rs);

// Lowest-feasible-offset packing in edge order; used as the fallback when
// an exact placement is unavailable. Returns offsets for the data edges
// absent from `preplaced`, merged with the preplaced entries.
std::map<EdgeIndex, std::uint64_t> greedy_pack(
    const Graph& graph, const std::vector<Interval>& lifetimes,
    const std::map<EdgeIndex, std::uint64_t>& preplaced);

}  // namespace memplan

#endif  // MEMPLAN_PLACEMENT_HPP_
