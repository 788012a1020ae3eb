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

#ifndef MEMPLAN_ANALYSIS_HPP_
#define MEMPLAN_ANALYSIS_HPP_

#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "memplan/graph.hpp"

namespace memplan {

// Closed 1-based timestep interval; lo > hi means empty.
struct Interval {
  int lo = 1;
  int hi = 0;
  bool empty() const { return lo > hi; }
  bool contains(int t) const { return lo <= t && t <= hi; }
};

inline bool intervals_disjoint(const Interval& a, const Interval& b) {
  return a.empty() || b.empty() || a.hi < b.lo || b.hi < a.lo;
}

struct LevelInfo {
  std::vector<int> forward;   // longest edge count from any source, per node
  std::vector<int> backward;  // longest edge count to any terminal, per node
};

LevelInfo compute_levels(const Graph& graph);

// Earliest/latest timesteps over the horizon n = |V|, with the windows the
// scheduler may pin from:
//   span(v) = [asap(v), alap(v)]           creation window of v's outputs
//   mul(e)  = [asap(src), max alap(sink)]  outside it e cannot be resident
//   pres(e) = [alap(src)+1, max asap(sink)] inside it e must be preserved
// Edges with no sinks take n as the sink maximum (resident through the end).
struct LifetimeBounds {
  int horizon = 0;
  std::vector<int> asap;        // per node
  std::vector<int> alap;        // per node
  std::vector<Interval> span;   // per node
  std::vector<Interval> mul;    // per edge
  std::vector<Interval> pres;   // per edge
};

LifetimeBounds compute_bounds(const Graph& graph);

// Memoized ancestor queries. Not safe for concurrent use; confine one
// instance to one task.
class ReachabilityCache {
 public:
  explicit ReachabilityCache(const Graph& graph) : graph_(graph) {}

  // True iff `ancestor` is in the transitive fanin of `v` (a proper
  // ancestor; reaches(v, v) is false on a DAG). Caches hits and misses.
  bool reaches(NodeIndex ancestor, NodeIndex v);

 private:
  const Graph& graph_;
  std::unordered_map<std::uint64_t, bool> memo_;
};

// True when e1's lifetime provably ends before e2's can begin: either their
// mul windows are disjoint, or every sink of e1 is an ancestor of src(e2)
// and the two edges share no endpoint vertex. Edges without sinks never
// precede anything through the second rule.
bool edge_precedes(const Graph& graph, const LifetimeBounds& bounds,
                   EdgeIndex e1, EdgeIndex e2, ReachabilityCache* cache);

struct ControlEdgeResult {
  Graph graph;                    // input graph plus the added control edges
  std::vector<TensorEdge> added;  // in insertion order
};

// For every weight_update node, searches the fanin cone's descendants for an
// anchor with a strictly greater forward level and the greatest backward
// level, then adds a zero-size control edge update -> anchor so the update
// cannot be scheduled after the anchor. Nodes with no valid anchor are left
// alone. Ties between equal backward levels keep the lowest node id.
ControlEdgeResult enforce_early_weight_updates(const Graph& graph);

}  // namespace memplan

#endif  // MEMPLAN_ANALYSIS_HPP_
