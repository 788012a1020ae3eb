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

#include "memplan/schedule.hpp"

#include <algorithm>

#include "memplan/errors.hpp"

namespace memplan {

std::vector<int> positions_of(const Graph& graph,
                              const std::vector<NodeIndex>& order) {
  if (!is_topological_order(graph, order))
    throw InvalidOrder("sequence is not a topological order of the graph");
  std::vector<int> pos(graph.num_nodes(), 0);
  for (size_t i = 0; i < order.size(); ++i)
    pos[order[i]] = static_cast<int>(i) + 1;
  return pos;
}

std::vector<Interval> lifetimes_from_order(
    const Graph& graph, const std::vector<NodeIndex>& order) {
  const std::vector<int> pos = positions_of(graph, order);
  const int n = graph.num_nodes();
  std::vector<Interval> lifetimes(graph.num_edges());
  for (int e = 0; e < graph.num_edges(); ++e) {
    Interval& life = lifetimes[e];
    life.lo = pos[graph.source_of(e)];
    life.hi = life.lo;
    const auto& sinks = graph.sinks_of(e);
    if (sinks.empty()) {
      life.hi = n;
    } else {
      for (NodeIndex s : sinks) life.hi = std::max(life.hi, pos[s]);
    }
  }
  return lifetimes;
}

ScheduleMatrices matrices_from_order(const Graph& graph,
                                     const std::vector<NodeIndex>& order) {
  const std::vector<Interval> lifetimes = lifetimes_from_order(graph, order);
  ScheduleMatrices m;
  m.horizon = graph.num_nodes();
  m.create.assign(graph.num_edges(),
                  std::vector<std::uint8_t>(m.horizon, 0));
  m.preserve.assign(graph.num_edges(),
                    std::vector<std::uint8_t>(m.horizon, 0));
  for (int e = 0; e < graph.num_edges(); ++e) {
    const Interval& life = lifetimes[e];
    m.create[e][life.lo - 1] = 1;
    for (int t = life.lo + 1; t <= life.hi; ++t) m.preserve[e][t - 1] = 1;
  }
  return m;
}

std::vector<std::uint64_t> resident_bytes_per_step(
    const Graph& graph, const std::vector<NodeIndex>& order) {
  const std::vector<Interval> lifetimes = lifetimes_from_order(graph, order);
  std::vector<std::uint64_t> resident(graph.num_nodes(), 0);
  for (int e = 0; e < graph.num_edges(); ++e) {
    const Interval& life = lifetimes[e];
    for (int t = life.lo; t <= life.hi; ++t)
      resident[t - 1] += graph.edge(e).size;
  }
  return resident;
}

std::uint64_t peak_resident_bytes(const Graph& graph,
                                  const std::vector<NodeIndex>& order) {
  const std::vector<std::uint64_t> resident =
      resident_bytes_per_step(graph, order);
  std::uint64_t peak = 0;
  for (std::uint64_t bytes : resident) peak = std::max(peak, bytes);
  return peak;
}

}  // namespace memplan
