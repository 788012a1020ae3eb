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

#include "memplan/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "memplan/errors.hpp"

namespace memplan {

namespace {

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

struct PeakSearch {
  const Graph& graph;
  std::int64_t states_left;
  std::vector<NodeIndex> id_order;     // node indexes sorted by id
  std::vector<int> executed;           // 0/1 per node
  std::vector<NodeIndex> prefix;
  std::uint64_t best = kInf;
  std::vector<NodeIndex> best_order;

  explicit PeakSearch(const Graph& g, std::int64_t budget)
      : graph(g), states_left(budget) {
    id_order.resize(g.num_nodes());
    std::iota(id_order.begin(), id_order.end(), 0);
    std::sort(id_order.begin(), id_order.end(),
              [&](NodeIndex a, NodeIndex b) {
                return g.node(a).id < g.node(b).id;
              });
    executed.assign(g.num_nodes(), 0);
  }

  bool ready(NodeIndex v) const {
    for (EdgeIndex f : graph.fanin(v))
      if (!executed[graph.source_of(f)]) return false;
    return true;
  }

  // Resident bytes while the next node runs: every edge already produced
  // whose last sink has not run yet, plus everything the node produces.
  std::uint64_t resident_with(NodeIndex v) const {
    std::uint64_t bytes = 0;
    for (int e = 0; e < graph.num_edges(); ++e) {
      NodeIndex src = graph.source_of(e);
      if (!executed[src] && src != v) continue;
      // v itself is not marked executed yet, so an edge v consumes or
      // produces still counts as resident here.
      const auto& sinks = graph.sinks_of(e);
      bool consumed = !sinks.empty();
      for (NodeIndex s : sinks)
        if (!executed[s]) consumed = false;
      if (!consumed) bytes += graph.edge(e).size;
    }
    return bytes;
  }

  void run(std::uint64_t peak_so_far) {
    if (--states_left < 0)
      throw BudgetExceeded("order enumeration exceeded its step budget");
    if (static_cast<int>(prefix.size()) == graph.num_nodes()) {
      if (peak_so_far < best) {
        best = peak_so_far;
        best_order = prefix;
      }
      return;
    }
    for (NodeIndex v : id_order) {
      if (executed[v] || !ready(v)) continue;
      std::uint64_t step = resident_with(v);
      executed[v] = 1;
      prefix.push_back(v);
      run(std::max(peak_so_far, step));
      prefix.pop_back();
      executed[v] = 0;
    }
  }
};

}  // namespace

PeakWitness enumerate_min_peak(const Graph& graph,
                               const OracleBudget& budget) {
  if (graph.num_nodes() > budget.max_nodes)
    throw BudgetExceeded("graph has " + std::to_string(graph.num_nodes()) +
                         " nodes, oracle cap is " +
                         std::to_string(budget.max_nodes));
  PeakSearch search(graph, budget.max_states);
  search.run(0);
  PeakWitness witness;
  witness.min_peak = search.best == kInf ? 0 : search.best;
  witness.order = search.best_order;
  return witness;
}

namespace {

struct PackSearch {
  const std::vector<Interval>& lifetimes;
  const std::vector<std::uint64_t>& sizes;
  std::uint64_t total;
  std::int64_t states_left;
  std::vector<std::uint64_t> offsets;
  std::vector<int> placed;
  std::uint64_t best = kInf;
  std::vector<std::uint64_t> best_offsets;

  PackSearch(const std::vector<Interval>& life,
             const std::vector<std::uint64_t>& size, std::int64_t budget)
      : lifetimes(life), sizes(size), states_left(budget) {
    total = 0;
    for (std::uint64_t s : size) total += s;
    offsets.assign(size.size(), 0);
    placed.assign(size.size(), 0);
  }

  bool fits(size_t u, std::uint64_t at) const {
    for (size_t w = 0; w < sizes.size(); ++w) {
      if (!placed[w] || sizes[w] == 0) continue;
      if (intervals_disjoint(lifetimes[u], lifetimes[w])) continue;
      if (at < offsets[w] + sizes[w] && offsets[w] < at + sizes[u])
        return false;
    }
    return true;
  }

  void run(size_t u, std::uint64_t peak_so_far) {
    while (u < sizes.size() && sizes[u] == 0) {
      placed[u] = 1;
      ++u;
    }
    if (u == sizes.size()) {
      if (peak_so_far < best) {
        best = peak_so_far;
        best_offsets = offsets;
      }
      return;
    }
    for (std::uint64_t at = 0; at + sizes[u] <= total; ++at) {
      // Offsets are tried low to high, so once the tensor's top reaches the
      // incumbent nothing above can improve on it. Every offset below it is
      // visited: where a tensor sits constrains the tensors placed later,
      // so no holes-in-the-run shortcut is sound.
      if (std::max(peak_so_far, at + sizes[u]) >= best) break;
      if (--states_left < 0)
        throw BudgetExceeded("offset enumeration exceeded its step budget");
      if (!fits(u, at)) continue;
      offsets[u] = at;
      placed[u] = 1;
      run(u + 1, std::max(peak_so_far, at + sizes[u]));
      placed[u] = 0;
    }
  }
};

}  // namespace

PackingWitness enumerate_min_packing(const std::vector<Interval>& lifetimes,
                                     const std::vector<std::uint64_t>& sizes,
                                     const OracleBudget& budget) {
  if (lifetimes.size() != sizes.size())
    throw Error("lifetime and size lists differ in length");
  int nonzero = 0;
  for (std::uint64_t s : sizes) nonzero += s > 0;
  if (nonzero > budget.max_tensors)
    throw BudgetExceeded("packing has " + std::to_string(nonzero) +
                         " tensors, oracle cap is " +
                         std::to_string(budget.max_tensors));
  PackSearch search(lifetimes, sizes, budget.max_states);
  search.run(0, 0);
  PackingWitness witness;
  if (search.best == kInf) {
    witness.min_peak = 0;
    witness.addresses.assign(sizes.size(), 0);
  } else {
    witness.min_peak = search.best;
    witness.addresses = search.best_offsets;
  }
  return witness;
}

}  // namespace memplan
