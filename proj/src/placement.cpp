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

#include "memplan/placement.hpp"

#include <algorithm>
#include <limits>

#include "memplan/errors.hpp"
#include "memplan/schedule.hpp"

namespace memplan {

PrePlacement preallocate_pyramid(const Graph& graph,
                                 const std::vector<Interval>& lifetimes) {
  PrePlacement result;
  std::vector<char> taken(graph.num_edges(), 0);
  std::int64_t min_start = 0;
  std::int64_t max_end = std::numeric_limits<std::int64_t>::max();
  while (max_end > min_start) {
    int pick = -1;
    for (int e = 0; e < graph.num_edges(); ++e) {
      if (taken[e] || graph.edge(e).size == 0) continue;
      const Interval& life = lifetimes[e];
      if (life.lo <= min_start || life.hi >= max_end) continue;
      if (pick < 0) {
        pick = e;
        continue;
      }
      const Interval& best = lifetimes[pick];
      int d_new = life.hi - life.lo;
      int d_old = best.hi - best.lo;
      if (d_new != d_old) {
        if (d_new > d_old) pick = e;
      } else if (graph.edge(e).size != graph.edge(pick).size) {
        if (graph.edge(e).size > graph.edge(pick).size) pick = e;
      } else if (graph.edge(e).id < graph.edge(pick).id) {
        pick = e;
      }
    }
    if (pick < 0) break;
    taken[pick] = 1;
    result.assigned[pick] = result.reserved_base;
    result.reserved_base += graph.edge(pick).size;
    min_start = lifetimes[pick].lo;
    max_end = lifetimes[pick].hi;
  }
  for (int e = 0; e < graph.num_edges(); ++e)
    if (!taken[e] && graph.edge(e).size > 0) result.remaining.push_back(e);
  return result;
}

double fragmentation(std::uint64_t mr, std::uint64_t rs) {
  if (mr == 0) return 0.0;
  return static_cast<double>(mr - rs) / static_cast<double>(mr);
}

namespace {

struct Block {
  std::uint64_t addr = 0;
  std::uint64_t size = 0;
  bool free = true;
  EdgeIndex edge = -1;
};

// Free-list arena: blocks are contiguous and address-sorted at all times.
class Arena {
 public:
  std::uint64_t allocate(EdgeIndex edge, std::uint64_t size,
                         FitPolicy policy) {
    int pick = -1;
    for (size_t b = 0; b < blocks_.size(); ++b) {
      if (!blocks_[b].free || blocks_[b].size < size) continue;
      if (policy == FitPolicy::kFirstFit) {
        pick = static_cast<int>(b);
        break;
      }
      if (pick < 0 || blocks_[b].size < blocks_[pick].size)
        pick = static_cast<int>(b);
    }
    if (pick < 0) return grow(edge, size);
    Block& block = blocks_[pick];
    std::uint64_t addr = block.addr;
    if (block.size > size) {
      Block rest{addr + size, block.size - size, true, -1};
      block.size = size;
      blocks_.insert(blocks_.begin() + pick + 1, rest);
    }
    blocks_[pick].free = false;
    blocks_[pick].edge = edge;
    return addr;
  }

  void release(EdgeIndex edge) {
    for (size_t b = 0; b < blocks_.size(); ++b) {
      if (blocks_[b].free || blocks_[b].edge != edge) continue;
      blocks_[b].free = true;
      blocks_[b].edge = -1;
      coalesce(b);
      return;
    }
  }

  std::uint64_t top() const {
    return blocks_.empty() ? 0 : blocks_.back().addr + blocks_.back().size;
  }

 private:
  std::uint64_t grow(EdgeIndex edge, std::uint64_t size) {
    // Extend a trailing free block rather than stranding it.
    if (!blocks_.empty() && blocks_.back().free) {
      Block& last = blocks_.back();
      last.size = size;
      last.free = false;
      last.edge = edge;
      return last.addr;
    }
    blocks_.push_back({top(), size, false, edge});
    return blocks_.back().addr;
  }

  void coalesce(size_t b) {
    if (b + 1 < blocks_.size() && blocks_[b + 1].free) {
      blocks_[b].size += blocks_[b + 1].size;
      blocks_.erase(blocks_.begin() + b + 1);
    }
    if (b > 0 && blocks_[b - 1].free) {
      blocks_[b - 1].size += blocks_[b].size;
      blocks_.erase(blocks_.begin() + b);
    }
  }

  std::vector<Block> blocks_;
};

}  // namespace

BaselineResult run_baseline(const Graph& graph,
                            const std::vector<NodeIndex>& order,
                            FitPolicy policy) {
  const std::vector<Interval> lifetimes = lifetimes_from_order(graph, order);
  // Data edges grouped by the timestep whose start frees them.
  std::vector<std::vector<EdgeIndex>> frees(graph.num_nodes() + 2);
  for (int e = 0; e < graph.num_edges(); ++e)
    if (graph.edge(e).size > 0) frees[lifetimes[e].hi + 1].push_back(e);

  Arena arena;
  BaselineResult result;
  std::uint64_t live = 0;
  for (int t = 1; t <= graph.num_nodes(); ++t) {
    for (EdgeIndex e : frees[t]) {
      arena.release(e);
      live -= graph.edge(e).size;
    }
    NodeIndex v = order[t - 1];
    for (EdgeIndex e : graph.fanout(v)) {
      if (graph.edge(e).size == 0) continue;
      arena.allocate(e, graph.edge(e).size, policy);
      live += graph.edge(e).size;
      if (arena.top() > result.mr_peak) {
        result.mr_peak = arena.top();
        result.rs_at_peak = live;
      }
    }
  }
  result.fragmentation = fragmentation(result.mr_peak, result.rs_at_peak);
  return result;
}

std::map<EdgeIndex, std::uint64_t> greedy_pack(
    const Graph& graph, const std::vector<Interval>& lifetimes,
    const std::map<EdgeIndex, std::uint64_t>& preplaced) {
  std::map<EdgeIndex, std::uint64_t> placed = preplaced;
  for (int e = 0; e < graph.num_edges(); ++e) {
    if (graph.edge(e).size == 0 || placed.count(e)) continue;
    std::uint64_t at = 0;
    bool moved = true;
    while (moved) {
      moved = false;
      for (const auto& [w, w_addr] : placed) {
        if (intervals_disjoint(lifetimes[e], lifetimes[w])) continue;
        std::uint64_t w_top = w_addr + graph.edge(w).size;
        if (at < w_top && w_addr < at + graph.edge(e).size) {
          at = w_top;
          moved = true;
        }
      }
    }
    placed[e] = at;
  }
  return placed;
}

}  // namespace memplan
