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

#include "memplan/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "memplan/errors.hpp"

namespace memplan {

LevelInfo compute_levels(const Graph& graph) {
  LevelInfo info;
  info.forward.assign(graph.num_nodes(), 0);
  info.backward.assign(graph.num_nodes(), 0);
  std::vector<NodeIndex> order = topological_order(graph);
  for (NodeIndex v : order) {
    for (EdgeIndex e : graph.fanin(v)) {
      NodeIndex src = graph.source_of(e);
      info.forward[v] = std::max(info.forward[v], info.forward[src] + 1);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeIndex v = *it;
    for (EdgeIndex e : graph.fanout(v)) {
      for (NodeIndex s : graph.sinks_of(e))
        info.backward[v] = std::max(info.backward[v], info.backward[s] + 1);
    }
  }
  return info;
}

LifetimeBounds compute_bounds(const Graph& graph) {
  LevelInfo levels = compute_levels(graph);
  LifetimeBounds b;
  const int n = graph.num_nodes();
  b.horizon = n;
  b.asap.resize(n);
  b.alap.resize(n);
  b.span.resize(n);
  for (int v = 0; v < n; ++v) {
    b.asap[v] = 1 + levels.forward[v];
    b.alap[v] = n - levels.backward[v];
    b.span[v] = {b.asap[v], b.alap[v]};
  }
  b.mul.resize(graph.num_edges());
  b.pres.resize(graph.num_edges());
  for (int e = 0; e < graph.num_edges(); ++e) {
    NodeIndex src = graph.source_of(e);
    int max_alap = n;
    int max_asap = n;
    if (!graph.sinks_of(e).empty()) {
      max_alap = 0;
      max_asap = 0;
      for (NodeIndex s : graph.sinks_of(e)) {
        max_alap = std::max(max_alap, b.alap[s]);
        max_asap = std::max(max_asap, b.asap[s]);
      }
    }
    b.mul[e] = {b.asap[src], max_alap};
    b.pres[e] = {b.alap[src] + 1, max_asap};
  }
  return b;
}

bool ReachabilityCache::reaches(NodeIndex ancestor, NodeIndex v) {
  if (ancestor == v) return false;
  const std::uint64_t key =
      static_cast<std::uint64_t>(ancestor) * graph_.num_nodes() + v;
  auto hit = memo_.find(key);
  if (hit != memo_.end()) return hit->second;
  bool found = false;
  for (EdgeIndex e : graph_.fanin(v)) {
    NodeIndex src = graph_.source_of(e);
    if (src == ancestor || reaches(ancestor, src)) {
      found = true;
      break;
    }
  }
  memo_.emplace(key, found);
  return found;
}

bool edge_precedes(const Graph& graph, const LifetimeBounds& bounds,
                   EdgeIndex e1, EdgeIndex e2, ReachabilityCache* cache) {
  if (intervals_disjoint(bounds.mul[e1], bounds.mul[e2])) return true;
  const auto& sinks1 = graph.sinks_of(e1);
  if (sinks1.empty()) return false;

  NodeIndex src2 = graph.source_of(e2);
  for (NodeIndex s : sinks1)
    if (!cache->reaches(s, src2)) return false;

  std::set<NodeIndex> ends1(sinks1.begin(), sinks1.end());
  ends1.insert(graph.source_of(e1));
  if (ends1.count(src2)) return false;
  for (NodeIndex s : graph.sinks_of(e2))
    if (ends1.count(s)) return false;
  return true;
}

namespace {

struct Candidate {
  std::optional<NodeIndex> anchor;
  int level = -1;
};

// Sink nodes of v's fanout edges, deduplicated and ordered by node id so
// that strict-improvement comparisons keep the lowest id on ties.
std::vector<NodeIndex> successors_by_id(const Graph& graph, NodeIndex v) {
  std::map<std::string, NodeIndex> by_id;
  for (EdgeIndex e : graph.fanout(v))
    for (NodeIndex s : graph.sinks_of(e)) by_id.emplace(graph.node(s).id, s);
  std::vector<NodeIndex> out;
  out.reserve(by_id.size());
  for (const auto& [id, s] : by_id) out.push_back(s);
  return out;
}

// Walks forward from v looking for the deepest-start anchor: a descendant
// whose forward level exceeds min_fwd_level, preferring the greatest
// backward level. Descendants at or below min_fwd_level are searched
// through; results are memoized in `visited` across the caller's rounds.
Candidate find_candidate(const Graph& graph, const LevelInfo& levels,
                         int min_fwd_level,
                         std::unordered_map<NodeIndex, Candidate>* visited,
                         NodeIndex v) {
  auto hit = visited->find(v);
  if (hit != visited->end()) return hit->second;
  Candidate best;
  for (NodeIndex snk : successors_by_id(graph, v)) {
    if (levels.backward[snk] <= best.level) continue;
    if (levels.forward[snk] <= min_fwd_level) {
      Candidate sub =
          find_candidate(graph, levels, min_fwd_level, visited, snk);
      if (sub.level > best.level) best = sub;
    } else {
      best = {snk, levels.backward[snk]};
    }
  }
  visited->emplace(v, best);
  return best;
}

}  // namespace

ControlEdgeResult enforce_early_weight_updates(const Graph& graph) {
  LevelInfo levels = compute_levels(graph);
  std::vector<TensorEdge> added;

  for (int v = 0; v < graph.num_nodes(); ++v) {
    if (graph.node(v).role != NodeRole::kWeightUpdate) continue;
    const int min_fwd_level = levels.forward[v];
    Candidate best;
    std::unordered_map<NodeIndex, Candidate> visited;
    std::set<std::string> start_ids{graph.node(v).id};

    while (!best.anchor && !start_ids.empty()) {
      // Replace the start set with the sources feeding it, then scan each
      // for the deepest anchor below it.
      std::set<std::string> next_ids;
      for (const std::string& id : start_ids)
        for (EdgeIndex e : graph.fanin(graph.node_index(id)))
          next_ids.insert(graph.node(graph.source_of(e)).id);
      start_ids = std::move(next_ids);
      for (const std::string& id : start_ids) {
        Candidate c = find_candidate(graph, levels, min_fwd_level, &visited,
                                     graph.node_index(id));
        if (c.level > best.level) best = c;
      }
    }

    if (best.anchor) {
      const std::string& anchor_id = graph.node(*best.anchor).id;
      std::string edge_id = "ctrl_" + graph.node(v).id + "_" + anchor_id;
      int suffix = 2;
      while (graph.has_edge(edge_id)) {
        edge_id = "ctrl_" + graph.node(v).id + "_" + anchor_id + "_" +
                  std::to_string(suffix++);
      }
      added.push_back({edge_id, graph.node(v).id, {anchor_id}, 0,
                       EdgeKind::kControl});
    }
  }

  ControlEdgeResult result{graph.with_edges(added), std::move(added)};
  return result;
}

}  // namespace memplan
