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

#include "memplan/graph.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "memplan/errors.hpp"

namespace memplan {

const char* to_string(NodeRole role) {
  switch (role) {
    case NodeRole::kCompute:
      return "compute";
    case NodeRole::kWeightUpdate:
      return "weight_update";
    case NodeRole::kSource:
      return "source";
    case NodeRole::kSinkOnly:
      return "sink_only";
  }
  return "compute";
}

const char* to_string(EdgeKind kind) {
  return kind == EdgeKind::kControl ? "control" : "data";
}

NodeRole node_role_from_string(const std::string& s) {
  if (s == "compute") return NodeRole::kCompute;
  if (s == "weight_update") return NodeRole::kWeightUpdate;
  if (s == "source") return NodeRole::kSource;
  if (s == "sink_only") return NodeRole::kSinkOnly;
  throw ParseError("unknown node role '" + s + "'");
}

EdgeKind edge_kind_from_string(const std::string& s) {
  if (s == "data") return EdgeKind::kData;
  if (s == "control") return EdgeKind::kControl;
  throw ParseError("unknown edge kind '" + s + "'");
}

namespace {

// Depth-first cycle search; fills `cycle` with the node ids of one cycle.
bool find_cycle(const Graph& g, std::vector<std::string>* cycle);

}  // namespace

Graph Graph::build(std::vector<Node> nodes, std::vector<TensorEdge> edges) {
  Graph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);

  for (int v = 0; v < g.num_nodes(); ++v) {
    const auto& id = g.nodes_[v].id;
    if (id.empty()) throw InvalidStructure("node with empty id");
    if (!g.node_index_.emplace(id, v).second)
      throw DuplicateId("node id '" + id + "' declared twice");
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& id = g.edges_[e].id;
    if (id.empty()) throw InvalidStructure("edge with empty id");
    if (!g.edge_index_.emplace(id, e).second)
      throw DuplicateId("edge id '" + id + "' declared twice");
  }

  g.fanin_.resize(g.num_nodes());
  g.fanout_.resize(g.num_nodes());
  g.edge_source_.resize(g.num_edges());
  g.edge_sinks_.resize(g.num_edges());

  for (int e = 0; e < g.num_edges(); ++e) {
    const TensorEdge& te = g.edges_[e];
    if (te.kind == EdgeKind::kControl && te.size != 0)
      throw ControlEdgeWithSize("control edge '" + te.id + "' has size " +
                                std::to_string(te.size));
    if (te.kind == EdgeKind::kData && te.size == 0)
      throw InvalidStructure("data edge '" + te.id + "' has size 0");

    auto src = g.node_index_.find(te.source);
    if (src == g.node_index_.end())
      throw DanglingEndpoint("edge '" + te.id + "' has unknown source '" +
                             te.source + "'");
    g.edge_source_[e] = src->second;
    g.fanout_[src->second].push_back(e);

    std::unordered_set<NodeIndex> seen;
    for (const auto& sink_id : te.sinks) {
      auto snk = g.node_index_.find(sink_id);
      if (snk == g.node_index_.end())
        throw DanglingEndpoint("edge '" + te.id + "' has unknown sink '" +
                               sink_id + "'");
      if (!seen.insert(snk->second).second)
        throw InvalidStructure("edge '" + te.id + "' lists sink '" + sink_id +
                               "' twice");
      g.edge_sinks_[e].push_back(snk->second);
      g.fanin_[snk->second].push_back(e);
    }
  }

  for (int v = 0; v < g.num_nodes(); ++v) {
    if (g.nodes_[v].role == NodeRole::kSource && !g.fanin_[v].empty())
      throw InvalidStructure("source node '" + g.nodes_[v].id +
                             "' has fanin edges");
  }

  std::uint64_t total = 0;
  constexpr std::uint64_t kByteCap = std::uint64_t{1} << 62;
  for (const TensorEdge& te : g.edges_) {
    if (te.size >= kByteCap || total + te.size >= kByteCap)
      throw InvalidStructure("total tensor bytes exceed the supported range");
    total += te.size;
  }
  g.total_bytes_ = total;

  std::vector<std::string> cycle;
  if (find_cycle(g, &cycle)) {
    std::string msg = "cycle: ";
    for (size_t i = 0; i < cycle.size(); ++i) {
      if (i) msg += " -> ";
      msg += cycle[i];
    }
    throw CycleDetected(msg);
  }
  return g;
}

namespace {

bool find_cycle(const Graph& g, std::vector<std::string>* cycle) {
  enum : char { kWhite, kGrey, kBlack };
  std::vector<char> color(g.num_nodes(), kWhite);
  // Explicit stack of (node, next fanout edge slot, next sink slot).
  struct Frame {
    NodeIndex v;
    size_t edge_pos = 0;
    size_t sink_pos = 0;
  };
  for (int root = 0; root < g.num_nodes(); ++root) {
    if (color[root] != kWhite) continue;
    std::vector<Frame> stack{{root}};
    color[root] = kGrey;
    while (!stack.empty()) {
      Frame& f = stack.back();
      bool descended = false;
      while (f.edge_pos < g.fanout(f.v).size()) {
        EdgeIndex e = g.fanout(f.v)[f.edge_pos];
        const auto& sinks = g.sinks_of(e);
        if (f.sink_pos >= sinks.size()) {
          ++f.edge_pos;
          f.sink_pos = 0;
          continue;
        }
        NodeIndex next = sinks[f.sink_pos++];
        if (color[next] == kGrey) {
          // Unwind the stack to report the cycle next .. back to next.
          std::vector<std::string> ids;
          size_t at = stack.size();
          while (at > 0 && stack[at - 1].v != next) --at;
          for (size_t i = at - 1; i < stack.size(); ++i)
            ids.push_back(g.node(stack[i].v).id);
          ids.push_back(g.node(next).id);
          *cycle = std::move(ids);
          return true;
        }
        if (color[next] == kWhite) {
          color[next] = kGrey;
          stack.push_back({next});
          descended = true;
          break;
        }
      }
      if (!descended && stack.back().edge_pos >= g.fanout(stack.back().v).size()) {
        color[stack.back().v] = kBlack;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace

NodeIndex Graph::node_index(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end())
    throw DanglingEndpoint("unknown node id '" + id + "'");
  return it->second;
}

EdgeIndex Graph::edge_index(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end())
    throw DanglingEndpoint("unknown edge id '" + id + "'");
  return it->second;
}

bool Graph::has_node(const std::string& id) const {
  return node_index_.count(id) != 0;
}

bool Graph::has_edge(const std::string& id) const {
  return edge_index_.count(id) != 0;
}

Graph Graph::with_edges(std::vector<TensorEdge> extra) const {
  std::vector<TensorEdge> all = edges_;
  for (auto& te : extra) all.push_back(std::move(te));
  return build(nodes_, std::move(all));
}

Graph Graph::with_aligned_sizes(std::uint64_t align) const {
  if (align == 0 || (align & (align - 1)) != 0)
    throw InvalidStructure("alignment must be a power of two, got " +
                           std::to_string(align));
  std::vector<TensorEdge> aligned = edges_;
  for (TensorEdge& te : aligned) {
    if (te.kind == EdgeKind::kData)
      te.size = (te.size + align - 1) & ~(align - 1);
  }
  return build(nodes_, std::move(aligned));
}

bool is_topological_order(const Graph& graph,
                          const std::vector<NodeIndex>& order) {
  if (static_cast<int>(order.size()) != graph.num_nodes()) return false;
  std::vector<int> pos(graph.num_nodes(), -1);
  for (size_t i = 0; i < order.size(); ++i) {
    NodeIndex v = order[i];
    if (v < 0 || v >= graph.num_nodes() || pos[v] != -1) return false;
    pos[v] = static_cast<int>(i);
  }
  for (int e = 0; e < graph.num_edges(); ++e) {
    int src = pos[graph.source_of(e)];
    for (NodeIndex s : graph.sinks_of(e))
      if (pos[s] <= src) return false;
  }
  return true;
}

std::vector<NodeIndex> topological_order(const Graph& graph) {
  std::vector<int> missing(graph.num_nodes(), 0);
  for (int e = 0; e < graph.num_edges(); ++e)
    for (NodeIndex s : graph.sinks_of(e)) ++missing[s];
  // Kahn's algorithm; the ready list stays sorted by program position.
  std::vector<NodeIndex> ready;
  for (int v = 0; v < graph.num_nodes(); ++v)
    if (missing[v] == 0) ready.push_back(v);
  std::vector<NodeIndex> order;
  order.reserve(graph.num_nodes());
  while (!ready.empty()) {
    NodeIndex v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (EdgeIndex e : graph.fanout(v)) {
      for (NodeIndex s : graph.sinks_of(e)) {
        if (--missing[s] == 0) {
          auto at = std::lower_bound(ready.begin(), ready.end(), s);
          ready.insert(at, s);
        }
      }
    }
  }
  return order;
}

}  // namespace memplan
