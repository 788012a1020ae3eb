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

#ifndef MEMPLAN_GRAPH_HPP_
#define MEMPLAN_GRAPH_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace memplan {

enum class NodeRole {
  kCompute,
  kWeightUpdate,
  kSource,
  kSinkOnly,
};

enum class EdgeKind {
  kData,
  kControl,
};

const char* to_string(NodeRole role);
const char* to_string(EdgeKind kind);
NodeRole node_role_from_string(const std::string& s);
EdgeKind edge_kind_from_string(const std::string& s);

struct Node {
  std::string id;
  NodeRole role = NodeRole::kCompute;
};

// A tensor produced once by `source` and consumed by every node in `sinks`.
// An empty sink set marks a terminal output that stays resident through the
// final timestep. Control edges carry no bytes and only constrain order.
struct TensorEdge {
  std::string id;
  std::string source;
  std::vector<std::string> sinks;
  std::uint64_t size = 0;
  EdgeKind kind = EdgeKind::kData;
};

using NodeIndex = int;
using EdgeIndex = int;

// Immutable operator dataflow graph. Node vector order is program order.
class Graph {
 public:
  // Validates and indexes the graph. Throws DuplicateId, DanglingEndpoint,
  // ControlEdgeWithSize, CycleDetected (with one offending cycle listed),
  // or InvalidStructure (zero-size data edge, source node with fanin,
  // duplicate sink within one edge).
  static Graph build(std::vector<Node> nodes, std::vector<TensorEdge> edges);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Node& node(NodeIndex v) const { return nodes_[v]; }
  const TensorEdge& edge(EdgeIndex e) const { return edges_[e]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<TensorEdge>& edges() const { return edges_; }

  // Index lookups throw DanglingEndpoint when the id is unknown.
  NodeIndex node_index(const std::string& id) const;
  EdgeIndex edge_index(const std::string& id) const;
  bool has_node(const std::string& id) const;
  bool has_edge(const std::string& id) const;

  NodeIndex source_of(EdgeIndex e) const { return edge_source_[e]; }
  const std::vector<NodeIndex>& sinks_of(EdgeIndex e) const {
    return edge_sinks_[e];
  }

  // Edges consumed / produced by v, in edge declaration order.
  const std::vector<EdgeIndex>& fanin(NodeIndex v) const { return fanin_[v]; }
  const std::vector<EdgeIndex>& fanout(NodeIndex v) const {
    return fanout_[v];
  }

  // Sum of data edge sizes; the address-space big-M.
  std::uint64_t total_bytes() const { return total_bytes_; }

  // Copy of this graph with extra edges appended; re-validates.
  Graph with_edges(std::vector<TensorEdge> extra) const;

  // Copy with every data edge size rounded up to a multiple of `align`
  // (power of two).
  Graph with_aligned_sizes(std::uint64_t align) const;

 private:
  Graph() = default;

  std::vector<Node> nodes_;
  std::vector<TensorEdge> edges_;
  std::unordered_map<std::string, NodeIndex> node_index_;
  std::unordered_map<std::string, EdgeIndex> edge_index_;
  std::vector<NodeIndex> edge_source_;
  std::vector<std::vector<NodeIndex>> edge_sinks_;
  std::vector<std::vector<EdgeIndex>> fanin_;
  std::vector<std::vector<EdgeIndex>> fanout_;
  std::uint64_t total_bytes_ = 0;
};

// True when `order` contains every node exactly once and every edge points
// forward (each sink strictly after the edge's source).
bool is_topological_order(const Graph& graph,
                          const std::vector<NodeIndex>& order);

// Node indexes in program order filtered to topological validity; the graph
// is validated acyclic at build time, so program order itself may or may not
// be topological. Returns a Kahn order breaking ties by program position.
std::vector<NodeIndex> topological_order(const Graph& graph);

}  // namespace memplan

#endif  // MEMPLAN_GRAPH_HPP_
