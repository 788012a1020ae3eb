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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "memplan/errors.hpp"
#include "memplan/generate.hpp"
#include "memplan/graph.hpp"
#include "memplan/graph_io.hpp"
#include "test_util.hpp"

using namespace memplan;
using testutil::data_edge;

TEST_CASE("a chain indexes fanin and fanout per node") {
  Graph g = testutil::make_chain3();
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.total_bytes() == 6);

  NodeIndex v2 = g.node_index("v2");
  REQUIRE(g.fanin(v2).size() == 1);
  CHECK(g.edge(g.fanin(v2)[0]).id == "e1");
  REQUIRE(g.fanout(v2).size() == 1);
  CHECK(g.edge(g.fanout(v2)[0]).id == "e2");

  EdgeIndex e1 = g.edge_index("e1");
  CHECK(g.source_of(e1) == g.node_index("v1"));
  REQUIRE(g.sinks_of(e1).size() == 1);
  CHECK(g.sinks_of(e1)[0] == v2);
  CHECK(g.fanin(g.node_index("v1")).empty());
  CHECK(g.fanout(g.node_index("v3")).empty());
  CHECK(g.has_node("v1"));
  CHECK_FALSE(g.has_node("v9"));
  CHECK_THROWS_AS((void)g.node_index("v9"), DanglingEndpoint);
  CHECK_THROWS_AS((void)g.edge_index("e9"), DanglingEndpoint);
}

TEST_CASE("construction rejects malformed graphs") {
  std::vector<Node> ab = {{"a", NodeRole::kCompute},
                          {"b", NodeRole::kCompute}};

  CHECK_THROWS_AS(Graph::build(ab, {data_edge("e1", "a", {"b"}, 1),
                                    data_edge("e2", "b", {"a"}, 1)}),
                  CycleDetected);
  CHECK_THROWS_AS(Graph::build(ab, {data_edge("e1", "a", {"z"}, 1)}),
                  DanglingEndpoint);
  CHECK_THROWS_AS(Graph::build(ab, {data_edge("e1", "z", {"b"}, 1)}),
                  DanglingEndpoint);
  CHECK_THROWS_AS(Graph::build({{"a", NodeRole::kCompute},
                                {"a", NodeRole::kCompute}},
                               {}),
                  DuplicateId);
  CHECK_THROWS_AS(Graph::build(ab, {data_edge("e1", "a", {"b"}, 1),
                                    data_edge("e1", "a", {"b"}, 1)}),
                  DuplicateId);
  CHECK_THROWS_AS(
      Graph::build(ab, {{"c1", "a", {"b"}, 3, EdgeKind::kControl}}),
      ControlEdgeWithSize);
  // Zero-size data edge, source with fanin, duplicate sink in one edge.
  CHECK_THROWS_AS(Graph::build(ab, {data_edge("e1", "a", {"b"}, 0)}),
                  InvalidStructure);
  CHECK_THROWS_AS(Graph::build({{"a", NodeRole::kCompute},
                                {"s", NodeRole::kSource}},
                               {data_edge("e1", "a", {"s"}, 1)}),
                  InvalidStructure);
  CHECK_THROWS_AS(Graph::build(ab, {data_edge("e1", "a", {"b", "b"}, 1)}),
                  InvalidStructure);
}

TEST_CASE("canonical files round trip byte for byte") {
  for (const std::string& name : testutil::graph_fixture_names()) {
    CAPTURE(name);
    const std::string text = testutil::fixture_text(name);
    CHECK(save_graph(load_graph(text)) == text);
  }
}

TEST_CASE("the parser rejects broken input") {
  CHECK_THROWS_AS(load_graph("not json"), ParseError);
  CHECK_THROWS_AS(load_graph("{}"), ParseError);

  const std::string negative_size = R"({
  "nodes": [
    {"id": "a", "role": "source"},
    {"id": "b", "role": "compute"}
  ],
  "edges": [
    {"id": "e1", "source": "a", "sinks": ["b"], "size": -1, "kind": "data"}
  ]
})";
  CHECK_THROWS_AS(load_graph(negative_size), ParseError);

  const std::string unknown_field = R"({
  "nodes": [
    {"id": "a", "role": "source", "color": "red"}
  ],
  "edges": []
})";
  CHECK_THROWS_AS(load_graph(unknown_field), ParseError);

  const std::string unknown_role = R"({
  "nodes": [
    {"id": "a", "role": "chef"}
  ],
  "edges": []
})";
  CHECK_THROWS_AS(load_graph(unknown_role), ParseError);
}

TEST_CASE("size alignment rounds data edges up and control edges not at all") {
  Graph g = testutil::make_chain3().with_aligned_sizes(8);
  CHECK(g.edge(g.edge_index("e1")).size == 8);
  CHECK(g.edge(g.edge_index("e2")).size == 8);
  CHECK(g.total_bytes() == 16);

  Graph ctrl = testutil::load_fixture("training_mini_ctrl.json");
  Graph aligned = ctrl.with_aligned_sizes(16);
  CHECK(aligned.edge(aligned.edge_index("ctrl_upd1_gsink")).size == 0);
  CHECK(aligned.edge(aligned.edge_index("act0")).size == 16);
  CHECK(aligned.edge(aligned.edge_index("wt1")).size == 32);
}

TEST_CASE("with_edges appends and re-validates") {
  Graph g = testutil::make_chain3();
  Graph extended =
      g.with_edges({{"c1", "v1", {"v3"}, 0, EdgeKind::kControl}});
  CHECK(extended.num_edges() == 3);
  CHECK(g.num_edges() == 2);  // the original is untouched
  // A control edge against the data flow closes a cycle.
  CHECK_THROWS_AS(
      (void)extended.with_edges({{"c2", "v3", {"v2"}, 0, EdgeKind::kControl}}),
      CycleDetected);
}

TEST_CASE("topological order helpers") {
  Graph g = testutil::make_order4();
  // Program order of this fixture is already topological (the bad order).
  std::vector<NodeIndex> program(4);
  std::iota(program.begin(), program.end(), 0);
  CHECK(is_topological_order(g, program));

  std::vector<NodeIndex> good = {g.node_index("v1"), g.node_index("v2"),
                                 g.node_index("v3"), g.node_index("v4")};
  CHECK(is_topological_order(g, good));
  std::vector<NodeIndex> reversed(program.rbegin(), program.rend());
  CHECK_FALSE(is_topological_order(g, reversed));
  CHECK_FALSE(is_topological_order(g, {0, 1, 2}));     // missing a node
  CHECK_FALSE(is_topological_order(g, {0, 1, 1, 3}));  // duplicate

  // Kahn ties break toward the earlier program position, v3 before v2 here.
  CHECK(topological_order(g) == program);

  // Node order v2 before its producer: program order is not topological,
  // but a valid order still comes back.
  Graph shuffled = Graph::build({{"v2", NodeRole::kCompute},
                                 {"v1", NodeRole::kSource}},
                                {data_edge("e1", "v1", {"v2"}, 4),
                                 data_edge("e2", "v2", {}, 2)});
  CHECK_FALSE(is_topological_order(shuffled, {0, 1}));
  CHECK(topological_order(shuffled) ==
        std::vector<NodeIndex>{shuffled.node_index("v1"),
                               shuffled.node_index("v2")});
}

TEST_CASE("generators are deterministic and well formed") {
  for (GraphKind kind :
       {GraphKind::kChain, GraphKind::kForkJoin, GraphKind::kTrainingLike}) {
    CAPTURE(to_string(kind));
    GeneratorSpec spec;
    spec.kind = kind;
    spec.layers = 2;
    spec.size = 8;
    spec.seed = 7;
    CHECK(save_graph(generate_graph(spec)) ==
          save_graph(generate_graph(spec)));
  }

  GeneratorSpec chain;
  chain.kind = GraphKind::kChain;
  chain.layers = 3;
  chain.size = 4;
  Graph g = generate_graph(chain);
  CHECK(g.num_nodes() == 4);
  CHECK(g.num_edges() == 3);
  for (const TensorEdge& e : g.edges()) CHECK(e.size == 4);

  GeneratorSpec bad;
  bad.layers = 0;
  CHECK_THROWS_AS(generate_graph(bad), InvalidSpec);
  bad.layers = 1;
  bad.size = 0;
  CHECK_THROWS_AS(generate_graph(bad), InvalidSpec);
}

TEST_CASE("generated program orders are topological") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (GraphKind kind :
         {GraphKind::kChain, GraphKind::kForkJoin, GraphKind::kTrainingLike}) {
      GeneratorSpec spec;
      spec.kind = kind;
      spec.layers = 1 + static_cast<int>(seed % 3);
      spec.size = 8;
      spec.seed = seed;
      Graph g = generate_graph(spec);
      std::vector<NodeIndex> program(g.num_nodes());
      std::iota(program.begin(), program.end(), 0);
      CAPTURE(to_string(kind));
      CAPTURE(seed);
      CHECK(is_topological_order(g, program));
    }
  }
}

TEST_CASE("training graphs defer one weight update per layer") {
  for (int layers = 1; layers <= 4; ++layers) {
    GeneratorSpec spec;
    spec.kind = GraphKind::kTrainingLike;
    spec.layers = layers;
    spec.size = 8;
    Graph g = generate_graph(spec);
    CAPTURE(layers);
    CHECK(g.num_nodes() == 4 * layers + 4);
    int updates = 0;
    for (const Node& n : g.nodes())
      updates += n.role == NodeRole::kWeightUpdate;
    CHECK(updates == layers);
    // Single-output property: the allocation-request mapping depends on it.
    for (NodeIndex v = 0; v < g.num_nodes(); ++v)
      CHECK(g.fanout(v).size() <= 1);
  }

  Graph mini = testutil::load_fixture("training_mini.json");
  CHECK(mini.num_nodes() == 8);
  CHECK(mini.num_edges() == 6);
  int updates = 0;
  for (const Node& n : mini.nodes())
    updates += n.role == NodeRole::kWeightUpdate;
  CHECK(updates == 1);
}
