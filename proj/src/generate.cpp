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

#include "memplan/generate.hpp"

#include <random>
#include <vector>

#include "memplan/errors.hpp"

namespace memplan {

const char* to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kChain:
      return "chain";
    case GraphKind::kForkJoin:
      return "fork_join";
    case GraphKind::kTrainingLike:
      return "training_like";
  }
  return "chain";
}

GraphKind graph_kind_from_string(const std::string& s) {
  if (s == "chain") return GraphKind::kChain;
  if (s == "fork_join") return GraphKind::kForkJoin;
  if (s == "training_like") return GraphKind::kTrainingLike;
  throw InvalidSpec("unknown graph kind '" + s + "'");
}

namespace {

Graph make_chain(const GeneratorSpec& spec) {
  std::vector<Node> nodes;
  std::vector<TensorEdge> edges;
  for (int i = 0; i <= spec.layers; ++i) {
    NodeRole role = NodeRole::kCompute;
    if (i == 0) role = NodeRole::kSource;
    if (i == spec.layers) role = NodeRole::kSinkOnly;
    nodes.push_back({"n" + std::to_string(i), role});
  }
  for (int i = 0; i < spec.layers; ++i) {
    edges.push_back({"t" + std::to_string(i), "n" + std::to_string(i),
                     {"n" + std::to_string(i + 1)}, spec.size,
                     EdgeKind::kData});
  }
  return Graph::build(std::move(nodes), std::move(edges));
}

Graph make_fork_join(const GeneratorSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  auto draw_size = [&]() {
    std::uniform_int_distribution<std::uint64_t> dist(
        std::max<std::uint64_t>(1, spec.size / 2), spec.size + spec.size / 2);
    return dist(rng);
  };
  std::vector<Node> nodes;
  std::vector<TensorEdge> edges;
  std::string prev_join;
  for (int d = 0; d < spec.layers; ++d) {
    std::string tag = std::to_string(d);
    std::string fork = "fork" + tag;
    nodes.push_back(
        {fork, d == 0 ? NodeRole::kSource : NodeRole::kCompute});
    if (d > 0) {
      // The feed edge from the previous join into this fork.
      edges.push_back({"link" + std::to_string(d - 1), prev_join, {fork},
                       draw_size(), EdgeKind::kData});
    }
    std::uniform_int_distribution<int> width_dist(2, 3);
    int width = width_dist(rng);
    std::string join = "join" + tag;
    for (int b = 0; b < width; ++b) {
      std::string branch = "b" + tag + "_" + std::to_string(b);
      nodes.push_back({branch, NodeRole::kCompute});
      edges.push_back({"f" + tag + "_" + std::to_string(b), fork, {branch},
                       draw_size(), EdgeKind::kData});
      edges.push_back({"j" + tag + "_" + std::to_string(b), branch, {join},
                       draw_size(), EdgeKind::kData});
    }
    nodes.push_back({join, NodeRole::kCompute});
    prev_join = join;
  }
  // Terminal output of the last join; no sinks, resident through the end.
  edges.push_back({"out", prev_join, {}, draw_size(), EdgeKind::kData});
  return Graph::build(std::move(nodes), std::move(edges));
}

Graph make_training_like(const GeneratorSpec& spec) {
  const std::uint64_t act = spec.size;
  // Weights and their gradients dwarf activations, so deferring the updates
  // is what actually costs memory.
  const std::uint64_t wt = 4 * spec.size;
  const int layers = spec.layers;
  auto num = [](const char* base, int i) {
    return std::string(base) + std::to_string(i);
  };

  std::vector<Node> nodes;
  std::vector<TensorEdge> edges;

  nodes.push_back({"x", NodeRole::kSource});
  for (int i = 1; i <= layers; ++i)
    nodes.push_back({num("w", i), NodeRole::kSource});
  for (int i = 1; i <= layers; ++i)
    nodes.push_back({num("fwd", i), NodeRole::kCompute});
  nodes.push_back({"loss", NodeRole::kCompute});
  for (int i = layers; i >= 1; --i)
    nodes.push_back({num("bwd", i), NodeRole::kCompute});
  nodes.push_back({"gnrm", NodeRole::kCompute});
  // Program order applies the gradients only after the whole backward pass,
  // which keeps every weight and weight gradient resident at once.
  for (int i = layers; i >= 1; --i)
    nodes.push_back({num("upd", i), NodeRole::kWeightUpdate});
  nodes.push_back({"gsink", NodeRole::kSinkOnly});

  // act_{i-1} feeds layer i's forward and is the activation stored for its
  // backward; act_layers feeds the loss.
  for (int i = 0; i <= layers; ++i) {
    TensorEdge te;
    te.id = num("act", i);
    te.source = i == 0 ? "x" : num("fwd", i);
    if (i < layers)
      te.sinks = {num("fwd", i + 1), num("bwd", i + 1)};
    else
      te.sinks = {"loss"};
    te.size = act;
    edges.push_back(std::move(te));
  }
  for (int i = 1; i <= layers; ++i)
    edges.push_back({num("wt", i), num("w", i),
                     {num("fwd", i), num("bwd", i), num("upd", i)}, wt,
                     EdgeKind::kData});
  edges.push_back({"lossv", "loss", {num("bwd", layers)}, act,
                   EdgeKind::kData});
  // gb_i carries layer i's gradient to both its weight update and the next
  // backward op (the input-gradient norm for the first layer).
  for (int i = layers; i >= 1; --i) {
    std::string next = i > 1 ? num("bwd", i - 1) : std::string("gnrm");
    edges.push_back({num("gb", i), num("bwd", i), {next, num("upd", i)}, wt,
                     EdgeKind::kData});
  }
  edges.push_back({"gn", "gnrm", {"gsink"}, act, EdgeKind::kData});

  return Graph::build(std::move(nodes), std::move(edges));
}

}  // namespace

Graph generate_graph(const GeneratorSpec& spec) {
  if (spec.layers < 1)
    throw InvalidSpec("layers must be >= 1, got " +
                      std::to_string(spec.layers));
  if (spec.size < 1) throw InvalidSpec("size must be >= 1");
  switch (spec.kind) {
    case GraphKind::kChain:
      return make_chain(spec);
    case GraphKind::kForkJoin:
      return make_fork_join(spec);
    case GraphKind::kTrainingLike:
      return make_training_like(spec);
  }
  throw InvalidSpec("unknown graph kind");
}

}  // namespace memplan
