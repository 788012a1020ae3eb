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

#ifndef MEMPLAN_GENERATE_HPP_
#define MEMPLAN_GENERATE_HPP_

#include <cstdint>
#include <string>

#include "memplan/graph.hpp"

namespace memplan {

enum class GraphKind {
  kChain,
  kForkJoin,
  kTrainingLike,
};

const char* to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& s);

struct GeneratorSpec {
  GraphKind kind = GraphKind::kChain;
  int layers = 1;
  std::uint64_t size = 8;
  std::uint64_t seed = 0;
};

// Deterministic family generators; the same spec always yields the same
// graph. chain: layers edges of exactly `size` bytes. fork_join: chained
// fork/join diamonds, branch count and sizes drawn from the seed.
// training_like: per layer a forward op (previous activation + weight) and a
// backward op whose gradient output feeds both the next backward step and a
// weight_update; program order applies every update at the very end.
// Throws InvalidSpec for layers < 1 or size < 1.
Graph generate_graph(const GeneratorSpec& spec);

}  // namespace memplan

#endif  // MEMPLAN_GENERATE_HPP_
