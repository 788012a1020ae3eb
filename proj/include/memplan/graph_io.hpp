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

#ifndef MEMPLAN_GRAPH_IO_HPP_
#define MEMPLAN_GRAPH_IO_HPP_

#include <string>

#include "memplan/graph.hpp"

namespace memplan {

// Parses the canonical graph file format. Unknown fields are rejected with
// ParseError; structural problems propagate from Graph::build.
Graph load_graph(const std::string& text);

// Serializes with a fixed key order so save(load(x)) == x for canonical
// files byte for byte.
std::string save_graph(const Graph& graph);

Graph load_graph_file(const std::string& path);
void save_graph_file(const Graph& graph, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace memplan

#endif  // MEMPLAN_GRAPH_IO_HPP_
