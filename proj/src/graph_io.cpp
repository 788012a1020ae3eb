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

#include "memplan/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "memplan/errors.hpp"

namespace memplan {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const char* what,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) known = true;
    if (!known)
      throw ParseError(std::string(what) + " has unknown field '" + it.key() +
                       "'");
  }
}

const json& require(const json& obj, const char* key, const char* what) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(std::string(what) + " is missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const char* what) {
  const json& v = require(obj, key, what);
  if (!v.is_string())
    throw ParseError(std::string(what) + " field '" + key +
                     "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Graph load_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("graph file must be a JSON object");
  reject_unknown_keys(doc, "graph file", {"nodes", "edges"});

  const json& jnodes = require(doc, "nodes", "graph file");
  const json& jedges = require(doc, "edges", "graph file");
  if (!jnodes.is_array()) throw ParseError("'nodes' must be an array");
  if (!jedges.is_array()) throw ParseError("'edges' must be an array");

  std::vector<Node> nodes;
  nodes.reserve(jnodes.size());
  for (const json& jn : jnodes) {
    if (!jn.is_object()) throw ParseError("node entries must be objects");
    reject_unknown_keys(jn, "node", {"id", "role"});
    Node n;
    n.id = require_string(jn, "id", "node");
    if (jn.contains("role")) {
      if (!jn["role"].is_string())
        throw ParseError("node field 'role' must be a string");
      n.role = node_role_from_string(jn["role"].get<std::string>());
    }
    nodes.push_back(std::move(n));
  }

  std::vector<TensorEdge> edges;
  edges.reserve(jedges.size());
  for (const json& je : jedges) {
    if (!je.is_object()) throw ParseError("edge entries must be objects");
    reject_unknown_keys(je, "edge", {"id", "source", "sinks", "size", "kind"});
    TensorEdge te;
    te.id = require_string(je, "id", "edge");
    te.source = require_string(je, "source", "edge");
    const json& jsinks = require(je, "sinks", "edge");
    if (!jsinks.is_array())
      throw ParseError("edge '" + te.id + "': 'sinks' must be an array");
    for (const json& js : jsinks) {
      if (!js.is_string())
        throw ParseError("edge '" + te.id + "': sinks must be strings");
      te.sinks.push_back(js.get<std::string>());
    }
    const json& jsize = require(je, "size", "edge");
    if (!jsize.is_number_unsigned())
      throw ParseError("edge '" + te.id +
                       "': 'size' must be a non-negative integer");
    te.size = jsize.get<std::uint64_t>();
    if (je.contains("kind")) {
      if (!je["kind"].is_string())
        throw ParseError("edge field 'kind' must be a string");
      te.kind = edge_kind_from_string(je["kind"].get<std::string>());
    }
    edges.push_back(std::move(te));
  }

  return Graph::build(std::move(nodes), std::move(edges));
}

std::string save_graph(const Graph& graph) {
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  for (const Node& n : graph.nodes()) {
    ordered_json jn;
    jn["id"] = n.id;
    jn["role"] = to_string(n.role);
    doc["nodes"].push_back(std::move(jn));
  }
  doc["edges"] = ordered_json::array();
  for (const TensorEdge& te : graph.edges()) {
    ordered_json je;
    je["id"] = te.id;
    je["source"] = te.source;
    je["sinks"] = te.sinks;
    je["size"] = te.size;
    je["kind"] = to_string(te.kind);
    doc["edges"].push_back(std::move(je));
  }
  return doc.dump(2) + "\n";
}

Graph load_graph_file(const std::string& path) {
  return load_graph(read_text_file(path));
}

void save_graph_file(const Graph& graph, const std::string& path) {
  write_text_file(path, save_graph(graph));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write file '" + path + "'");
  out << text;
  if (!out.flush()) throw ParseError("failed writing file '" + path + "'");
}

}  // namespace memplan
