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

#include "memplan/plan.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"
#include "memplan/errors.hpp"
#include "memplan/graph_io.hpp"
#include "memplan/milp.hpp"

namespace memplan {

ExecutionSequence decode_sequence(const Graph& graph,
                                  const ScheduleMatrices& matrices) {
  // Every fanout edge of a node must report one and the same creation step.
  std::vector<int> created_at(graph.num_nodes(), 0);
  for (int e = 0; e < graph.num_edges(); ++e) {
    int step = 0;
    for (int t = 1; t <= matrices.horizon; ++t) {
      if (!matrices.create[e][t - 1]) continue;
      if (step != 0)
        throw NonTopological("edge " + graph.edge(e).id +
                             " is created more than once");
      step = t;
    }
    if (step == 0)
      throw NonTopological("edge " + graph.edge(e).id + " is never created");
    NodeIndex v = graph.source_of(e);
    if (created_at[v] != 0 && created_at[v] != step)
      throw NonTopological("outputs of node " + graph.node(v).id +
                           " are created at different timesteps");
    created_at[v] = step;
  }

  ExecutionSequence seq;
  std::set<std::string> emitted;
  for (int t = 1; t <= matrices.horizon; ++t) {
    std::set<std::string> at_step;  // id order within one timestep
    for (int v = 0; v < graph.num_nodes(); ++v)
      if (created_at[v] == t) at_step.insert(graph.node(v).id);
    for (const std::string& id : at_step) {
      if (!emitted.insert(id).second) continue;
      seq.steps.push_back(id);
      seq.timestep_of[id] = t;
    }
  }
  // Nodes creating no edge (terminal consumers) run after everything else.
  std::set<std::string> tail;
  for (int v = 0; v < graph.num_nodes(); ++v)
    if (created_at[v] == 0) tail.insert(graph.node(v).id);
  for (const std::string& id : tail) {
    seq.steps.push_back(id);
    seq.timestep_of[id] = matrices.horizon;
  }

  std::vector<NodeIndex> order;
  order.reserve(seq.steps.size());
  for (const std::string& id : seq.steps) order.push_back(graph.node_index(id));
  if (!is_topological_order(graph, order))
    throw NonTopological("decoded sequence is not a topological order");
  return seq;
}

ResidentTimeline build_timeline(const Graph& graph,
                                const ScheduleMatrices& matrices) {
  ResidentTimeline timeline;
  timeline.live.resize(matrices.horizon);
  timeline.bytes.assign(matrices.horizon, 0);
  for (int t = 1; t <= matrices.horizon; ++t) {
    for (int e = 0; e < graph.num_edges(); ++e) {
      if (!matrices.create[e][t - 1] && !matrices.preserve[e][t - 1]) continue;
      timeline.live[t - 1].push_back(graph.edge(e).id);
      timeline.bytes[t - 1] += graph.edge(e).size;
    }
  }
  for (int t = 1; t <= matrices.horizon; ++t) {
    if (timeline.bytes[t - 1] > timeline.peak_rs) {
      timeline.peak_rs = timeline.bytes[t - 1];
      timeline.peak_step = t;
    }
  }
  if (matrices.horizon > 0 && timeline.peak_step == 0) timeline.peak_step = 1;
  return timeline;
}

std::vector<Interval> realized_lifetimes(
    const Graph& graph, const std::map<std::string, int>& timestep_of,
    int horizon) {
  auto step_of = [&](const std::string& id) -> int {
    auto it = timestep_of.find(id);
    if (it == timestep_of.end())
      throw InvalidOrder("node " + id + " has no timestep");
    return it->second;
  };
  std::vector<Interval> lifetimes(graph.num_edges());
  for (int e = 0; e < graph.num_edges(); ++e) {
    const TensorEdge& edge = graph.edge(e);
    int lo = step_of(edge.source);
    int hi = edge.sinks.empty() ? horizon : lo;
    for (const std::string& sink : edge.sinks)
      hi = std::max(hi, step_of(sink));
    lifetimes[e] = {lo, hi};
  }
  return lifetimes;
}

ResidentTimeline timeline_from_lifetimes(const Graph& graph,
                                         const std::vector<Interval>& lifetimes,
                                         int horizon) {
  ResidentTimeline timeline;
  timeline.live.resize(horizon);
  timeline.bytes.assign(horizon, 0);
  for (int t = 1; t <= horizon; ++t) {
    for (int e = 0; e < graph.num_edges(); ++e) {
      if (!lifetimes[e].contains(t)) continue;
      timeline.live[t - 1].push_back(graph.edge(e).id);
      timeline.bytes[t - 1] += graph.edge(e).size;
    }
  }
  for (int t = 1; t <= horizon; ++t) {
    if (timeline.bytes[t - 1] > timeline.peak_rs) {
      timeline.peak_rs = timeline.bytes[t - 1];
      timeline.peak_step = t;
    }
  }
  if (horizon > 0 && timeline.peak_step == 0) timeline.peak_step = 1;
  return timeline;
}

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

std::uint64_t require_unsigned(const json& obj, const char* key,
                               const char* what) {
  const json& v = require(obj, key, what);
  if (!v.is_number_unsigned())
    throw ParseError(std::string(what) + " field '" + key +
                     "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string require_string(const json& obj, const char* key,
                           const char* what) {
  const json& v = require(obj, key, what);
  if (!v.is_string())
    throw ParseError(std::string(what) + " field '" + key +
                     "' must be a string");
  return v.get<std::string>();
}

bool require_bool(const json& obj, const char* key, const char* what) {
  const json& v = require(obj, key, what);
  if (!v.is_boolean())
    throw ParseError(std::string(what) + " field '" + key +
                     "' must be a boolean");
  return v.get<bool>();
}

double require_number(const json& obj, const char* key, const char* what) {
  const json& v = require(obj, key, what);
  if (!v.is_number())
    throw ParseError(std::string(what) + " field '" + key +
                     "' must be a number");
  return v.get<double>();
}

}  // namespace

std::string save_plan(const MemoryPlan& plan) {
  ordered_json doc;
  doc["sequence"] = plan.sequence.steps;
  ordered_json timesteps = ordered_json::object();
  for (const auto& [id, t] : plan.sequence.timestep_of) timesteps[id] = t;
  doc["timesteps"] = std::move(timesteps);
  ordered_json addresses = ordered_json::object();
  for (const auto& [id, addr] : plan.addresses) addresses[id] = addr;
  doc["addresses"] = std::move(addresses);
  doc["peak_mem"] = plan.peak_mem;
  ordered_json timeline;
  timeline["bytes"] = plan.timeline.bytes;
  timeline["peak_rs"] = plan.timeline.peak_rs;
  timeline["peak_step"] = plan.timeline.peak_step;
  doc["timeline"] = std::move(timeline);
  ordered_json prov;
  prov["mode"] = plan.provenance.mode;
  prov["schedule_status"] = plan.provenance.schedule_status;
  prov["placement_status"] = plan.provenance.placement_status;
  prov["control_edges"] = plan.provenance.control_edges;
  prov["preplacement"] = plan.provenance.preplacement;
  prov["pruning"] = plan.provenance.pruning;
  prov["schedule_seconds"] = plan.provenance.schedule_seconds;
  prov["placement_seconds"] = plan.provenance.placement_seconds;
  doc["provenance"] = std::move(prov);
  return doc.dump(2) + "\n";
}

MemoryPlan load_plan(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("plan file must be a JSON object");
  reject_unknown_keys(doc, "plan file",
                      {"sequence", "timesteps", "addresses", "peak_mem",
                       "timeline", "provenance"});

  MemoryPlan plan;
  const json& jseq = require(doc, "sequence", "plan file");
  if (!jseq.is_array()) throw ParseError("'sequence' must be an array");
  for (const json& js : jseq) {
    if (!js.is_string()) throw ParseError("sequence entries must be strings");
    plan.sequence.steps.push_back(js.get<std::string>());
  }
  const json& jsteps = require(doc, "timesteps", "plan file");
  if (!jsteps.is_object()) throw ParseError("'timesteps' must be an object");
  for (auto it = jsteps.begin(); it != jsteps.end(); ++it) {
    if (!it.value().is_number_unsigned())
      throw ParseError("timestep of '" + it.key() +
                       "' must be a non-negative integer");
    plan.sequence.timestep_of[it.key()] = it.value().get<int>();
  }
  const json& jaddr = require(doc, "addresses", "plan file");
  if (!jaddr.is_object()) throw ParseError("'addresses' must be an object");
  for (auto it = jaddr.begin(); it != jaddr.end(); ++it) {
    if (!it.value().is_number_unsigned())
      throw ParseError("address of '" + it.key() +
                       "' must be a non-negative integer");
    plan.addresses[it.key()] = it.value().get<std::uint64_t>();
  }
  plan.peak_mem = require_unsigned(doc, "peak_mem", "plan file");

  const json& jtime = require(doc, "timeline", "plan file");
  if (!jtime.is_object()) throw ParseError("'timeline' must be an object");
  reject_unknown_keys(jtime, "timeline", {"bytes", "peak_rs", "peak_step"});
  const json& jbytes = require(jtime, "bytes", "timeline");
  if (!jbytes.is_array()) throw ParseError("timeline 'bytes' must be an array");
  for (const json& jb : jbytes) {
    if (!jb.is_number_unsigned())
      throw ParseError("timeline bytes must be non-negative integers");
    plan.timeline.bytes.push_back(jb.get<std::uint64_t>());
  }
  plan.timeline.peak_rs = require_unsigned(jtime, "peak_rs", "timeline");
  plan.timeline.peak_step =
      static_cast<int>(require_unsigned(jtime, "peak_step", "timeline"));

  const json& jprov = require(doc, "provenance", "plan file");
  if (!jprov.is_object()) throw ParseError("'provenance' must be an object");
  reject_unknown_keys(jprov, "provenance",
                      {"mode", "schedule_status", "placement_status",
                       "control_edges", "preplacement", "pruning",
                       "schedule_seconds", "placement_seconds"});
  plan.provenance.mode = require_string(jprov, "mode", "provenance");
  plan.provenance.schedule_status =
      require_string(jprov, "schedule_status", "provenance");
  plan.provenance.placement_status =
      require_string(jprov, "placement_status", "provenance");
  plan.provenance.control_edges =
      require_bool(jprov, "control_edges", "provenance");
  plan.provenance.preplacement =
      require_bool(jprov, "preplacement", "provenance");
  plan.provenance.pruning = require_bool(jprov, "pruning", "provenance");
  plan.provenance.schedule_seconds =
      require_number(jprov, "schedule_seconds", "provenance");
  plan.provenance.placement_seconds =
      require_number(jprov, "placement_seconds", "provenance");
  return plan;
}

void save_plan_file(const MemoryPlan& plan, const std::string& path) {
  write_text_file(path, save_plan(plan));
}

MemoryPlan load_plan_file(const std::string& path) {
  return load_plan(read_text_file(path));
}

ValidationReport validate_plan(const MemoryPlan& plan, const Graph& graph) {
  ValidationReport report;
  auto fail = [&](const std::string& tag, const std::string& detail) {
    report.violations.push_back({tag, detail});
  };

  // Sequence coverage: each node exactly once, nothing foreign.
  std::map<std::string, int> seen;
  for (const std::string& id : plan.sequence.steps) {
    if (!graph.has_node(id)) {
      fail(kTagCreateOnce, "sequence names unknown node '" + id + "'");
      continue;
    }
    if (++seen[id] == 2)
      fail(kTagCreateOnce, "node '" + id + "' appears more than once");
  }
  for (const Node& n : graph.nodes())
    if (!seen.count(n.id))
      fail(kTagCreateOnce, "node '" + n.id + "' is missing from the sequence");

  // Timesteps: every sequenced node needs one.
  int horizon = graph.num_nodes();
  auto step_of = [&](const std::string& id) -> int {
    auto it = plan.sequence.timestep_of.find(id);
    return it == plan.sequence.timestep_of.end() ? 0 : it->second;
  };
  for (const std::string& id : plan.sequence.steps) {
    int t = step_of(id);
    if (t <= 0)
      fail(kTagCreateOnce, "node '" + id + "' has no timestep");
    else
      horizon = std::max(horizon, t);
  }

  // Ordering: consumers strictly after producers, control edges included.
  bool order_ok = true;
  for (int e = 0; e < graph.num_edges(); ++e) {
    const TensorEdge& edge = graph.edge(e);
    int t_src = step_of(edge.source);
    for (const std::string& sink : edge.sinks) {
      int t_sink = step_of(sink);
      if (t_src <= 0 || t_sink <= 0) continue;  // reported above
      if (t_sink <= t_src) {
        fail(kTagFaninInMemory, "edge '" + edge.id + "': consumer '" + sink +
                                    "' does not run after producer '" +
                                    edge.source + "'");
        order_ok = false;
      }
    }
  }

  // Addresses: every data tensor placed, inside the buffer.
  for (const auto& [id, addr] : plan.addresses) {
    if (!graph.has_edge(id)) {
      fail(kTagPeakAddress, "address for unknown tensor '" + id + "'");
      continue;
    }
    const TensorEdge& edge = graph.edge(graph.edge_index(id));
    if (addr + edge.size > plan.peak_mem)
      fail(kTagPeakAddress, "tensor '" + id + "' ends at " +
                                std::to_string(addr + edge.size) +
                                ", above peak_mem " +
                                std::to_string(plan.peak_mem));
  }
  for (const TensorEdge& edge : graph.edges())
    if (edge.size > 0 && !plan.addresses.count(edge.id))
      fail(kTagPeakAddress, "tensor '" + edge.id + "' has no address");

  if (!order_ok) return report;  // lifetimes below would be meaningless
  for (const Node& n : graph.nodes())
    if (step_of(n.id) <= 0) return report;  // coverage failures reported above

  std::vector<Interval> lifetimes =
      realized_lifetimes(graph, plan.sequence.timestep_of, horizon);

  // Concurrently live data tensors must occupy disjoint address ranges.
  for (int i = 0; i < graph.num_edges(); ++i) {
    const TensorEdge& a = graph.edge(i);
    if (a.size == 0 || !plan.addresses.count(a.id)) continue;
    for (int j = i + 1; j < graph.num_edges(); ++j) {
      const TensorEdge& b = graph.edge(j);
      if (b.size == 0 || !plan.addresses.count(b.id)) continue;
      if (intervals_disjoint(lifetimes[i], lifetimes[j])) continue;
      std::uint64_t a_lo = plan.addresses.at(a.id);
      std::uint64_t b_lo = plan.addresses.at(b.id);
      if (a_lo < b_lo + b.size && b_lo < a_lo + a.size)
        fail("below_above", "tensors '" + a.id + "' and '" + b.id +
                                "' are live together and overlap in memory");
    }
  }

  // peak_mem covers the resident bytes of every timestep.
  std::uint64_t peak_rs =
      timeline_from_lifetimes(graph, lifetimes, horizon).peak_rs;
  if (plan.peak_mem < peak_rs)
    fail(kTagPeakMem, "peak_mem " + std::to_string(plan.peak_mem) +
                          " is below the peak resident bytes " +
                          std::to_string(peak_rs));
  if (plan.timeline.peak_rs != peak_rs)
    fail(kTagPeakMem, "stored peak_rs " +
                          std::to_string(plan.timeline.peak_rs) +
                          " differs from the recomputed " +
                          std::to_string(peak_rs));
  return report;
}

std::string format_report(const ValidationReport& report) {
  if (report.ok()) return "ok\n";
  std::ostringstream out;
  for (const auto& violation : report.violations)
    out << violation.tag << "  " << violation.detail << "\n";
  return out.str();
}

std::uint64_t map_allocation_request(const MemoryPlan& plan,
                                     const Graph& graph, std::uint64_t k,
                                     std::uint64_t buffer_base) {
  for (int v = 0; v < graph.num_nodes(); ++v) {
    int data_outputs = 0;
    for (EdgeIndex e : graph.fanout(v))
      data_outputs += graph.edge(e).kind == EdgeKind::kData;
    if (data_outputs > 1)
      throw MultiOutputUnsupported("node " + graph.node(v).id + " produces " +
                                   std::to_string(data_outputs) + " tensors");
  }
  if (plan.sequence.steps.empty())
    throw NoOutputEdge("the plan has an empty sequence");
  const std::string& id =
      plan.sequence.steps[k % plan.sequence.steps.size()];
  NodeIndex v = graph.node_index(id);
  for (EdgeIndex e : graph.fanout(v)) {
    if (graph.edge(e).kind != EdgeKind::kData) continue;
    auto it = plan.addresses.find(graph.edge(e).id);
    if (it == plan.addresses.end())
      throw NoOutputEdge("tensor " + graph.edge(e).id + " has no address");
    return buffer_base + it->second;
  }
  throw NoOutputEdge("node " + id + " produces no tensor");
}

}  // namespace memplan
