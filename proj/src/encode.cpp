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

#include "memplan/encode.hpp"

#include <algorithm>
#include <optional>

#include "memplan/errors.hpp"

namespace memplan {

std::string create_var_name(const std::string& edge_id, int t) {
  return "create(" + edge_id + ",t" + std::to_string(t) + ")";
}

std::string preserve_var_name(const std::string& edge_id, int t) {
  return "preserve(" + edge_id + ",t" + std::to_string(t) + ")";
}

std::string addr_var_name(const std::string& edge_id) {
  return "addr(" + edge_id + ")";
}

std::string below_var_name(const std::string& e1, const std::string& e2) {
  return "below(" + e1 + "," + e2 + ")";
}

std::string above_var_name(const std::string& e1, const std::string& e2) {
  return "above(" + e1 + "," + e2 + ")";
}

namespace {

// One creation/preservation slot: either a free model variable or a value
// substituted out at encode time.
struct Slot {
  int var = -1;
  std::int64_t value = 0;
  bool pinned() const { return var < 0; }
};

// Accumulates a row, folding pinned slots into the right-hand side.
class Row {
 public:
  Row(std::string tag, Relation rel, std::int64_t rhs)
      : tag_(std::move(tag)), rel_(rel), rhs_(rhs) {}

  Row& add(std::int64_t coef, const Slot& slot) {
    if (slot.pinned())
      constant_ += coef * slot.value;
    else
      terms_.push_back({coef, slot.var});
    return *this;
  }

  Row& add_var(std::int64_t coef, int var) {
    terms_.push_back({coef, var});
    return *this;
  }

  // Emits the row unless it has no free variables, in which case the
  // constant is checked instead; an unsatisfiable constant row means the
  // windows pinned the model into infeasibility.
  void emit(MilpModel* model) {
    std::int64_t rhs = rhs_ - constant_;
    if (terms_.empty()) {
      bool ok = false;
      switch (rel_) {
        case Relation::kLe:
          ok = 0 <= rhs;
          break;
        case Relation::kGe:
          ok = 0 >= rhs;
          break;
        case Relation::kEq:
          ok = 0 == rhs;
          break;
      }
      if (!ok)
        throw InfeasibleBounds("pinned values violate a " + tag_ + " row");
      return;
    }
    model->constraints.push_back({tag_, std::move(terms_), rel_, rhs});
    ++model->constraint_counts[tag_];
  }

 private:
  std::string tag_;
  Relation rel_;
  std::int64_t rhs_;
  std::int64_t constant_ = 0;
  std::vector<LinearTerm> terms_;
};

struct CpSlots {
  std::vector<std::vector<Slot>> create;    // [edge][t-1]
  std::vector<std::vector<Slot>> preserve;  // [edge][t-1]
};

// Window pinning. A slot is forced when the windows allow only one value:
// creation outside span(src) or preservation outside mul is 0, preservation
// inside pres is 1, a singleton span forces its single creation slot to 1
// (create-once), nothing can be preserved before the source's earliest
// timestep, and a forced creation excludes preservation at that timestep.
void pin_slots(const Graph& graph, const LifetimeBounds& bounds,
               std::vector<std::vector<std::optional<int>>>* pin_create,
               std::vector<std::vector<std::optional<int>>>* pin_preserve) {
  const int n = bounds.horizon;
  pin_create->assign(graph.num_edges(), std::vector<std::optional<int>>(n));
  pin_preserve->assign(graph.num_edges(), std::vector<std::optional<int>>(n));
  for (int e = 0; e < graph.num_edges(); ++e) {
    NodeIndex src = graph.source_of(e);
    const Interval& span = bounds.span[src];
    const Interval& mul = bounds.mul[e];
    const Interval& pres = bounds.pres[e];
    for (int t = 1; t <= n; ++t) {
      auto& pc = (*pin_create)[e][t - 1];
      auto& pp = (*pin_preserve)[e][t - 1];
      if (!span.contains(t))
        pc = 0;
      else if (span.lo == span.hi)
        pc = 1;
      if (t <= bounds.asap[src] || !mul.contains(t))
        pp = 0;
      else if (pc == 1)
        pp = 0;
      else if (pres.contains(t))
        pp = 1;
    }
  }
}

// Declares the free C/P variables (creations first, then preservations,
// edge-major) and records each pinned value. Returns the slot table.
CpSlots build_cp_slots(const Graph& graph, const LifetimeBounds& bounds,
                       bool prune, MilpModel* model) {
  const int n = bounds.horizon;
  std::vector<std::vector<std::optional<int>>> pin_create, pin_preserve;
  if (prune) {
    pin_slots(graph, bounds, &pin_create, &pin_preserve);
  } else {
    pin_create.assign(graph.num_edges(),
                      std::vector<std::optional<int>>(n));
    pin_preserve.assign(graph.num_edges(),
                        std::vector<std::optional<int>>(n));
  }
  CpSlots slots;
  slots.create.assign(graph.num_edges(), std::vector<Slot>(n));
  slots.preserve.assign(graph.num_edges(), std::vector<Slot>(n));
  for (int e = 0; e < graph.num_edges(); ++e) {
    const std::string& id = graph.edge(e).id;
    for (int t = 1; t <= n; ++t) {
      if (pin_create[e][t - 1]) {
        slots.create[e][t - 1] = {-1, *pin_create[e][t - 1]};
        model->pinned[create_var_name(id, t)] = *pin_create[e][t - 1];
        ++model->pinned_binaries;
      } else {
        slots.create[e][t - 1] = {
            model->add_variable(create_var_name(id, t), VarKind::kBinary, 0,
                                1),
            0};
      }
    }
  }
  for (int e = 0; e < graph.num_edges(); ++e) {
    const std::string& id = graph.edge(e).id;
    for (int t = 1; t <= n; ++t) {
      if (pin_preserve[e][t - 1]) {
        slots.preserve[e][t - 1] = {-1, *pin_preserve[e][t - 1]};
        model->pinned[preserve_var_name(id, t)] = *pin_preserve[e][t - 1];
        ++model->pinned_binaries;
      } else {
        slots.preserve[e][t - 1] = {
            model->add_variable(preserve_var_name(id, t), VarKind::kBinary,
                                0, 1),
            0};
      }
    }
  }
  return slots;
}

void check_bounds(const LifetimeBounds& bounds) {
  for (size_t v = 0; v < bounds.asap.size(); ++v) {
    if (bounds.asap[v] > bounds.alap[v])
      throw InfeasibleBounds("node window [" + std::to_string(bounds.asap[v]) +
                             ", " + std::to_string(bounds.alap[v]) +
                             "] is empty");
  }
}

// Rows shared by the scheduling and joint models: the creation and
// preservation rules over every edge and timestep.
void emit_schedule_rows(const Graph& graph, const LifetimeBounds& bounds,
                        const CpSlots& slots, MilpModel* model) {
  const int n = bounds.horizon;
  for (int e = 0; e < graph.num_edges(); ++e) {
    for (int t = 1; t <= n; ++t) {
      Row(kTagLiveOrPreserved, Relation::kLe, 1)
          .add(1, slots.preserve[e][t - 1])
          .add(1, slots.create[e][t - 1])
          .emit(model);
    }
  }
  for (int e = 0; e < graph.num_edges(); ++e) {
    for (int t = 1; t <= n; ++t) {
      Row row(kTagPreserveFeasibility, Relation::kLe, 0);
      row.add(1, slots.preserve[e][t - 1]);
      if (t > 1) {
        row.add(-1, slots.preserve[e][t - 2]);
        row.add(-1, slots.create[e][t - 2]);
      }
      // At t=1 there is no earlier timestep, so preservation is impossible.
      row.emit(model);
    }
  }
  for (int e = 0; e < graph.num_edges(); ++e) {
    Row row(kTagCreateOnce, Relation::kEq, 1);
    for (int t = 1; t <= n; ++t) row.add(1, slots.create[e][t - 1]);
    row.emit(model);
  }
  for (int e = 0; e < graph.num_edges(); ++e) {
    NodeIndex src = graph.source_of(e);
    for (int t = 1; t <= n; ++t) {
      for (EdgeIndex f : graph.fanin(src)) {
        Row(kTagFaninInMemory, Relation::kLe, 0)
            .add(1, slots.create[e][t - 1])
            .add(-1, slots.preserve[f][t - 1])
            .emit(model);
      }
    }
  }
  for (int v = 0; v < graph.num_nodes(); ++v) {
    const auto& fo = graph.fanout(v);
    for (size_t j = 1; j < fo.size(); ++j) {
      for (int t = 1; t <= n; ++t) {
        Row(kTagMultipleOutputs, Relation::kEq, 0)
            .add(1, slots.create[fo[j]][t - 1])
            .add(-1, slots.create[fo[0]][t - 1])
            .emit(model);
      }
    }
  }
}

struct PairVars {
  Slot below;
  Slot above;
};

PairVars add_pair_vars(const std::string& id_i, const std::string& id_j,
                       MilpModel* model) {
  PairVars pv;
  pv.below = {model->add_variable(below_var_name(id_i, id_j),
                                  VarKind::kBinary, 0, 1),
              0};
  pv.above = {model->add_variable(above_var_name(id_i, id_j),
                                  VarKind::kBinary, 0, 1),
              0};
  return pv;
}

// Big-M order rows: picking below forces i entirely under j, picking above
// forces i entirely over j.
void emit_order_rows(const Slot& addr_i, const Slot& addr_j,
                     std::uint64_t size_i, std::uint64_t size_j,
                     const PairVars& pv, std::int64_t big_m,
                     MilpModel* model) {
  Row(kTagBelow, Relation::kLe, big_m - static_cast<std::int64_t>(size_i))
      .add(1, addr_i)
      .add(-1, addr_j)
      .add(big_m, pv.below)
      .emit(model);
  Row(kTagAbove, Relation::kGe, static_cast<std::int64_t>(size_j) - big_m)
      .add(1, addr_i)
      .add(-1, addr_j)
      .add(-big_m, pv.above)
      .emit(model);
}

}  // namespace

MilpModel encode_scheduling(const Graph& graph, const LifetimeBounds& bounds,
                            const EncodeOptions& options) {
  check_bounds(bounds);
  MilpModel model;
  const std::int64_t cap = static_cast<std::int64_t>(graph.total_bytes());
  model.objective =
      model.add_variable(kPeakNoFragVar, VarKind::kInteger, 0, cap);
  CpSlots slots =
      build_cp_slots(graph, bounds, options.prune_bounds, &model);
  emit_schedule_rows(graph, bounds, slots, &model);
  for (int t = 1; t <= bounds.horizon; ++t) {
    Row row(kTagPeakMem, Relation::kLe, 0);
    for (int e = 0; e < graph.num_edges(); ++e) {
      const std::int64_t size =
          static_cast<std::int64_t>(graph.edge(e).size);
      if (size == 0) continue;
      row.add(size, slots.create[e][t - 1]);
      row.add(size, slots.preserve[e][t - 1]);
    }
    row.add_var(-1, model.objective);
    row.emit(&model);
  }
  return model;
}

MilpModel encode_addresses(
    const Graph& graph, const std::vector<Interval>& lifetimes,
    const std::map<EdgeIndex, std::uint64_t>& preplaced,
    const EncodeOptions& options) {
  MilpModel model;
  const std::int64_t big_m = static_cast<std::int64_t>(graph.total_bytes());
  model.objective =
      model.add_variable(kPeakMemVar, VarKind::kInteger, 0, big_m);

  std::vector<EdgeIndex> data_edges;
  for (int e = 0; e < graph.num_edges(); ++e)
    if (graph.edge(e).size > 0) data_edges.push_back(e);

  std::vector<Slot> addr(graph.num_edges());
  for (EdgeIndex e : data_edges) {
    const std::string name = addr_var_name(graph.edge(e).id);
    auto pre = preplaced.find(e);
    if (pre != preplaced.end()) {
      addr[e] = {-1, static_cast<std::int64_t>(pre->second)};
      model.pinned[name] = addr[e].value;
    } else {
      addr[e] = {model.add_variable(name, VarKind::kInteger, 0, big_m), 0};
    }
  }

  LifetimeBounds bounds = compute_bounds(graph);
  ReachabilityCache reach(graph);
  for (size_t a = 0; a < data_edges.size(); ++a) {
    for (size_t b = a + 1; b < data_edges.size(); ++b) {
      EdgeIndex i = data_edges[a];
      EdgeIndex j = data_edges[b];
      if (addr[i].pinned() && addr[j].pinned()) continue;
      // Tensors whose realized lifetimes never intersect may share bytes;
      // no order decision is needed.
      if (intervals_disjoint(lifetimes[i], lifetimes[j])) continue;
      if (options.filter_pairs && (edge_precedes(graph, bounds, i, j, &reach) ||
                                   edge_precedes(graph, bounds, j, i, &reach)))
        continue;
      PairVars pv =
          add_pair_vars(graph.edge(i).id, graph.edge(j).id, &model);
      Row(kTagLivePair, Relation::kEq, 1)
          .add(1, pv.below)
          .add(1, pv.above)
          .emit(&model);
      emit_order_rows(addr[i], addr[j], graph.edge(i).size,
                      graph.edge(j).size, pv, big_m, &model);
    }
  }

  for (EdgeIndex e : data_edges) {
    Row(kTagPeakAddress, Relation::kLe,
        -static_cast<std::int64_t>(graph.edge(e).size))
        .add(1, addr[e])
        .add_var(-1, model.objective)
        .emit(&model);
  }
  return model;
}

MilpModel encode_joint(const Graph& graph, const LifetimeBounds& bounds,
                       const EncodeOptions& options) {
  check_bounds(bounds);
  MilpModel model;
  const std::int64_t big_m = static_cast<std::int64_t>(graph.total_bytes());
  model.objective =
      model.add_variable(kPeakMemVar, VarKind::kInteger, 0, big_m);
  CpSlots slots =
      build_cp_slots(graph, bounds, options.prune_bounds, &model);
  emit_schedule_rows(graph, bounds, slots, &model);

  std::vector<EdgeIndex> data_edges;
  for (int e = 0; e < graph.num_edges(); ++e)
    if (graph.edge(e).size > 0) data_edges.push_back(e);

  std::vector<Slot> addr(graph.num_edges());
  for (EdgeIndex e : data_edges) {
    addr[e] = {model.add_variable(addr_var_name(graph.edge(e).id),
                                  VarKind::kInteger, 0, big_m),
               0};
  }

  ReachabilityCache reach(graph);
  for (size_t a = 0; a < data_edges.size(); ++a) {
    for (size_t b = a + 1; b < data_edges.size(); ++b) {
      EdgeIndex i = data_edges[a];
      EdgeIndex j = data_edges[b];
      if (options.filter_pairs && (edge_precedes(graph, bounds, i, j, &reach) ||
                                   edge_precedes(graph, bounds, j, i, &reach)))
        continue;
      PairVars pv =
          add_pair_vars(graph.edge(i).id, graph.edge(j).id, &model);
      Row(kTagLivePair, Relation::kLe, 1)
          .add(1, pv.below)
          .add(1, pv.above)
          .emit(&model);
      // Tensors live at the same timestep must take an order.
      for (int t = 1; t <= bounds.horizon; ++t) {
        Row(kTagLivePair, Relation::kGe, -1)
            .add(1, pv.below)
            .add(1, pv.above)
            .add(-1, slots.create[i][t - 1])
            .add(-1, slots.preserve[i][t - 1])
            .add(-1, slots.create[j][t - 1])
            .add(-1, slots.preserve[j][t - 1])
            .emit(&model);
      }
      emit_order_rows(addr[i], addr[j], graph.edge(i).size,
                      graph.edge(j).size, pv, big_m, &model);
    }
  }

  for (EdgeIndex e : data_edges) {
    Row(kTagPeakAddress, Relation::kLe,
        -static_cast<std::int64_t>(graph.edge(e).size))
        .add(1, addr[e])
        .add_var(-1, model.objective)
        .emit(&model);
  }
  return model;
}

Assignment assignment_from_matrices(const MilpModel& model, const Graph& graph,
                                    const ScheduleMatrices& matrices) {
  Assignment a;
  for (int e = 0; e < graph.num_edges(); ++e) {
    const std::string& id = graph.edge(e).id;
    for (int t = 1; t <= matrices.horizon; ++t) {
      const std::int64_t c = matrices.create[e][t - 1];
      const std::int64_t p = matrices.preserve[e][t - 1];
      for (const auto& [name, value] :
           {std::pair<std::string, std::int64_t>{create_var_name(id, t), c},
            {preserve_var_name(id, t), p}}) {
        if (model.var_index(name) >= 0) {
          a[name] = value;
        } else {
          auto pin = model.pinned.find(name);
          if (pin != model.pinned.end() && pin->second != value)
            throw Error("schedule contradicts pinned value of " + name);
        }
      }
    }
  }
  if (model.var_index(kPeakNoFragVar) >= 0) {
    std::uint64_t peak = 0;
    for (int t = 1; t <= matrices.horizon; ++t) {
      std::uint64_t at = 0;
      for (int e = 0; e < graph.num_edges(); ++e) {
        if (matrices.create[e][t - 1] || matrices.preserve[e][t - 1])
          at += graph.edge(e).size;
      }
      peak = std::max(peak, at);
    }
    a[kPeakNoFragVar] = static_cast<std::int64_t>(peak);
  }
  return a;
}

Assignment schedule_assignment(const Graph& graph,
                               const ScheduleMatrices& matrices) {
  Assignment a;
  std::uint64_t peak = 0;
  for (int t = 1; t <= matrices.horizon; ++t) {
    std::uint64_t at = 0;
    for (int e = 0; e < graph.num_edges(); ++e) {
      const std::string& id = graph.edge(e).id;
      a[create_var_name(id, t)] = matrices.create[e][t - 1];
      a[preserve_var_name(id, t)] = matrices.preserve[e][t - 1];
      if (matrices.create[e][t - 1] || matrices.preserve[e][t - 1])
        at += graph.edge(e).size;
    }
    peak = std::max(peak, at);
  }
  a[kPeakNoFragVar] = static_cast<std::int64_t>(peak);
  return a;
}

ScheduleMatrices matrices_from_assignment(const MilpModel& model,
                                          const Graph& graph,
                                          const Assignment& assignment) {
  ScheduleMatrices m;
  m.horizon = graph.num_nodes();
  m.create.assign(graph.num_edges(),
                  std::vector<std::uint8_t>(m.horizon, 0));
  m.preserve.assign(graph.num_edges(),
                    std::vector<std::uint8_t>(m.horizon, 0));
  auto lookup = [&](const std::string& name) -> std::int64_t {
    auto it = assignment.find(name);
    if (it != assignment.end()) return it->second;
    auto pin = model.pinned.find(name);
    if (pin != model.pinned.end()) return pin->second;
    throw UnassignedVariable(name + " has neither a value nor a pin");
  };
  for (int e = 0; e < graph.num_edges(); ++e) {
    const std::string& id = graph.edge(e).id;
    for (int t = 1; t <= m.horizon; ++t) {
      m.create[e][t - 1] = lookup(create_var_name(id, t)) != 0;
      m.preserve[e][t - 1] = lookup(preserve_var_name(id, t)) != 0;
    }
  }
  return m;
}

void fill_address_assignment(const MilpModel& model, const Graph& graph,
                             const std::map<EdgeIndex, std::uint64_t>& addresses,
                             Assignment* assignment) {
  std::uint64_t peak = 0;
  for (const auto& [e, offset] : addresses)
    peak = std::max(peak, offset + graph.edge(e).size);
  for (const auto& [e, offset] : addresses) {
    const std::string name = addr_var_name(graph.edge(e).id);
    if (model.var_index(name) >= 0) {
      (*assignment)[name] = static_cast<std::int64_t>(offset);
    } else {
      auto pin = model.pinned.find(name);
      if (pin != model.pinned.end() &&
          pin->second != static_cast<std::int64_t>(offset))
        throw Error("addresses contradict pinned value of " + name);
    }
  }
  for (int i = 0; i < graph.num_edges(); ++i) {
    for (int j = i + 1; j < graph.num_edges(); ++j) {
      const std::string below =
          below_var_name(graph.edge(i).id, graph.edge(j).id);
      if (model.var_index(below) < 0) continue;
      const std::string above =
          above_var_name(graph.edge(i).id, graph.edge(j).id);
      auto ai = addresses.find(i);
      auto aj = addresses.find(j);
      std::int64_t below_val = 0;
      std::int64_t above_val = 0;
      if (ai != addresses.end() && aj != addresses.end()) {
        if (ai->second + graph.edge(i).size <= aj->second)
          below_val = 1;
        else if (aj->second + graph.edge(j).size <= ai->second)
          above_val = 1;
      }
      (*assignment)[below] = below_val;
      (*assignment)[above] = above_val;
    }
  }
  if (model.var_index(kPeakMemVar) >= 0)
    (*assignment)[kPeakMemVar] = static_cast<std::int64_t>(peak);
}

}  // namespace memplan
