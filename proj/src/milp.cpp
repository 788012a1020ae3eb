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

#include "memplan/milp.hpp"

#include <algorithm>

#include "memplan/errors.hpp"

namespace memplan {

int MilpModel::add_variable(const std::string& name, VarKind kind,
                            std::int64_t lo, std::int64_t hi) {
  if (index_.count(name))
    throw InvalidStructure("variable '" + name + "' declared twice");
  int id = static_cast<int>(vars.size());
  vars.push_back({name, kind, lo, hi});
  index_.emplace(name, id);
  if (kind == VarKind::kBinary) ++free_binaries;
  return id;
}

int MilpModel::var_index(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

const char* to_string(Relation rel) {
  switch (rel) {
    case Relation::kLe:
      return "<=";
    case Relation::kGe:
      return ">=";
    case Relation::kEq:
      return "=";
  }
  return "<=";
}

EvalResult evaluate(const MilpModel& model, const Assignment& assignment) {
  EvalResult result;
  std::vector<std::int64_t> value(model.vars.size(), 0);
  for (size_t i = 0; i < model.vars.size(); ++i) {
    const Variable& var = model.vars[i];
    auto it = assignment.find(var.name);
    if (it == assignment.end())
      throw UnassignedVariable("no value for variable '" + var.name + "'");
    value[i] = it->second;
    if (value[i] < var.lo || value[i] > var.hi) {
      result.violations.push_back(
          {"bounds", var.name + " = " + std::to_string(value[i]) +
                         " outside [" + std::to_string(var.lo) + ", " +
                         std::to_string(var.hi) + "]"});
    } else if (var.kind == VarKind::kBinary && value[i] != 0 &&
               value[i] != 1) {
      result.violations.push_back(
          {"bounds", var.name + " must be 0 or 1, got " +
                         std::to_string(value[i])});
    }
  }
  for (const LinearConstraint& c : model.constraints) {
    std::int64_t lhs = 0;
    for (const LinearTerm& term : c.terms) lhs += term.coef * value[term.var];
    bool ok = false;
    switch (c.rel) {
      case Relation::kLe:
        ok = lhs <= c.rhs;
        break;
      case Relation::kGe:
        ok = lhs >= c.rhs;
        break;
      case Relation::kEq:
        ok = lhs == c.rhs;
        break;
    }
    if (!ok) {
      result.violations.push_back(
          {c.tag, "lhs " + std::to_string(lhs) + " " + to_string(c.rel) +
                      " " + std::to_string(c.rhs) + " fails"});
    }
  }
  result.feasible = result.violations.empty();
  if (model.objective >= 0) result.objective = value[model.objective];
  return result;
}

}  // namespace memplan
