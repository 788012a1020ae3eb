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

#ifndef MEMPLAN_LP_FORMAT_HPP_
#define MEMPLAN_LP_FORMAT_HPP_

#include <map>
#include <string>
#include <vector>

#include "memplan/milp.hpp"

namespace memplan {

// File names use the structured variable names with every character outside
// [A-Za-z0-9_] mapped to '_'; colliding names get deterministic numeric
// suffixes in variable-index order.
struct LpNames {
  std::vector<std::string> by_var;       // sanitized name per variable index
  std::map<std::string, int> to_var;     // sanitized name back to index
};

LpNames lp_names(const MilpModel& model);

// Deterministic LP text with sections Minimize, Subject To, Bounds,
// Generals, Binaries, End. Row names are c<index>_<tag>.
std::string write_lp(const MilpModel& model);

// Strict parse of text in the layout write_lp produces. Variables are
// redeclared from the Bounds/Generals/Binaries sections, so the result is
// structurally isomorphic to the original rather than identical: names are
// sanitized, variable order differs, pinned values are gone.
MilpModel parse_lp(const std::string& text);

// Structural isomorphism modulo name sanitization, variable order and row
// order. Ignores pinned values and metadata counts.
bool models_isomorphic(const MilpModel& a, const MilpModel& b);

}  // namespace memplan

#endif  // MEMPLAN_LP_FORMAT_HPP_
