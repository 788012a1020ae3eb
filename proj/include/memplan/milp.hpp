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

#ifndef MEMPLAN_MILP_HPP_
#define MEMPLAN_MILP_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace memplan {

// Constraint family tags; violation reports and LP row names carry them.
inline constexpr char kTagLiveOrPreserved[] = "live_or_preserved";
inline constexpr char kTagPreserveFeasibility[] = "preserve_feasibility";
inline constexpr char kTagCreateOnce[] = "create_once";
inline constexpr char kTagFaninInMemory[] = "fanin_in_memory";
inline constexpr char kTagMultipleOutputs[] = "multiple_outputs";
inline constexpr char kTagLivePair[] = "live_pair";
inline constexpr char kTagBelow[] = "below";
inline constexpr char kTagAbove[] = "above";
inline constexpr char kTagPeakAddress[] = "peak_address";
inline constexpr char kTagPeakMem[] = "peak_mem";

enum class VarKind { kBinary, kInteger };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kBinary;
  std::int64_t lo = 0;
  std::int64_t hi = 1;
};

enum class Relation { kLe, kGe, kEq };

const char* to_string(Relation rel);

struct LinearTerm {
  std::int64_t coef = 0;
  int var = -1;
};

struct LinearConstraint {
  std::string tag;
  std::vector<LinearTerm> terms;  // no duplicate variables within one row
  Relation rel = Relation::kLe;
  std::int64_t rhs = 0;
};

// A mixed model over free variables only. Variables whose value is already
// forced by the lifetime windows are substituted out at encode time; their
// values live in `pinned` so a schedule can still be reconstructed.
struct MilpModel {
  std::vector<Variable> vars;
  std::vector<LinearConstraint> constraints;
  int objective = -1;  // index of the variable being minimized

  std::map<std::string, std::int64_t> pinned;

  // Metadata. free_binaries + pinned_binaries equals the raw binary count
  // of the formulation (two per edge per timestep for scheduling models).
  std::map<std::string, int> constraint_counts;
  std::int64_t free_binaries = 0;
  std::int64_t pinned_binaries = 0;

  int add_variable(const std::string& name, VarKind kind, std::int64_t lo,
                   std::int64_t hi);
  int var_index(const std::string& name) const;  // -1 when absent

 private:
  std::unordered_map<std::string, int> index_;
};

// Values for every free variable, keyed by variable name. Entries for names
// the model does not declare are ignored by evaluate().
using Assignment = std::map<std::string, std::int64_t>;

struct EvalResult {
  bool feasible = false;
  std::int64_t objective = 0;
  struct Violation {
    std::string tag;
    std::string detail;
  };
  std::vector<Violation> violations;
};

// Checks bounds, integrality of binaries, and every constraint row; reports
// each violated row by its tag. Throws UnassignedVariable when a declared
// variable has no value.
EvalResult evaluate(const MilpModel& model, const Assignment& assignment);

}  // namespace memplan

#endif  // MEMPLAN_MILP_HPP_
