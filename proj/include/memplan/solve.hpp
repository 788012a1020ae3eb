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

#ifndef MEMPLAN_SOLVE_HPP_
#define MEMPLAN_SOLVE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "memplan/analysis.hpp"
#include "memplan/graph.hpp"
#include "memplan/milp.hpp"

namespace memplan {

enum class SolveMode { kInternal, kExternal, kAuto };

enum class SolveStatus { kOptimal, kFeasibleGap, kInfeasible, kTimeout, kError };

const char* to_string(SolveStatus status);

struct InternalLimits {
  int max_nodes = 20;    // subset search over execution orders
  int max_tensors = 24;  // branch-and-bound over offsets
  std::int64_t max_search_nodes = 2'000'000;
};

struct SolveConfig {
  SolveMode mode = SolveMode::kAuto;
  double time_limit = 300.0;  // seconds per solve
  std::string solver_cmd;     // template with {lp} and {sol} placeholders
  InternalLimits internal_limits;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kError;
  Assignment assignment;
  std::int64_t objective = 0;
  std::int64_t bound = 0;  // proven lower bound when the search was cut off
  double wall_time = 0.0;  // seconds
  std::vector<NodeIndex> order;                  // schedule solves only
  std::map<EdgeIndex, std::uint64_t> addresses;  // placement solves only
  std::string detail;
};

// Exact minimum-peak execution order by dynamic programming over
// executed-node subsets. The result is serialized one node per timestep;
// ties prefer the smaller node id. On hitting the time limit the
// program-order schedule is returned with status timeout.
// Throws TooLarge past internal_limits.max_nodes.
SolveOutcome solve_schedule_exact(const Graph& graph,
                                  const SolveConfig& config = {});

// Exact minimum-peak offsets for the data edges absent from `preplaced`,
// which act as fixed obstacles. Branch-and-bound over address-sorted
// placements; returns early with a certificate when the resident-set lower
// bound is met, otherwise exhausts the space. Past the node budget or the
// time limit the best placement found so far is returned with the bound.
// Throws TooLarge past internal_limits.max_tensors.
SolveOutcome solve_placement_exact(
    const Graph& graph, const std::vector<Interval>& lifetimes,
    const std::map<EdgeIndex, std::uint64_t>& preplaced,
    const SolveConfig& config = {});

// Subprocess bridge: writes the model as an LP file, runs solver_cmd with
// {lp}/{sol} substituted, parses the solution file (`name value` lines, '#'
// comments), and gates it through evaluate() before trusting it. The
// solver is expected to solve to optimality; a feasible solution is
// reported as such. Throws SolverProcessFailed, SolutionParseError,
// SolutionInfeasible, Timeout.
SolveOutcome solve_external(const MilpModel& model, const SolveConfig& config);

}  // namespace memplan

#endif  // MEMPLAN_SOLVE_HPP_
