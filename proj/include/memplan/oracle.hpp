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

#ifndef MEMPLAN_ORACLE_HPP_
#define MEMPLAN_ORACLE_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "memplan/analysis.hpp"
#include "memplan/graph.hpp"

namespace memplan {

// Brute-force reference implementations. They share nothing with the solvers
// except the Graph type: no bounds pruning, no dynamic programming, no
// branch-and-bound. They exist to cross-check the fast paths and stay slow
// on purpose.

struct OracleBudget {
  int max_nodes = 9;
  int max_tensors = 7;
  // Cap on search steps; enumeration aborts cleanly past it.
  std::int64_t max_states = 20'000'000;
};

struct PeakWitness {
  std::uint64_t min_peak = 0;
  std::vector<NodeIndex> order;
};

// Enumerates every topological order of the graph, simulates resident bytes
// step by step, and returns the global minimum peak with a witness order.
// Throws BudgetExceeded past the caps.
PeakWitness enumerate_min_peak(const Graph& graph,
                               const OracleBudget& budget = {});

struct PackingWitness {
  std::uint64_t min_peak = 0;
  std::vector<std::uint64_t> addresses;  // parallel to the input tensors
};

// Searches offsets byte by byte over [0, sum of sizes] for every tensor,
// skipping only offsets that can no longer beat the best packing found, and
// returns the certified minimum peak address. Entries of size 0 are placed
// at 0. Throws BudgetExceeded past the caps.
PackingWitness enumerate_min_packing(const std::vector<Interval>& lifetimes,
                                     const std::vector<std::uint64_t>& sizes,
                                     const OracleBudget& budget = {});

}  // namespace memplan

#endif  // MEMPLAN_ORACLE_HPP_
