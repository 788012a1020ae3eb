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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "memplan/errors.hpp"
#include "memplan/generate.hpp"
#include "memplan/graph.hpp"
#include "memplan/oracle.hpp"
#include "memplan/schedule.hpp"
#include "test_util.hpp"

using namespace memplan;
using testutil::data_edge;

TEST_CASE("order enumeration certifies the small fixtures") {
  Graph chain3 = testutil::make_chain3();
  PeakWitness w = enumerate_min_peak(chain3);
  CHECK(w.min_peak == 6);
  REQUIRE(w.order.size() == 3);
  CHECK(chain3.node(w.order[0]).id == "v1");
  CHECK(chain3.node(w.order[2]).id == "v3");

  Graph order4 = testutil::make_order4();
  PeakWitness w4 = enumerate_min_peak(order4);
  CHECK(w4.min_peak == 21);
  CHECK(order4.node(w4.order[1]).id == "v2");
  // The witness must actually attain the reported peak.
  CHECK(peak_resident_bytes(order4, w4.order) == 21);
}

TEST_CASE("outputs kept to the end stack up whatever the order") {
  Graph g = Graph::build({{"a", NodeRole::kSource},
                          {"b", NodeRole::kSource}},
                         {data_edge("ea", "a", {}, 5),
                          data_edge("eb", "b", {}, 3)});
  CHECK(enumerate_min_peak(g).min_peak == 8);
}

TEST_CASE("order enumeration stops cleanly past its budget") {
  GeneratorSpec spec;
  spec.kind = GraphKind::kChain;
  spec.layers = 10;
  Graph big = generate_graph(spec);  // 11 nodes
  CHECK_THROWS_AS(enumerate_min_peak(big), BudgetExceeded);

  OracleBudget tiny;
  tiny.max_states = 1;
  CHECK_THROWS_AS(enumerate_min_peak(testutil::make_order4(), tiny),
                  BudgetExceeded);
}

TEST_CASE("packing search certifies the fixture layouts") {
  // pack3 under program order: A and B from t1, C from t3.
  std::vector<Interval> lifetimes = {{1, 2}, {1, 4}, {3, 4}};
  std::vector<std::uint64_t> sizes = {2, 4, 4};
  PackingWitness w = enumerate_min_packing(lifetimes, sizes);
  CHECK(w.min_peak == 8);
  REQUIRE(w.addresses.size() == 3);
  std::uint64_t top = 0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    top = std::max(top, w.addresses[i] + sizes[i]);
    for (size_t j = i + 1; j < sizes.size(); ++j) {
      if (intervals_disjoint(lifetimes[i], lifetimes[j])) continue;
      bool overlap = w.addresses[i] < w.addresses[j] + sizes[j] &&
                     w.addresses[j] < w.addresses[i] + sizes[i];
      CHECK_FALSE(overlap);
    }
  }
  CHECK(top == 8);
}

TEST_CASE("degenerate packings have obvious answers") {
  CHECK(enumerate_min_packing({{1, 1}, {2, 2}, {3, 3}}, {9, 1, 1}).min_peak ==
        9);
  CHECK(enumerate_min_packing({{1, 2}, {1, 2}}, {2, 3}).min_peak == 5);
  CHECK(enumerate_min_packing({}, {}).min_peak == 0);

  PackingWitness zero = enumerate_min_packing({{1, 3}, {1, 3}}, {0, 4});
  CHECK(zero.min_peak == 4);
  CHECK(zero.addresses[0] == 0);

  CHECK_THROWS_AS(enumerate_min_packing({{1, 1}}, {1, 2}), Error);
}

TEST_CASE("packing search stops cleanly past its budget") {
  std::vector<Interval> lifetimes(8, Interval{1, 2});
  std::vector<std::uint64_t> sizes(8, 2);
  CHECK_THROWS_AS(enumerate_min_packing(lifetimes, sizes), BudgetExceeded);

  OracleBudget tiny;
  tiny.max_states = 2;
  CHECK_THROWS_AS(
      enumerate_min_packing({{1, 2}, {1, 2}, {1, 2}}, {2, 2, 2}, tiny),
      BudgetExceeded);
}
