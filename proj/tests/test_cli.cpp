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
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "memplan/graph_io.hpp"
#include "memplan/pipeline.hpp"
#include "memplan/plan.hpp"
#include "test_util.hpp"

namespace {

struct CliResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

const char* cli_binary() {
#ifdef MEMPLAN_CLI_PATH
  return MEMPLAN_CLI_PATH;
#else
  const char* env = std::getenv("MEMPLAN_CLI");
  REQUIRE(env != nullptr);
  return env;
#endif
}

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(cli_binary()) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

bool contains(const CliResult& result, const std::string& needle) {
  return result.output.find(needle) != std::string::npos;
}

std::string fx(const char* name) { return testutil::fixture_path(name); }

}  // namespace

TEST_CASE("plan writes, reports and validates a chain") {
  const std::string out = "/tmp/memplan_cli_chain3.plan.json";
  CliResult plan = run_cli("plan " + fx("chain3.json") + " -o " + out);
  CAPTURE(plan.output);
  CHECK(plan.code == 0);
  CHECK(contains(plan, "sequence length: 3"));
  CHECK(contains(plan, "peak_rs: 6"));
  CHECK(contains(plan, "peak_mem: 6"));
  CHECK(contains(plan, "fragmentation: 0.000"));
  CHECK(contains(plan, "savings: 0.0%"));
  CHECK(contains(plan, "schedule: optimal"));
  CHECK(contains(plan, "placement: optimal"));
  CHECK(contains(plan, "validation: ok"));

  CliResult check = run_cli("validate " + out + " " + fx("chain3.json"));
  CHECK(check.code == 0);
  CHECK(check.output == "ok\n");
}

TEST_CASE("plan quotes the reordering savings") {
  CliResult result = run_cli("plan " + fx("order4.json") +
                             " -o /tmp/memplan_cli_order4.plan.json");
  CAPTURE(result.output);
  CHECK(result.code == 0);
  CHECK(contains(result, "peak_mem: 21"));
  CHECK(contains(result, "program_order_peak_rs: 30"));
  CHECK(contains(result, "savings: 30.0%"));
}

TEST_CASE("joint planning is selectable but exclusive") {
  CliResult joint = run_cli("plan --joint " + fx("chain3.json") +
                            " -o /tmp/memplan_cli_joint.plan.json");
  CHECK(joint.code == 0);
  CHECK(contains(joint, "peak_mem: 6"));

  CliResult both = run_cli("plan --joint --split " + fx("chain3.json") +
                           " -o /tmp/memplan_cli_both.plan.json");
  CHECK(both.code == 2);
}

TEST_CASE("plan reports the forced weight-update edge") {
  CliResult result = run_cli("plan " + fx("training_mini.json") +
                             " -o /tmp/memplan_cli_tm.plan.json");
  CHECK(result.code == 0);
  CHECK(contains(result, "control edges added: 1"));
  CHECK(contains(result, "peak_mem: 80"));
}

TEST_CASE("validate pins a tampered plan to its violation") {
  memplan::Graph g = testutil::make_chain3();
  memplan::MemoryPlan plan = memplan::plan_graph(g).plan;
  plan.addresses.at("e2") = plan.addresses.at("e1");
  const std::string bad = "/tmp/memplan_cli_tampered.plan.json";
  memplan::save_plan_file(plan, bad);
  memplan::save_graph_file(g, "/tmp/memplan_cli_chain3.json");

  CliResult result = run_cli("validate " + bad + " /tmp/memplan_cli_chain3.json");
  CHECK(result.code == 2);
  CHECK(contains(result, "below_above"));
}

TEST_CASE("bad invocations exit with the input code") {
  CHECK(run_cli("plan /tmp/no_such_graph.json -o /tmp/x.plan.json").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("plan").code == 2);
}

TEST_CASE("baseline reports arena fragmentation") {
  CliResult result = run_cli("baseline " + fx("pack3.json"));
  CAPTURE(result.output);
  CHECK(result.code == 0);
  CHECK(contains(result, "policy: first_fit"));
  CHECK(contains(result, "mr_peak: 10"));
  CHECK(contains(result, "rs_at_peak: 8"));
  CHECK(contains(result, "fragmentation: 0.200"));

  CliResult a = run_cli("baseline " + fx("pack3.json") + " --policy best_fit");
  CliResult b = run_cli("baseline " + fx("pack3.json") + " --policy best_fit");
  CHECK(a.code == 0);
  CHECK(a.output == b.output);
}

TEST_CASE("export-lp reproduces the golden model files") {
  const struct {
    const char* graph;
    const char* phase;
    const char* golden;
  } cases[] = {
      {"chain3.json", "schedule", "chain3_schedule.lp"},
      {"chain3.json", "joint", "chain3_joint.lp"},
      {"order4.json", "schedule", "order4_schedule.lp"},
      {"pack3.json", "address", "pack3_address.lp"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.golden);
    const std::string out = std::string("/tmp/memplan_cli_") + c.golden;
    CliResult result = run_cli("export-lp " + fx(c.graph) + " --phase " +
                               c.phase + " -o " + out);
    CHECK(result.code == 0);
    CHECK(memplan::read_text_file(out) == testutil::fixture_text(c.golden));
  }

  // Without -o the model goes to stdout unchanged.
  CliResult stdout_lp = run_cli("export-lp " + fx("chain3.json") +
                                " --phase schedule");
  CHECK(stdout_lp.output == testutil::fixture_text("chain3_schedule.lp"));
}

TEST_CASE("gen is deterministic and matches the stored fixture") {
  const std::string a = "/tmp/memplan_cli_gen_a.json";
  const std::string b = "/tmp/memplan_cli_gen_b.json";
  const std::string args =
      "gen --kind training_like --layers 1 --size 8 --seed 0 -o ";
  CHECK(run_cli(args + a).code == 0);
  CHECK(run_cli(args + b).code == 0);
  CHECK(memplan::read_text_file(a) == memplan::read_text_file(b));
  CHECK(memplan::read_text_file(a) ==
        testutil::fixture_text("training_mini.json"));
}

TEST_CASE("analyze prints the lifetime windows") {
  CliResult result = run_cli("analyze " + fx("chain3.json"));
  CHECK(result.code == 0);
  CHECK(contains(result, "node v2: asap 2 alap 2"));
  CHECK(contains(result, "edge e1: mul [1,2] pres [2,2]"));
}

TEST_CASE("schedule agrees with its oracle") {
  CliResult result = run_cli("schedule " + fx("order4.json") + " --oracle");
  CAPTURE(result.output);
  CHECK(result.code == 0);
  CHECK(contains(result, "t1: v1"));
  CHECK(contains(result, "peak_rs: 21"));
  CHECK(contains(result, "status: optimal"));
  CHECK(contains(result, "oracle min peak: 21 (agrees)"));
}

TEST_CASE("place agrees with its oracle") {
  CliResult result = run_cli("place " + fx("pack3.json") + " --oracle");
  CAPTURE(result.output);
  CHECK(result.code == 0);
  CHECK(contains(result, "A @ 4 (+2)"));
  CHECK(contains(result, "B @ 0 (+4)"));
  CHECK(contains(result, "peak_mem: 8"));
  CHECK(contains(result, "oracle min peak: 8 (agrees)"));
}

TEST_CASE("stats prints the program-order residency") {
  CliResult result = run_cli("stats " + fx("chain3.json"));
  CHECK(result.code == 0);
  CHECK(contains(result, "nodes: 3"));
  CHECK(contains(result, "t2: 6"));
  CHECK(contains(result, "peak_rs: 6"));
  CHECK(contains(result, "peak_step: 2"));
}

TEST_CASE("oversized exact solves exit with the solver code") {
  const std::string big = "/tmp/memplan_cli_big_chain.json";
  CHECK(run_cli("gen --kind chain --layers 25 -o " + big).code == 0);
  CliResult result = run_cli("schedule " + big);
  CHECK(result.code == 3);
  CHECK(contains(result, "error:"));
}

TEST_CASE("a timed-out plan is still written and valid") {
  const std::string graph = "/tmp/memplan_cli_t4.json";
  const std::string out = "/tmp/memplan_cli_t4.plan.json";
  CHECK(run_cli("gen --kind training_like --layers 4 --size 8 -o " + graph)
            .code == 0);
  CliResult result =
      run_cli("plan " + graph + " -o " + out + " --time-limit 1e-9");
  CAPTURE(result.output);
  CHECK(result.code == 4);
  CHECK(contains(result, "validation: ok"));
  CHECK(run_cli("validate " + out + " " + graph).code == 0);
}
