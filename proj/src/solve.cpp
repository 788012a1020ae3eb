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

#include "memplan/solve.hpp"

#include <signal.h>
#include <stdlib.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "memplan/encode.hpp"
#include "memplan/errors.hpp"
#include "memplan/lp_format.hpp"
#include "memplan/schedule.hpp"

namespace memplan {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasibleGap:
      return "feasible_gap";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kTimeout:
      return "timeout";
    case SolveStatus::kError:
      return "error";
  }
  return "error";
}

namespace {

constexpr std::uint64_t kUnset = std::numeric_limits<std::uint64_t>::max();

using Clock = std::chrono::steady_clock;

struct Deadline {
  Clock::time_point end;
  int counter = 0;

  explicit Deadline(double seconds)
      : end(Clock::now() +
            std::chrono::duration_cast<Clock::duration>(
                std::chrono::duration<double>(seconds))) {}

  // Cheap amortized check: the clock is read on the first call and then
  // once per 1024 calls, so an already-expired limit trips immediately even
  // when the search would finish in a handful of steps.
  bool expired() {
    if ((counter++ & 1023) != 0) return false;
    return Clock::now() >= end;
  }
};

struct TimeUp {};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Minimum over all topological orders of the running peak of resident
// bytes, by memoized search over executed-node subsets. The peak needed to
// finish from a state depends only on the set of executed nodes, not on how
// they were ordered, which is what makes the memoization sound.
class ScheduleSearch {
 public:
  ScheduleSearch(const Graph& graph, Deadline* deadline)
      : graph_(graph), deadline_(deadline) {
    const int n = graph.num_nodes();
    full_ = n == 0 ? 0 : (std::uint32_t{1} << n) - 1;
    id_order_.resize(n);
    std::iota(id_order_.begin(), id_order_.end(), 0);
    std::sort(id_order_.begin(), id_order_.end(),
              [&](NodeIndex a, NodeIndex b) {
                return graph.node(a).id < graph.node(b).id;
              });
    need_.assign(n, 0);
    fanout_bytes_.assign(n, 0);
    for (int v = 0; v < n; ++v) {
      for (EdgeIndex f : graph_.fanin(v))
        need_[v] |= std::uint32_t{1} << graph_.source_of(f);
      for (EdgeIndex e : graph_.fanout(v))
        fanout_bytes_[v] += graph_.edge(e).size;
    }
    sink_mask_.assign(graph.num_edges(), 0);
    for (int e = 0; e < graph.num_edges(); ++e)
      for (NodeIndex s : graph_.sinks_of(e))
        sink_mask_[e] |= std::uint32_t{1} << s;
    memo_.assign(std::size_t{1} << n, kUnset);
    memo_[full_] = 0;  // witness() walks by memo equality, final step included
  }

  std::uint64_t min_peak() { return graph_.num_nodes() == 0 ? 0 : run(0, 0); }

  std::vector<NodeIndex> witness() {
    std::vector<NodeIndex> order;
    std::uint32_t s = 0;
    std::uint64_t live = 0;
    while (s != full_) {
      for (NodeIndex v : id_order_) {
        if (!eligible(s, v)) continue;
        const std::uint64_t step = live + fanout_bytes_[v];
        const std::uint32_t next = s | (std::uint32_t{1} << v);
        if (std::max(step, memo_[next]) != memo_[s]) continue;
        order.push_back(v);
        live = step - died_bytes(s, v);
        s = next;
        break;
      }
    }
    return order;
  }

 private:
  bool eligible(std::uint32_t s, NodeIndex v) const {
    return ((s >> v) & 1) == 0 && (need_[v] & ~s) == 0;
  }

  // Bytes of edges whose last sink is v given that s already ran.
  std::uint64_t died_bytes(std::uint32_t s, NodeIndex v) const {
    std::uint64_t bytes = 0;
    const std::uint32_t after = s | (std::uint32_t{1} << v);
    for (EdgeIndex f : graph_.fanin(v))
      if ((sink_mask_[f] & ~after) == 0) bytes += graph_.edge(f).size;
    return bytes;
  }

  std::uint64_t run(std::uint32_t s, std::uint64_t live_after) {
    if (s == full_) return 0;
    if (memo_[s] != kUnset) return memo_[s];
    if (deadline_->expired()) throw TimeUp{};
    std::uint64_t best = kUnset;
    for (NodeIndex v : id_order_) {
      if (!eligible(s, v)) continue;
      const std::uint64_t step = live_after + fanout_bytes_[v];
      const std::uint64_t child =
          run(s | (std::uint32_t{1} << v), step - died_bytes(s, v));
      best = std::min(best, std::max(step, child));
    }
    memo_[s] = best;
    return best;
  }

  const Graph& graph_;
  Deadline* deadline_;
  std::uint32_t full_ = 0;
  std::vector<NodeIndex> id_order_;
  std::vector<std::uint32_t> need_;
  std::vector<std::uint64_t> fanout_bytes_;
  std::vector<std::uint32_t> sink_mask_;
  std::vector<std::uint64_t> memo_;
};

SolveOutcome schedule_outcome(const Graph& graph,
                              const std::vector<NodeIndex>& order,
                              SolveStatus status) {
  SolveOutcome outcome;
  outcome.status = status;
  outcome.order = order;
  const ScheduleMatrices matrices = matrices_from_order(graph, order);
  outcome.assignment = schedule_assignment(graph, matrices);
  outcome.objective = outcome.assignment.at(kPeakNoFragVar);
  return outcome;
}

}  // namespace

SolveOutcome solve_schedule_exact(const Graph& graph,
                                  const SolveConfig& config) {
  if (graph.num_nodes() > config.internal_limits.max_nodes)
    throw TooLarge("graph has " + std::to_string(graph.num_nodes()) +
                   " nodes, the subset search is capped at " +
                   std::to_string(config.internal_limits.max_nodes));
  const auto start = Clock::now();
  Deadline deadline(config.time_limit);
  ScheduleSearch search(graph, &deadline);
  try {
    const std::uint64_t peak = search.min_peak();
    SolveOutcome outcome =
        schedule_outcome(graph, search.witness(), SolveStatus::kOptimal);
    outcome.bound = static_cast<std::int64_t>(peak);
    outcome.wall_time = seconds_since(start);
    return outcome;
  } catch (const TimeUp&) {
    // Fall back to the program order so the caller still gets a plan.
    std::vector<NodeIndex> order(graph.num_nodes());
    std::iota(order.begin(), order.end(), 0);
    if (!is_topological_order(graph, order)) order = topological_order(graph);
    SolveOutcome outcome =
        schedule_outcome(graph, order, SolveStatus::kTimeout);
    outcome.detail = "time limit hit; returning the program-order schedule";
    outcome.wall_time = seconds_since(start);
    return outcome;
  }
}

namespace {

// Exhaustive search over packings enumerated in nondecreasing address
// order. Every optimal packing can be normalized, by sliding tensors down,
// into one where each tensor sits at 0 or on top of a tensor it overlaps in
// time; inserting tensors by (address, id rank) visits exactly those.
class PlacementSearch {
 public:
  PlacementSearch(const Graph& graph, const std::vector<Interval>& lifetimes,
                  const std::map<EdgeIndex, std::uint64_t>& preplaced,
                  std::int64_t node_budget, Deadline* deadline)
      : graph_(graph),
        lifetimes_(lifetimes),
        nodes_left_(node_budget),
        deadline_(deadline) {
    for (int e = 0; e < graph.num_edges(); ++e) {
      if (graph.edge(e).size == 0) continue;
      auto pre = preplaced.find(e);
      if (pre != preplaced.end()) {
        placed_.push_back({e, pre->second,
                           pre->second + graph.edge(e).size});
        obstacle_peak_ = std::max(obstacle_peak_, placed_.back().top);
      } else {
        tensors_.push_back(e);
      }
    }
    std::sort(tensors_.begin(), tensors_.end(),
              [&](EdgeIndex a, EdgeIndex b) {
                return graph.edge(a).id < graph.edge(b).id;
              });
    done_.assign(tensors_.size(), 0);
    lower_bound_ = obstacle_peak_;
    int horizon = 0;
    for (int e = 0; e < graph.num_edges(); ++e)
      if (graph.edge(e).size > 0)
        horizon = std::max(horizon, lifetimes[e].hi);
    for (int t = 1; t <= horizon; ++t) {
      std::uint64_t resident = 0;
      for (int e = 0; e < graph.num_edges(); ++e)
        if (graph.edge(e).size > 0 && lifetimes[e].contains(t))
          resident += graph.edge(e).size;
      lower_bound_ = std::max(lower_bound_, resident);
    }
  }

  int tensor_count() const { return static_cast<int>(tensors_.size()); }
  std::uint64_t lower_bound() const { return lower_bound_; }
  std::uint64_t best() const { return best_; }
  bool aborted() const { return aborted_; }
  bool timed_out() const { return timed_out_; }
  const std::map<EdgeIndex, std::uint64_t>& best_addresses() const {
    return best_addresses_;
  }

  void run() {
    remaining_ = static_cast<int>(tensors_.size());
    dfs(obstacle_peak_, 0, -1);
  }

 private:
  struct Placed {
    EdgeIndex edge;
    std::uint64_t addr;
    std::uint64_t top;
  };

  bool fits(EdgeIndex u, std::uint64_t at) const {
    const std::uint64_t top = at + graph_.edge(u).size;
    for (const Placed& w : placed_) {
      if (intervals_disjoint(lifetimes_[u], lifetimes_[w.edge])) continue;
      if (at < w.top && w.addr < top) return false;
    }
    return true;
  }

  void record() {
    best_addresses_.clear();
    for (const Placed& w : placed_) best_addresses_[w.edge] = w.addr;
  }

  void dfs(std::uint64_t peak, std::uint64_t last_addr, int last_rank) {
    if (best_ == lower_bound_ || aborted_) return;
    if (--nodes_left_ < 0) {
      aborted_ = true;
      return;
    }
    if (deadline_->expired()) {
      aborted_ = true;
      timed_out_ = true;
      return;
    }
    if (remaining_ == 0) {
      if (peak < best_) {
        best_ = peak;
        record();
      }
      return;
    }
    for (int rank = 0; rank < static_cast<int>(tensors_.size()); ++rank) {
      if (done_[rank]) continue;
      const EdgeIndex u = tensors_[rank];
      std::vector<std::uint64_t> candidates{0};
      for (const Placed& w : placed_)
        if (!intervals_disjoint(lifetimes_[u], lifetimes_[w.edge]))
          candidates.push_back(w.top);
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()),
                       candidates.end());
      for (std::uint64_t at : candidates) {
        if (at < last_addr || (at == last_addr && rank < last_rank)) continue;
        const std::uint64_t top = at + graph_.edge(u).size;
        if (top >= best_) break;  // candidates are sorted ascending
        if (!fits(u, at)) continue;
        placed_.push_back({u, at, top});
        done_[rank] = 1;
        --remaining_;
        dfs(std::max(peak, top), at, rank);
        ++remaining_;
        done_[rank] = 0;
        placed_.pop_back();
        if (best_ == lower_bound_ || aborted_) return;
      }
    }
  }

  const Graph& graph_;
  const std::vector<Interval>& lifetimes_;
  std::vector<Placed> placed_;  // obstacles stay at the front
  std::vector<EdgeIndex> tensors_;
  std::vector<char> done_;
  int remaining_ = 0;
  std::uint64_t obstacle_peak_ = 0;
  std::uint64_t lower_bound_ = 0;
  std::uint64_t best_ = kUnset;
  std::map<EdgeIndex, std::uint64_t> best_addresses_;
  std::int64_t nodes_left_;
  Deadline* deadline_;
  bool aborted_ = false;
  bool timed_out_ = false;
};

}  // namespace

SolveOutcome solve_placement_exact(
    const Graph& graph, const std::vector<Interval>& lifetimes,
    const std::map<EdgeIndex, std::uint64_t>& preplaced,
    const SolveConfig& config) {
  const auto start = Clock::now();
  Deadline deadline(config.time_limit);
  PlacementSearch search(graph, lifetimes, preplaced,
                         config.internal_limits.max_search_nodes, &deadline);
  if (search.tensor_count() > config.internal_limits.max_tensors)
    throw TooLarge("placement has " + std::to_string(search.tensor_count()) +
                   " free tensors, the exact placer is capped at " +
                   std::to_string(config.internal_limits.max_tensors));
  search.run();
  SolveOutcome outcome;
  outcome.wall_time = seconds_since(start);
  outcome.bound = static_cast<std::int64_t>(search.lower_bound());
  if (search.best() == kUnset) {
    // The very first descent always completes, so this is unreachable
    // unless the node budget is tiny.
    outcome.status = SolveStatus::kError;
    outcome.detail = "search budget exhausted before any packing was found";
    return outcome;
  }
  outcome.objective = static_cast<std::int64_t>(search.best());
  outcome.addresses = search.best_addresses();
  if (!search.aborted()) {
    outcome.status = SolveStatus::kOptimal;
    outcome.bound = outcome.objective;
  } else if (search.timed_out()) {
    outcome.status = SolveStatus::kTimeout;
    outcome.detail = "time limit hit; returning the best packing found";
  } else {
    outcome.status = SolveStatus::kFeasibleGap;
    outcome.detail = "node budget hit; returning the best packing found";
  }
  return outcome;
}

namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& suffix) {
    std::string pattern = "/tmp/memplanXXXXXX" + suffix;
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    int fd = ::mkstemps(buf.data(), static_cast<int>(suffix.size()));
    if (fd < 0) throw Error("cannot create a temporary file");
    ::close(fd);
    path_.assign(buf.data());
  }
  ~TempFile() { ::unlink(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string substitute(std::string text, const std::string& key,
                       const std::string& value) {
  size_t at = 0;
  while ((at = text.find(key, at)) != std::string::npos) {
    text.replace(at, key.size(), value);
    at += value.size();
  }
  return text;
}

void run_command(const std::string& cmd, double time_limit) {
  pid_t pid = ::fork();
  if (pid < 0) throw SolverProcessFailed("fork failed");
  if (pid == 0) {
    ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(time_limit));
  int status = 0;
  for (;;) {
    pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) throw SolverProcessFailed("waitpid failed");
    if (Clock::now() >= deadline) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw Timeout("solver command exceeded the time limit");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (!WIFEXITED(status))
    throw SolverProcessFailed("solver command died on a signal");
  if (WEXITSTATUS(status) != 0)
    throw SolverProcessFailed("solver command exited with code " +
                              std::to_string(WEXITSTATUS(status)));
}

Assignment parse_solution_file(const std::string& path,
                               const MilpModel& model) {
  std::ifstream in(path);
  if (!in) throw SolutionParseError("cannot open solution file " + path);
  const LpNames names = lp_names(model);
  Assignment assignment;
  std::string line;
  while (std::getline(in, line)) {
    const size_t comment = line.find('#');
    if (comment != std::string::npos) line.resize(comment);
    std::istringstream tokens(line);
    std::string name, value_text, extra;
    if (!(tokens >> name)) continue;  // blank line
    if (!(tokens >> value_text) || (tokens >> extra))
      throw SolutionParseError("expected `name value`, got: " + line);
    std::int64_t value = 0;
    try {
      size_t used = 0;
      value = std::stoll(value_text, &used);
      if (used != value_text.size()) throw std::invalid_argument(value_text);
    } catch (const std::exception&) {
      throw SolutionParseError("bad value for " + name + ": " + value_text);
    }
    auto it = names.to_var.find(name);
    if (it == names.to_var.end())
      throw SolutionParseError("unknown variable in solution: " + name);
    assignment[model.vars[it->second].name] = value;
  }
  return assignment;
}

}  // namespace

SolveOutcome solve_external(const MilpModel& model, const SolveConfig& config) {
  if (config.solver_cmd.empty())
    throw SolverProcessFailed("no solver command configured");
  const auto start = Clock::now();
  TempFile lp(".lp");
  TempFile sol(".sol");
  {
    std::ofstream out(lp.path());
    out << write_lp(model);
    if (!out) throw Error("cannot write " + lp.path());
  }
  std::string cmd = substitute(config.solver_cmd, "{lp}", lp.path());
  cmd = substitute(cmd, "{sol}", sol.path());
  run_command(cmd, config.time_limit);
  const Assignment assignment = parse_solution_file(sol.path(), model);
  const EvalResult result = evaluate(model, assignment);
  if (!result.feasible) {
    std::string tags;
    for (const auto& violation : result.violations) {
      if (!tags.empty()) tags += ", ";
      tags += violation.tag;
    }
    throw SolutionInfeasible("solver output violates: " + tags);
  }
  SolveOutcome outcome;
  outcome.status = SolveStatus::kOptimal;
  outcome.assignment = assignment;
  outcome.objective = result.objective;
  outcome.bound = result.objective;
  outcome.wall_time = seconds_since(start);
  return outcome;
}

}  // namespace memplan
