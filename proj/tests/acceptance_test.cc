/* Copyright 2026 The Meshsearch Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "meshsearch/cli.h"
#include "meshsearch/cost_model.h"
#include "meshsearch/json_io.h"
#include "meshsearch/meta_controller.h"
#include "meshsearch/model_zoo.h"
#include "meshsearch/oracle.h"
#include "meshsearch/partition.h"
#include "meshsearch/search.h"
#include "random_graphs.h"

namespace meshsearch {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int failures = 0;

void Report(int id, const std::string& title, bool pass,
            const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << " " << title << ": "
            << detail << std::endl;
}

void Info(const std::string& text) { std::cout << "       " << text << std::endl; }

std::shared_ptr<const PartitionProblem> Problem(absl::StatusOr<Graph> graph,
                                                const Mesh& mesh) {
  if (!graph.ok()) {
    std::cerr << graph.status() << "\n";
    std::exit(1);
  }
  auto problem = PartitionProblem::Create(*std::move(graph), mesh);
  if (!problem.ok()) {
    std::cerr << problem.status() << "\n";
    std::exit(1);
  }
  return *std::move(problem);
}

ModuleState Replay(const ModuleState& start, const std::vector<Action>& plan) {
  ModuleState s = start;
  for (const Action& a : plan) s = *ApplyAction(s, a);
  return s;
}

std::vector<ScheduleOutcome> RunSeeds(const ModuleState& start,
                                      const std::string& schedule,
                                      int64_t budget, int count,
                                      const CostModelConfig& cfg) {
  Schedule s = *BuiltinSchedule(schedule, start.mesh(), budget);
  std::vector<ScheduleOutcome> out;
  for (auto& r : RunSeedsParallel(start, s, cfg, ScheduleOptions{}, count)) {
    out.push_back(*std::move(r));
  }
  return out;
}

bool ZeroPattern(const CostEstimate& c, int64_t bpmt_all_reduce) {
  return c.counts.all_gather() > 0 && c.counts.reduce_scatter() > 0 &&
         c.counts.all_reduce() < bpmt_all_reduce;
}

struct Desk {
  Mesh mesh = *Mesh::Parse("batch=2,model=2");
  std::shared_ptr<const PartitionProblem> problem =
      Problem(BuildTransformer({}, &mesh), mesh);
  ModuleState start = ModuleState::Initial(problem);
  CostEstimate Expert(TransformerStrategy s) const {
    return Estimate(Replay(start, TransformerExpertPlan(s)), {});
  }
};

constexpr int64_t kDeskBudget = 2000;
constexpr int kDeskSeeds = 10;

void CompositeDiscovery(const Desk& desk, int* meta_hits,
                        std::vector<ScheduleOutcome>* outcomes) {
  const int64_t bpmt =
      desk.Expert(TransformerStrategy::kBatchMegatron).counts.all_reduce();
  const auto t0 = Clock::now();
  *outcomes = RunSeeds(desk.start, "RT1_RT2_MEM1", kDeskBudget, kDeskSeeds, {});
  const double elapsed = Seconds(t0);
  *meta_hits = 0;
  for (const ScheduleOutcome& o : *outcomes) {
    *meta_hits += ZeroPattern(o.final_cost, bpmt);
  }
  Report(1, "composite-strategy discovery", *meta_hits >= 8 && elapsed < 600,
         absl::StrFormat("%d/10 seeds end in the ZeRO-3 pattern (need >= 8); "
                         "BP+MT AllReduce %d; %.1f s (limit 600 s)",
                         *meta_hits, bpmt, elapsed));
}

void CollectiveTable(const Desk& desk) {
  const CostEstimate bp = desk.Expert(TransformerStrategy::kBatch);
  const CostEstimate mt = desk.Expert(TransformerStrategy::kBatchMegatron);
  const CostEstimate z = desk.Expert(TransformerStrategy::kBatchMegatronZero3);
  auto row = [](const CostEstimate& c) {
    return absl::StrCat(c.counts.all_reduce(), "/", c.counts.all_gather(), "/",
                        c.counts.reduce_scatter());
  };
  const bool pattern =
      bp.counts.all_reduce() > 0 &&
      bp.counts.all_gather() + bp.counts.reduce_scatter() == 0 &&
      mt.counts.all_gather() + mt.counts.reduce_scatter() == 0 &&
      mt.counts.all_reduce() > bp.counts.all_reduce() &&
      z.counts.all_gather() > 0 && z.counts.reduce_scatter() > 0 &&
      z.counts.all_reduce() < mt.counts.all_reduce();
  // Golden counts frozen from the first verified run.
  const bool golden = row(bp) == "13/0/0" && row(mt) == "22/0/0" &&
                      row(z) == "10/21/12";
  Report(2, "collective-pattern table", pattern && golden,
         absl::StrCat("AR/AG/RS  BP ", row(bp), ", BP+MT ", row(mt),
                      ", BP+MT+ZeRO3 ", row(z),
                      golden ? " (golden)" : " (golden 13/0/0, 22/0/0, 10/21/12)"));
}

void OracleEquivalence() {
  const Mesh mesh = *Mesh::Parse("a=2,b=2");
  constexpr int kGraphs = 20;
  constexpr int kSeeds = 3;
  int per_seed[kSeeds] = {};
  int merged = 0;
  for (int g = 0; g < kGraphs; ++g) {
    auto problem = Problem(testing::RandomTinyGraph(1000 + g), mesh);
    const ModuleState s0 = ModuleState::Initial(problem);
    const AxisMask axes = mesh.all_axes();
    const Enumeration all = *EnumerateStates(s0, axes, -1, {});
    const double optimum =
        BestEntry(all, Objective::kPenalizedRuntime).cost.penalized_cost;
    double best = std::numeric_limits<double>::infinity();
    for (int seed = 0; seed < kSeeds; ++seed) {
      SearchConfig cfg;
      cfg.trajectory_budget = 500;
      cfg.seed = seed;
      // Deep enough for every group to take an action on every axis.
      cfg.max_depth = problem->num_groups() * AxisCount(axes);
      const double found = RunSearch(s0, axes, cfg, {}).best_cost.penalized_cost;
      per_seed[seed] += found == optimum;
      best = std::min(best, found);
    }
    merged += best == optimum;
  }
  const int worst = *std::min_element(per_seed, per_seed + kSeeds);
  Report(3, "oracle equivalence", worst >= 18 && merged == kGraphs,
         absl::StrFormat("exact matches per seed %d/%d/%d of 20 (need >= 18), "
                         "min-merged %d/20",
                         per_seed[0], per_seed[1], per_seed[2], merged));
}

void StateCompression() {
  const Mesh mesh = *Mesh::Parse("b=2");
  GraphBuilder b("fig2");
  ValueId x = b.AddArg("x", {{8, 4}}, ArgRole::kData, 0);
  ValueId w = b.AddArg("w", {{4, 8}}, ArgRole::kParameter, 1);
  ValueId bias = b.AddArg("b", {{8, 8}}, ArgRole::kParameter, 2);
  b.AddOutput(b.Binary("z", "add", b.Dot("y", x, w, {1}, {0}), bias));
  auto problem = Problem(std::move(b).Build(), mesh);
  const Enumeration e =
      *EnumerateStates(ModuleState::Initial(problem), mesh.all_axes(), 2, {});
  const int64_t states = static_cast<int64_t>(e.states.size());
  Report(4, "state compression", states < e.action_sequences,
         absl::StrCat(states, " distinct fingerprints vs ", e.action_sequences,
                      " action sequences of length <= 2"));
}

void MetaControllerNecessity(const Desk& desk, int meta_hits) {
  const int64_t bpmt =
      desk.Expert(TransformerStrategy::kBatchMegatron).counts.all_reduce();
  int none_hits = 0;
  for (const ScheduleOutcome& o :
       RunSeeds(desk.start, "NONE", kDeskBudget, kDeskSeeds, {})) {
    none_hits += ZeroPattern(o.final_cost, bpmt);
  }
  Report(5, "meta-controller necessity", none_hits < meta_hits,
         absl::StrFormat("ZeRO-3 pattern in %d/10 seeds with NONE vs %d/10 "
                         "with RT1_RT2_MEM1",
                         none_hits, meta_hits));
}

double Throughput(const Desk& desk, const std::string& schedule) {
  Schedule s = *BuiltinSchedule(schedule, desk.mesh, 500);
  const auto t0 = Clock::now();
  ScheduleOutcome out = *RunSchedule(desk.start, s, {}, ScheduleOptions{});
  const double elapsed = Seconds(t0);
  int64_t used = 0;
  for (const GoalOutcome& g : out.goals) used += g.result.trajectories_used;
  return used / elapsed;
}

void ThroughputOrdering(const Desk& desk) {
  const double meta = Throughput(desk, "RT1_RT2_MEM1");
  const double none = Throughput(desk, "NONE");
  Report(6, "throughput ordering", meta >= none,
         absl::StrFormat("%.0f trajectories/s with single-axis goals vs %.0f "
                         "with all-axis enumeration (%.2fx)",
                         meta, none, meta / none));
}

void PlanLength(const Desk& desk,
                const std::vector<ScheduleOutcome>& outcomes) {
  const int64_t bpmt =
      desk.Expert(TransformerStrategy::kBatchMegatron).counts.all_reduce();
  size_t longest = 0;
  int found = 0;
  for (const ScheduleOutcome& o : outcomes) {
    if (!ZeroPattern(o.final_cost, bpmt)) continue;
    ++found;
    longest = std::max(longest, o.plan.size());
  }
  Report(7, "plan length", found > 0 && longest <= 13,
         absl::StrFormat("longest discovered ZeRO-3 plan has %d actions "
                         "(limit 13) over %d plans",
                         longest, found));
}

void CostModelProperties(const Desk& desk) {
  bool scaling = true;
  for (int n : {2, 4, 8}) {
    const Mesh mesh = *Mesh::Parse(absl::StrCat("b=", n));
    GraphBuilder b("matmul");
    ValueId x = b.AddArg("x", {{64, 32}}, ArgRole::kData, 0);
    ValueId w = b.AddArg("w", {{32, 64}}, ArgRole::kParameter, 1);
    b.AddOutput(b.Dot("y", x, w, {1}, {0}));
    auto problem = Problem(std::move(b).Build(), mesh);
    const ModuleState s0 = ModuleState::Initial(problem);
    const double full = Estimate(s0, {}).compute_seconds;
    const double split =
        Estimate(*ApplyAction(s0, Action{0, 0, 0}), {}).compute_seconds;
    scaling = scaling && split == full / n;
  }
  const CostModelConfig cfg;
  bool identity = true;
  for (int64_t n : {2, 4, 8}) {
    for (int64_t payload : {int64_t{128}, int64_t{1} << 20}) {
      const double ar = CollectiveTime(CollectiveKind::kAllReduce, payload, n,
                                       cfg.default_link);
      const double ag = CollectiveTime(CollectiveKind::kAllGather, payload, n,
                                       cfg.default_link);
      const double rs = CollectiveTime(CollectiveKind::kReduceScatter, payload,
                                       n, cfg.default_link);
      identity = identity && ar == ag + rs;
    }
  }
  const int64_t bp_peak =
      desk.Expert(TransformerStrategy::kBatch).peak_memory_bytes;
  const int64_t zero_peak =
      desk.Expert(TransformerStrategy::kBatchMegatronZero3).peak_memory_bytes;
  Report(8, "cost-model unit properties",
         scaling && identity && zero_peak < bp_peak,
         absl::StrCat("1/n compute scaling ", scaling ? "exact" : "BROKEN",
                      "; AllReduce = AllGather + ReduceScatter ",
                      identity ? "exact" : "BROKEN", "; ZeRO-3 peak ",
                      zero_peak, " B < BP peak ", bp_peak, " B"));
}

std::string CliOut(const std::vector<std::string>& args, int* code) {
  std::ostringstream out, err;
  *code = RunCli(args, out, err);
  return out.str();
}

void DeterminismAndReplay(const Desk& desk,
                          const std::vector<ScheduleOutcome>& outcomes) {
  const std::vector<std::string> search = {
      "search", "--model", "transformer", "--mesh", "batch=2,model=2",
      "--schedule", "RT1_RT2_MEM1", "--budget", "2000", "--seed", "7"};
  int c1 = 0, c2 = 0, c3 = 0;
  const std::string a = CliOut(search, &c1);
  const std::string b = CliOut(search, &c2);
  const bool identical = c1 == 0 && c2 == 0 && a == b;

  const std::string path = "acceptance_report.json";
  bool cli_replay = WriteTextFile(path, a).ok();
  if (cli_replay) {
    const std::string e = CliOut({"estimate", "--model", "transformer",
                                  "--mesh", "batch=2,model=2", "--plan", path},
                                 &c3);
    const Json report = Json::parse(a);
    const Json estimate = Json::parse(e);
    cli_replay = c3 == 0 && estimate["cost"] == report["cost"] &&
                 estimate["fingerprint"] == report["plan"]["fingerprint"];
  }
  std::remove(path.c_str());

  int replayed = 0;
  for (const ScheduleOutcome& o : outcomes) {
    absl::StatusOr<ModuleState> s = ReplayPlan(
        desk.start, MakePlan(*desk.problem, o.plan, o.fingerprint));
    replayed += s.ok() && ComputeFingerprint(*s) == o.fingerprint &&
                Estimate(*s, {}) == o.final_cost;
  }
  Report(9, "determinism and replay",
         identical && cli_replay && replayed == static_cast<int>(outcomes.size()),
         absl::StrFormat("repeated CLI search %s; CLI report replays %s; "
                         "%d/%d schedule plans replay to fingerprint and cost",
                         identical ? "bit-identical" : "DIFFERS",
                         cli_replay ? "exactly" : "WRONG", replayed,
                         outcomes.size()));
}

struct Comparison {
  double searched;
  double baseline;
};

Comparison AgainstBaseline(absl::StatusOr<Graph> graph,
                           const std::vector<Action>& baseline_plan,
                           const std::string& schedule) {
  const Mesh mesh = *Mesh::Parse("batch=2,model=2");
  auto problem = Problem(std::move(graph), mesh);
  const ModuleState s0 = ModuleState::Initial(problem);
  Comparison c;
  c.baseline = Estimate(Replay(s0, baseline_plan), {}).penalized_cost;
  c.searched = std::numeric_limits<double>::infinity();
  for (const ScheduleOutcome& o : RunSeeds(s0, schedule, 2000, 5, {})) {
    c.searched = std::min(c.searched, o.final_cost.penalized_cost);
  }
  return c;
}

void BaselineComparisons() {
  const Mesh mesh = *Mesh::Parse("batch=2,model=2");
  const Comparison gns =
      AgainstBaseline(BuildGnsLike({}, &mesh), GnsEdgeShardingPlan(mesh),
                      "RT_MP_ALL");
  const Comparison unet = AgainstBaseline(
      BuildUNetLike({}, &mesh), UNetBatchZero3Plan({}), "RT_MP_ALL");
  Report(10, "baseline comparisons",
         gns.searched <= gns.baseline && unet.searched <= unet.baseline,
         absl::StrFormat("RT_MP_ALL, 5 seeds min-merged: GNS %.6g s vs "
                         "edge-sharding %.6g s; UNet %.6g s vs BP+ZeRO3 %.6g s",
                         gns.searched, gns.baseline, unet.searched,
                         unet.baseline));
  const Comparison gns_mem =
      AgainstBaseline(BuildGnsLike({}, &mesh), GnsEdgeShardingPlan(mesh),
                      "RT_MEM_ALL");
  Info(absl::StrFormat("info: with RT_MEM_ALL the GNS search reaches %.6g s "
                       "vs edge-sharding %.6g s (%s)",
                       gns_mem.searched, gns_mem.baseline,
                       gns_mem.searched <= gns_mem.baseline ? "not worse"
                                                            : "worse"));
}

}  // namespace
}  // namespace meshsearch

int main() {
  using namespace meshsearch;
  const auto t0 = Clock::now();
  const Desk desk;
  int meta_hits = 0;
  std::vector<ScheduleOutcome> outcomes;
  CompositeDiscovery(desk, &meta_hits, &outcomes);
  CollectiveTable(desk);
  OracleEquivalence();
  StateCompression();
  MetaControllerNecessity(desk, meta_hits);
  ThroughputOrdering(desk);
  PlanLength(desk, outcomes);
  CostModelProperties(desk);
  DeterminismAndReplay(desk, outcomes);
  BaselineComparisons();
  std::cout << (failures == 0 ? "all criteria pass" : "some criteria fail")
            << absl::StrFormat(" (%.1f s)", Seconds(t0)) << std::endl;
  return failures == 0 ? 0 : 1;
}
