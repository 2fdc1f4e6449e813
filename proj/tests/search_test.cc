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


#include "meshsearch/search.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "meshsearch/cost_model.h"
#include "meshsearch/oracle.h"
#include "random_graphs.h"
#include "test_graphs.h"

namespace meshsearch {
namespace {

using ::meshsearch::testing::BuildOrDie;
using ::meshsearch::testing::Fig2Graph;
using ::meshsearch::testing::MakeMesh;
using ::meshsearch::testing::MakeProblem;
using ::meshsearch::testing::MatmulChainGraph;
using ::meshsearch::testing::RandomTinyGraph;

TEST(UctTest, SelectsHigherBound) {
  std::vector<UctCandidate> c = {{2, 1.0, "a"}, {8, 3.2, "b"}};
  EXPECT_NEAR(UctScore(c[0], 10, 1.0), 0.5 + std::sqrt(std::log(10.0) / 2),
              1e-12);
  EXPECT_NEAR(UctScore(c[0], 10, 1.0), 1.5730, 1e-4);
  EXPECT_NEAR(UctScore(c[1], 10, 1.0), 0.9365, 1e-4);
  EXPECT_EQ(SelectCandidate(c, 10, 1.0), 0);
}

TEST(UctTest, ZeroExplorationIsGreedy) {
  std::vector<UctCandidate> c = {{2, 0.8, "a"}, {8, 4.0, "b"}};
  EXPECT_EQ(SelectCandidate(c, 10, 0.0), 1);
}

TEST(UctTest, TiesGoToSmallestDigest) {
  std::vector<UctCandidate> c = {{4, 2.0, "1:b"}, {4, 2.0, "0:b"}};
  EXPECT_EQ(SelectCandidate(c, 8, 1.0), 1);
}

TEST(UctTest, UnvisitedFirstAndExhaustedSkipped) {
  std::vector<UctCandidate> c = {
      {4, 4.0, "a"}, {0, 0.0, "c"}, {0, 0.0, "b", /*exhausted=*/true}};
  EXPECT_EQ(SelectCandidate(c, 4, 1.0), 1);
  c[1].exhausted = true;
  EXPECT_EQ(SelectCandidate(c, 4, 1.0), 0);
  c[0].exhausted = true;
  EXPECT_EQ(SelectCandidate(c, 4, 1.0), -1);
}

CostEstimate Cost(double runtime, int64_t peak, double penalized) {
  CostEstimate c;
  c.runtime_seconds = runtime;
  c.peak_memory_bytes = peak;
  c.penalized_cost = penalized;
  return c;
}

TEST(RewardTest, Ratios) {
  const CostEstimate base = Cost(4, 400, 8);
  EXPECT_DOUBLE_EQ(Reward(base, base, Objective::kRuntime), 0.5);
  EXPECT_DOUBLE_EQ(Reward(Cost(2, 400, 8), base, Objective::kRuntime), 1.0);
  EXPECT_DOUBLE_EQ(Reward(Cost(1, 400, 8), base, Objective::kRuntime), 1.0);
  EXPECT_DOUBLE_EQ(Reward(Cost(16, 400, 8), base, Objective::kRuntime), 0.125);
  EXPECT_DOUBLE_EQ(Reward(Cost(4, 800, 8), base, Objective::kMemory), 0.25);
  EXPECT_DOUBLE_EQ(Reward(Cost(4, 400, 4), base, Objective::kPenalizedRuntime),
                   1.0);
}

TEST(ObjectiveTest, ParseNames) {
  EXPECT_EQ(*ParseObjective("rt"), Objective::kRuntime);
  EXPECT_EQ(*ParseObjective("MEM"), Objective::kMemory);
  EXPECT_EQ(*ParseObjective("penalized_runtime"), Objective::kPenalizedRuntime);
  EXPECT_FALSE(ParseObjective("speed").ok());
}

SearchConfig Config(int64_t budget, uint64_t seed) {
  SearchConfig cfg;
  cfg.trajectory_budget = budget;
  cfg.seed = seed;
  return cfg;
}

TEST(SearchTest, TinyGraphFindsOracleOptimum) {
  auto problem = MakeProblem(MatmulChainGraph(), MakeMesh("b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  for (Objective objective : {Objective::kRuntime, Objective::kMemory}) {
    absl::StatusOr<OracleEntry> best =
        ExhaustiveBest(s0, 0b1, -1, objective, {});
    ASSERT_TRUE(best.ok());
    SearchConfig cfg = Config(200, 3);
    cfg.objective = objective;
    SearchResult r = RunSearch(s0, 0b1, cfg, {});
    EXPECT_EQ(Metric(r.best_cost, objective), Metric(best->cost, objective));
  }
}

TEST(SearchTest, BudgetOneRunsOneRollout) {
  auto problem = MakeProblem(MatmulChainGraph(), MakeMesh("b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  for (uint64_t seed = 0; seed < 8; ++seed) {
    std::vector<TraceRow> trace;
    SearchResult r = RunSearch(s0, 0b1, Config(1, seed), {}, &trace);
    EXPECT_EQ(r.trajectories_used, 1);
    ASSERT_EQ(trace.size(), 1u);
    ModuleState end = s0;
    for (const Action& a : r.best_plan) end = *ApplyAction(end, a);
    EXPECT_EQ(Estimate(end, {}), r.best_cost);
    const double root = Estimate(s0, {}).penalized_cost;
    EXPECT_LE(r.best_cost.penalized_cost, root);
    EXPECT_EQ(trace[0].best_metric, r.best_cost.penalized_cost);
  }
}

TEST(SearchTest, Deterministic) {
  auto problem = MakeProblem(RandomTinyGraph(11), MakeMesh("a=2,b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  std::vector<TraceRow> t1, t2;
  SearchResult a = RunSearch(s0, 0b11, Config(150, 5), {}, &t1);
  SearchResult b = RunSearch(s0, 0b11, Config(150, 5), {}, &t2);
  EXPECT_EQ(a.best_plan, b.best_plan);
  EXPECT_EQ(a.best_cost, b.best_cost);
  EXPECT_EQ(a.trajectories_to_best, b.trajectories_to_best);
  EXPECT_EQ(a.tree_nodes, b.tree_nodes);
  ASSERT_EQ(t1.size(), t2.size());
  for (size_t i = 0; i < t1.size(); ++i) {
    EXPECT_EQ(t1[i].fingerprint, t2[i].fingerprint);
    EXPECT_EQ(t1[i].reward, t2[i].reward);
  }
}

TEST(SearchTest, ParallelExpansionMatchesSerial) {
  auto problem = MakeProblem(RandomTinyGraph(12), MakeMesh("a=2,b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  SearchConfig serial = Config(150, 9);
  SearchConfig parallel = serial;
  parallel.parallel_expand = true;
  SearchResult a = RunSearch(s0, 0b11, serial, {});
  SearchResult b = RunSearch(s0, 0b11, parallel, {});
  EXPECT_EQ(a.best_plan, b.best_plan);
  EXPECT_EQ(a.best_cost, b.best_cost);
  EXPECT_EQ(a.tree_nodes, b.tree_nodes);
}

TEST(SearchTest, BestCostIsItsStateEstimate) {
  auto problem = MakeProblem(RandomTinyGraph(13), MakeMesh("a=2,b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  SearchResult r = RunSearch(s0, 0b11, Config(100, 1), {});
  EXPECT_EQ(Estimate(r.best_state, {}), r.best_cost);
  ModuleState replayed = s0;
  for (const Action& a : r.best_plan) replayed = *ApplyAction(replayed, a);
  EXPECT_EQ(ComputeFingerprint(replayed), ComputeFingerprint(r.best_state));
}

TEST(SearchTest, NoLegalActionsReturnsStart) {
  GraphBuilder b("odd");
  ValueId x = b.AddArg("x", {{3, 5}}, ArgRole::kData, 0);
  b.AddOutput(b.Unary("y", "tanh", x));
  auto problem = MakeProblem(BuildOrDie(std::move(b)), MakeMesh("b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  SearchResult r = RunSearch(s0, 0b1, Config(10, 0), {});
  EXPECT_EQ(r.best_state, s0);
  EXPECT_EQ(r.best_cost, Estimate(s0, {}));
  EXPECT_TRUE(r.best_plan.empty());
  EXPECT_LE(r.trajectories_used, 10);
}

TEST(SearchTest, BudgetAccountingAndAnytime) {
  auto problem = MakeProblem(RandomTinyGraph(21), MakeMesh("a=2,b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  double previous = Estimate(s0, {}).penalized_cost;
  for (int64_t budget : {1, 5, 20, 80, 320}) {
    SearchResult r = RunSearch(s0, 0b11, Config(budget, 4), {});
    EXPECT_LE(r.trajectories_used, budget);
    EXPECT_LE(r.best_cost.penalized_cost, previous) << "budget " << budget;
    previous = r.best_cost.penalized_cost;
  }
}

TEST(SearchTest, TreeNodesBoundedByReachableFingerprints) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto problem = MakeProblem(RandomTinyGraph(seed), MakeMesh("a=2,b=2"));
    ModuleState s0 = ModuleState::Initial(problem);
    const int depth = problem->num_groups();
    Enumeration e = *EnumerateStates(s0, 0b11, depth, {});
    SearchResult r = RunSearch(s0, 0b11, Config(300, seed), {});
    EXPECT_LE(r.tree_nodes, static_cast<int64_t>(e.states.size()));
    EXPECT_LE(r.distinct_states_visited, static_cast<int64_t>(e.states.size()));
  }
}

TEST(SearchTest, SaturatedSearchSeesEveryState) {
  auto problem = MakeProblem(Fig2Graph(), MakeMesh("b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  Enumeration e = *EnumerateStates(s0, 0b1, problem->num_groups(), {});
  SearchResult r = RunSearch(s0, 0b1, Config(1000, 0), {});
  EXPECT_TRUE(r.exhausted);
  EXPECT_LT(r.trajectories_used, 1000);
  EXPECT_EQ(r.tree_nodes, static_cast<int64_t>(e.states.size()));
  EXPECT_EQ(r.distinct_states_visited, static_cast<int64_t>(e.states.size()));
}

// (x, 0, b) and (bias, 0, b) reach one state and share one edge.
TEST(SearchTreeTest, GroupsActionsReachingOneChild) {
  auto problem = MakeProblem(Fig2Graph(), MakeMesh("b=2"));
  ModuleState s0 = ModuleState::Initial(problem);
  SearchTree tree(s0, 0b1, Config(10, 0), {});
  ASSERT_TRUE(tree.RunTrajectory());
  const SearchTree::Node& root = tree.node(0);
  ASSERT_TRUE(root.expanded);
  const SearchTree::Edge* shared = nullptr;
  for (const SearchTree::Edge& e : root.edges) {
    if (std::find(e.actions.begin(), e.actions.end(), Action{0, 0, 0}) !=
        e.actions.end()) {
      shared = &e;
    }
  }
  ASSERT_NE(shared, nullptr);
  EXPECT_EQ(shared->actions, (std::vector<Action>{{0, 0, 0}, {2, 0, 0}}));
  int64_t total_actions = 0;
  for (const SearchTree::Edge& e : root.edges) total_actions += e.actions.size();
  EXPECT_EQ(total_actions, static_cast<int64_t>(LegalActions(s0, 0).size()));
  EXPECT_LT(root.edges.size(), LegalActions(s0, 0).size());
}

TEST(SearchTreeTest, Backpropagate) {
  auto problem = MakeProblem(Fig2Graph(), MakeMesh("b=2"));
  SearchTree tree(ModuleState::Initial(problem), 0b1, Config(10, 0), {});
  ASSERT_TRUE(tree.RunTrajectory());
  const int child = tree.node(0).edges.front().child;
  const int64_t root_n = tree.node(0).visits;
  const int64_t child_n = tree.node(child).visits;
  const double root_w = tree.node(0).total_value;
  const double child_w = tree.node(child).total_value;
  tree.Backpropagate({0, child}, 0.75);
  EXPECT_EQ(tree.node(0).visits, root_n + 1);
  EXPECT_EQ(tree.node(child).visits, child_n + 1);
  EXPECT_DOUBLE_EQ(tree.node(0).total_value, root_w + 0.75);
  EXPECT_DOUBLE_EQ(tree.node(child).total_value, child_w + 0.75);
  tree.Backpropagate({0, child}, 0.0);
  EXPECT_EQ(tree.node(child).visits, child_n + 2);
  EXPECT_DOUBLE_EQ(tree.node(child).total_value, child_w + 0.75);
}

TEST(SearchTreeTest, VisitsAccountForEveryTrajectory) {
  auto problem = MakeProblem(RandomTinyGraph(3), MakeMesh("a=2,b=2"));
  SearchTree tree(ModuleState::Initial(problem), 0b11, Config(50, 2), {});
  int runs = 0;
  while (runs < 50 && tree.RunTrajectory()) ++runs;
  EXPECT_EQ(tree.node(0).visits, runs);
  for (int i = 0; i < tree.num_nodes(); ++i) {
    const SearchTree::Node& n = tree.node(i);
    EXPECT_EQ(tree.FindNode(n.fingerprint), i);
    for (const SearchTree::Edge& e : n.edges) {
      EXPECT_GE(e.child, 0);
      EXPECT_LT(e.child, tree.num_nodes());
    }
  }
}

}  // namespace
}  // namespace meshsearch
