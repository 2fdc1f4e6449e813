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

#ifndef MESHSEARCH_SEARCH_H_
#define MESHSEARCH_SEARCH_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "meshsearch/cost_model.h"
#include "meshsearch/partition.h"

namespace meshsearch {

enum class Objective { kRuntime, kMemory, kPenalizedRuntime };

absl::string_view ObjectiveName(Objective objective);
// Accepts rt/runtime, mem/memory, prt/penalized/penalized_runtime.
absl::StatusOr<Objective> ParseObjective(absl::string_view text);

// The scalar a goal minimizes.
double Metric(const CostEstimate& cost, Objective objective);

// clamp(baseline / cost, 0, 2) / 2 on the objective's metric.
double Reward(const CostEstimate& cost, const CostEstimate& baseline,
              Objective objective);

struct SearchConfig {
  int64_t trajectory_budget = 100;
  double uct_c = 1.0;
  int max_depth = 0;  // 0 means the number of equi-shard groups
  uint64_t seed = 0;
  Objective objective = Objective::kRuntime;
  // Apply the actions of a node expansion with the OpenMP kernel.
  bool parallel_expand = false;
};

struct TraceRow {
  int64_t trajectory = 0;  // 1-based
  int depth = 0;
  std::string fingerprint;
  double reward = 0;
  double best_metric = 0;
};

struct SearchResult {
  ModuleState best_state;
  CostEstimate best_cost;
  // Actions leading from the start state to best_state.
  std::vector<Action> best_plan;
  int64_t trajectories_used = 0;
  // Trajectory that found the best state; 0 when the start state is best.
  int64_t trajectories_to_best = 0;
  // Distinct fingerprints whose cost was estimated.
  int64_t distinct_states_visited = 0;
  int64_t tree_nodes = 0;
  // Every reachable state was evaluated before the budget ran out.
  bool exhausted = false;
};

// Monte Carlo tree over fingerprints. A node's options are its distinct
// child states (every action reaching the same fingerprint is one edge
// group sharing the child's statistics) plus stopping at the node.
class SearchTree {
 public:
  struct Edge {
    std::vector<Action> actions;  // ascending
    int child = -1;
  };
  struct Node {
    ModuleState state;
    Fingerprint fingerprint;
    int depth = 0;
    std::vector<Action> plan;  // first path that reached the node
    bool expanded = false;
    std::vector<Edge> edges;   // ordered by child digest
    int64_t visits = 0;
    double total_value = 0;
    int64_t stop_visits = 0;
    double stop_value = 0;
    bool stop_exhausted = false;
    bool exhausted = false;
  };

  SearchTree(const ModuleState& start, AxisMask axes, const SearchConfig& cfg,
             const CostModelConfig& cost_cfg);

  // Runs one select/expand/rollout/backpropagate pass. Returns false without
  // doing anything once the whole reachable space is exhausted.
  bool RunTrajectory(TraceRow* row = nullptr);

  // Adds `reward` to every node on `path` (node indices, root first).
  void Backpropagate(const std::vector<int>& path, double reward);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int index) const { return nodes_[index]; }
  // Node index of a fingerprint, or -1.
  int FindNode(const Fingerprint& fp) const;
  bool exhausted() const { return nodes_[0].exhausted; }
  const CostEstimate& baseline() const { return baseline_; }

  SearchResult Result() const;

 private:
  int AddNode(ModuleState state, Fingerprint fp, int depth,
              std::vector<Action> plan);
  void Expand(int index);
  const CostEstimate& Evaluate(const ModuleState& state,
                               const std::string& digest);
  void Consider(const ModuleState& state, const std::string& digest,
                const CostEstimate& cost, const std::vector<Action>& plan);
  void RefreshExhausted(const std::vector<int>& path);

  AxisMask axes_;
  SearchConfig cfg_;
  CostModelConfig cost_cfg_;
  int max_depth_ = 0;
  std::vector<Node> nodes_;
  absl::flat_hash_map<std::string, int> index_;
  absl::flat_hash_map<std::string, CostEstimate> costs_;
  std::mt19937_64 rng_;
  CostEstimate baseline_;
  int64_t trajectories_ = 0;

  std::optional<ModuleState> best_state_;
  CostEstimate best_cost_;
  double best_metric_ = 0;
  std::string best_digest_;
  std::vector<Action> best_plan_;
  int64_t trajectories_to_best_ = 0;
};

// Runs MCTS to actions on the axes in `axes`. Deterministic for a
// given seed. `trace`, if set, receives one row per trajectory.
SearchResult RunSearch(const ModuleState& start, AxisMask axes,
                       const SearchConfig& cfg,
                       const CostModelConfig& cost_cfg,
                       std::vector<TraceRow>* trace = nullptr);

// One selectable option of a node: a child state, or stopping at the node.
struct UctCandidate {
  int64_t visits = 0;
  double total_value = 0;
  std::string digest;  // tie-break key
  bool exhausted = false;
};

// Index maximizing W/N + c * sqrt(ln parent_visits / N) over non-exhausted
// candidates; unvisited candidates first; ties to the smallest digest.
// Returns -1 when every candidate is exhausted.
int SelectCandidate(const std::vector<UctCandidate>& candidates,
                    int64_t parent_visits, double c);

double UctScore(const UctCandidate& candidate, int64_t parent_visits,
                double c);

}  // namespace meshsearch

#endif  // MESHSEARCH_SEARCH_H_
