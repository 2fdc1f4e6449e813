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
#include <map>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "meshsearch/parallel.h"

namespace meshsearch {

absl::string_view ObjectiveName(Objective objective) {
  switch (objective) {
    case Objective::kRuntime:
      return "runtime";
    case Objective::kMemory:
      return "memory";
    case Objective::kPenalizedRuntime:
      return "penalized_runtime";
  }
  return "runtime";
}

absl::StatusOr<Objective> ParseObjective(absl::string_view text) {
  const std::string t = absl::AsciiStrToLower(text);
  if (t == "rt" || t == "runtime") return Objective::kRuntime;
  if (t == "mem" || t == "memory") return Objective::kMemory;
  if (t == "prt" || t == "penalized" || t == "penalized_runtime") {
    return Objective::kPenalizedRuntime;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown objective '", text, "'; expected rt, mem or prt"));
}

double Metric(const CostEstimate& cost, Objective objective) {
  switch (objective) {
    case Objective::kRuntime:
      return cost.runtime_seconds;
    case Objective::kMemory:
      return static_cast<double>(cost.peak_memory_bytes);
    case Objective::kPenalizedRuntime:
      return cost.penalized_cost;
  }
  return cost.runtime_seconds;
}

double Reward(const CostEstimate& cost, const CostEstimate& baseline,
              Objective objective) {
  const double m = Metric(cost, objective);
  const double base = Metric(baseline, objective);
  if (m <= 0) return 1.0;
  return std::clamp(base / m, 0.0, 2.0) / 2.0;
}

double UctScore(const UctCandidate& candidate, int64_t parent_visits,
                double c) {
  const double n = static_cast<double>(candidate.visits);
  const double explore =
      parent_visits > 0
          ? std::sqrt(std::log(static_cast<double>(parent_visits)) / n)
          : 0.0;
  return candidate.total_value / n + c * explore;
}

int SelectCandidate(const std::vector<UctCandidate>& candidates,
                    int64_t parent_visits, double c) {
  int best = -1;
  bool best_unvisited = false;
  double best_score = 0;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    const UctCandidate& cand = candidates[i];
    if (cand.exhausted) continue;
    const bool unvisited = cand.visits == 0;
    const double score = unvisited ? 0.0 : UctScore(cand, parent_visits, c);
    bool better;
    if (best < 0) {
      better = true;
    } else if (unvisited != best_unvisited) {
      better = unvisited;
    } else if (!unvisited && score != best_score) {
      better = score > best_score;
    } else {
      better = cand.digest < candidates[best].digest;
    }
    if (better) {
      best = i;
      best_unvisited = unvisited;
      best_score = score;
    }
  }
  return best;
}

SearchTree::SearchTree(const ModuleState& start, AxisMask axes,
                       const SearchConfig& cfg,
                       const CostModelConfig& cost_cfg)
    : axes_(axes & start.mesh().all_axes()),
      cfg_(cfg),
      cost_cfg_(cost_cfg),
      max_depth_(cfg.max_depth > 0 ? cfg.max_depth
                                   : start.problem().num_groups()),
      rng_(cfg.seed) {
  Fingerprint fp = ComputeFingerprint(start);
  baseline_ = Evaluate(start, fp.digest);
  Consider(start, fp.digest, baseline_, {});
  AddNode(start, std::move(fp), 0, {});
}

int SearchTree::AddNode(ModuleState state, Fingerprint fp, int depth,
                        std::vector<Action> plan) {
  const int index = static_cast<int>(nodes_.size());
  index_.emplace(fp.digest, index);
  Node node;
  node.state = std::move(state);
  node.fingerprint = std::move(fp);
  node.depth = depth;
  node.plan = std::move(plan);
  nodes_.push_back(std::move(node));
  return index;
}

int SearchTree::FindNode(const Fingerprint& fp) const {
  auto it = index_.find(fp.digest);
  return it == index_.end() ? -1 : it->second;
}

void SearchTree::Expand(int index) {
  nodes_[index].expanded = true;
  if (nodes_[index].depth >= max_depth_) return;
  const std::vector<Action> actions =
      LegalActionsOnAxes(nodes_[index].state, axes_);
  std::vector<Successor> next =
      cfg_.parallel_expand
          ? ApplyActionsParallel(nodes_[index].state, actions)
          : ApplyActionsSerial(nodes_[index].state, actions);
  // Group actions by the state they reach.
  std::map<std::string, Edge> grouped;
  for (size_t i = 0; i < actions.size(); ++i) {
    const std::string& digest = next[i].fingerprint.digest;
    Edge& edge = grouped[digest];
    edge.actions.push_back(actions[i]);
    if (edge.child >= 0) continue;
    int child = FindNode(next[i].fingerprint);
    if (child < 0) {
      std::vector<Action> plan = nodes_[index].plan;
      plan.push_back(actions[i]);
      child = AddNode(std::move(next[i].state), std::move(next[i].fingerprint),
                      nodes_[index].depth + 1, std::move(plan));
    }
    edge.child = child;
  }
  std::vector<Edge>& edges = nodes_[index].edges;
  for (auto& [digest, edge] : grouped) {
    std::sort(edge.actions.begin(), edge.actions.end());
    edges.push_back(std::move(edge));
  }
}

const CostEstimate& SearchTree::Evaluate(const ModuleState& state,
                                         const std::string& digest) {
  auto it = costs_.find(digest);
  if (it != costs_.end()) return it->second;
  return costs_.emplace(digest, Estimate(state, cost_cfg_)).first->second;
}

void SearchTree::Consider(const ModuleState& state, const std::string& digest,
                          const CostEstimate& cost,
                          const std::vector<Action>& plan) {
  const double metric = Metric(cost, cfg_.objective);
  if (best_state_.has_value() &&
      (metric > best_metric_ ||
       (metric == best_metric_ && digest >= best_digest_))) {
    return;
  }
  best_state_ = state;
  best_cost_ = cost;
  best_metric_ = metric;
  best_digest_ = digest;
  best_plan_ = plan;
  trajectories_to_best_ = trajectories_;
}

void SearchTree::Backpropagate(const std::vector<int>& path, double reward) {
  for (int index : path) {
    nodes_[index].visits += 1;
    nodes_[index].total_value += reward;
  }
}

void SearchTree::RefreshExhausted(const std::vector<int>& path) {
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    Node& node = nodes_[*it];
    if (!node.expanded || !node.stop_exhausted) continue;
    bool all = true;
    for (const Edge& e : node.edges) all &= nodes_[e.child].exhausted;
    node.exhausted = all;
  }
}

bool SearchTree::RunTrajectory(TraceRow* row) {
  if (exhausted()) return false;
  ++trajectories_;
  std::vector<int> path = {0};
  int current = 0;
  bool stopped = false;

  // Selection: descend through expanded nodes.
  while (nodes_[current].expanded) {
    Node& node = nodes_[current];
    std::vector<UctCandidate> candidates;
    candidates.reserve(node.edges.size() + 1);
    candidates.push_back({node.stop_visits, node.stop_value,
                          node.fingerprint.digest, node.stop_exhausted});
    for (const Edge& e : node.edges) {
      const Node& child = nodes_[e.child];
      candidates.push_back({child.visits, child.total_value,
                            child.fingerprint.digest, child.exhausted});
    }
    const int pick = SelectCandidate(candidates, node.visits, cfg_.uct_c);
    if (pick <= 0) {  // stop here (or nothing else left)
      stopped = true;
      break;
    }
    current = node.edges[pick - 1].child;
    path.push_back(current);
  }

  const Node& leaf_ref = nodes_[current];
  ModuleState state = leaf_ref.state;
  std::vector<Action> plan = leaf_ref.plan;
  std::string digest = leaf_ref.fingerprint.digest;
  int depth = leaf_ref.depth;

  if (!stopped) {
    // Expansion of a fresh node, then a random rollout from it.
    Expand(current);
    std::vector<Action> legal;
    while (depth < max_depth_) {
      legal = LegalActionsOnAxes(state, axes_);
      if (legal.empty()) break;
      const size_t draw = std::uniform_int_distribution<size_t>(
          0, legal.size())(rng_);
      if (draw == 0) break;  // stop with probability 1 / (1 + |legal|)
      const Action& a = legal[draw - 1];
      state = ApplyLegalAction(state, a);
      plan.push_back(a);
      ++depth;
    }
    digest = ComputeFingerprint(state).digest;
    // A node with nothing to roll into is fully described by its own cost.
    if (nodes_[current].edges.empty()) nodes_[current].stop_exhausted = true;
  } else {
    nodes_[current].stop_exhausted = true;
  }

  const CostEstimate cost = Evaluate(state, digest);
  Consider(state, digest, cost, plan);
  const double reward = Reward(cost, baseline_, cfg_.objective);
  if (stopped) {
    nodes_[current].stop_visits += 1;
    nodes_[current].stop_value += reward;
  }
  Backpropagate(path, reward);
  RefreshExhausted(path);

  if (row != nullptr) {
    *row = {trajectories_, depth, digest, reward, best_metric_};
  }
  return true;
}

SearchResult SearchTree::Result() const {
  SearchResult r;
  r.best_state = *best_state_;
  r.best_cost = best_cost_;
  r.best_plan = best_plan_;
  r.trajectories_used = trajectories_;
  r.trajectories_to_best = trajectories_to_best_;
  r.distinct_states_visited = static_cast<int64_t>(costs_.size());
  r.tree_nodes = static_cast<int64_t>(nodes_.size());
  r.exhausted = nodes_[0].exhausted;
  return r;
}

SearchResult RunSearch(const ModuleState& start, AxisMask axes,
                       const SearchConfig& cfg,
                       const CostModelConfig& cost_cfg,
                       std::vector<TraceRow>* trace) {
  SearchTree tree(start, axes, cfg, cost_cfg);
  for (int64_t t = 0; t < cfg.trajectory_budget; ++t) {
    TraceRow row;
    if (!tree.RunTrajectory(trace != nullptr ? &row : nullptr)) break;
    if (trace != nullptr) trace->push_back(std::move(row));
  }
  return tree.Result();
}

}  // namespace meshsearch
