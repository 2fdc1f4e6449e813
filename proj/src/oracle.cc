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


#include "meshsearch/oracle.h"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "meshsearch/parallel.h"

namespace meshsearch {
namespace {

// Exact identity of a state, including inner values and worklists.
std::string StateKey(const ModuleState& state) {
  const PartitionProblem& problem = state.problem();
  std::string key;
  auto put = [&key](AxisMask mask) {
    key.append(reinterpret_cast<const char*>(&mask), sizeof(mask));
  };
  for (int v = 0; v < state.graph().num_values(); ++v) {
    const ValueId id{v};
    for (int d = 0; d < problem.rank(id); ++d) put(state.dim_axes(id, d));
    put(state.partial(id));
  }
  for (int g = 0; g < problem.num_groups(); ++g) put(state.actionable_axes(g));
  return key;
}

struct LayerState {
  ModuleState state;
  int64_t multiplicity = 1;
  std::vector<Action> plan;
};

}  // namespace

absl::StatusOr<Enumeration> EnumerateStates(const ModuleState& start,
                                            AxisMask axes, int max_depth,
                                            const CostModelConfig& cost_cfg,
                                            bool parallel) {
  axes &= start.mesh().all_axes();
  if (start.problem().num_groups() > kOracleMaxGroups ||
      AxisCount(axes) > kOracleMaxAxes) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "oracle instance too large: ", start.problem().num_groups(),
        " groups and ", AxisCount(axes), " axes (limit ", kOracleMaxGroups,
        " groups, ", kOracleMaxAxes, " axes)"));
  }

  Enumeration out;
  absl::flat_hash_map<std::string, int> entry_of;  // digest -> states index
  absl::flat_hash_set<std::string> seen;
  std::vector<ModuleState> representatives;

  auto record = [&](const ModuleState& state, const Fingerprint& fp, int depth,
                    const std::vector<Action>& plan) {
    if (entry_of.contains(fp.digest)) return;
    entry_of.emplace(fp.digest, static_cast<int>(out.states.size()));
    out.states.push_back(OracleEntry{fp, depth, plan, CostEstimate{}});
    representatives.push_back(state);
  };

  std::vector<LayerState> layer = {LayerState{start, 1, {}}};
  seen.insert(StateKey(start));
  record(start, ComputeFingerprint(start), 0, {});
  out.action_sequences = 1;

  for (int depth = 1; !layer.empty() && (max_depth < 0 || depth <= max_depth);
       ++depth) {
    std::vector<LayerState> next;
    absl::flat_hash_map<std::string, int> next_index;
    for (const LayerState& from : layer) {
      const std::vector<Action> actions = LegalActionsOnAxes(from.state, axes);
      out.action_sequences +=
          from.multiplicity * static_cast<int64_t>(actions.size());
      std::vector<Successor> successors =
          parallel ? ApplyActionsParallel(from.state, actions)
                   : ApplyActionsSerial(from.state, actions);
      for (size_t i = 0; i < successors.size(); ++i) {
        std::string key = StateKey(successors[i].state);
        auto it = next_index.find(key);
        if (it != next_index.end()) {
          next[it->second].multiplicity += from.multiplicity;
          continue;
        }
        std::vector<Action> plan = from.plan;
        plan.push_back(actions[i]);
        record(successors[i].state, successors[i].fingerprint, depth, plan);
        seen.insert(key);
        next_index.emplace(std::move(key), static_cast<int>(next.size()));
        next.push_back(LayerState{std::move(successors[i].state),
                                  from.multiplicity, std::move(plan)});
      }
    }
    layer = std::move(next);
  }
  out.full_states = static_cast<int64_t>(seen.size());

  std::vector<const ModuleState*> ptrs;
  ptrs.reserve(representatives.size());
  for (const ModuleState& s : representatives) ptrs.push_back(&s);
  std::vector<CostEstimate> costs = parallel
                                        ? EstimateAllParallel(ptrs, cost_cfg)
                                        : EstimateAllSerial(ptrs, cost_cfg);
  for (size_t i = 0; i < costs.size(); ++i) out.states[i].cost = costs[i];

  std::sort(out.states.begin(), out.states.end(),
            [](const OracleEntry& a, const OracleEntry& b) {
              return a.fingerprint < b.fingerprint;
            });
  return out;
}

const OracleEntry& BestEntry(const Enumeration& enumeration,
                             Objective objective) {
  // States are in digest order, so the first strict minimum wins ties.
  const OracleEntry* best = &enumeration.states.front();
  for (const OracleEntry& e : enumeration.states) {
    if (Metric(e.cost, objective) < Metric(best->cost, objective)) best = &e;
  }
  return *best;
}

absl::StatusOr<OracleEntry> ExhaustiveBest(const ModuleState& start,
                                           AxisMask axes, int max_depth,
                                           Objective objective,
                                           const CostModelConfig& cost_cfg,
                                           bool parallel) {
  absl::StatusOr<Enumeration> all =
      EnumerateStates(start, axes, max_depth, cost_cfg, parallel);
  if (!all.ok()) return all.status();
  return BestEntry(*all, objective);
}

std::string EnumerationToCsv(const Enumeration& enumeration,
                             const PartitionProblem& problem) {
  std::string csv =
      "fingerprint,depth,runtime_seconds,compute_seconds,"
      "communication_seconds,peak_memory_bytes,all_reduce,all_gather,"
      "reduce_scatter,penalized_cost,plan\n";
  for (const OracleEntry& e : enumeration.states) {
    const CostEstimate& c = e.cost;
    std::string plan = absl::StrJoin(
        e.plan, " ", [&problem](std::string* out, const Action& a) {
          absl::StrAppend(out, a.group, ":", a.dim, ":",
                          problem.mesh().axis(a.axis).name);
        });
    absl::StrAppend(&csv, "\"", e.fingerprint.digest, "\",", e.depth, ",",
                    absl::StrFormat("%.17g,%.17g,%.17g", c.runtime_seconds,
                                    c.compute_seconds,
                                    c.communication_seconds),
                    ",", c.peak_memory_bytes, ",", c.counts.all_reduce(), ",",
                    c.counts.all_gather(), ",", c.counts.reduce_scatter(), ",",
                    absl::StrFormat("%.17g", c.penalized_cost), ",\"", plan,
                    "\"\n");
  }
  return csv;
}

}  // namespace meshsearch
