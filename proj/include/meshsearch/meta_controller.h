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

#ifndef MESHSEARCH_META_CONTROLLER_H_
#define MESHSEARCH_META_CONTROLLER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "meshsearch/cost_model.h"
#include "meshsearch/partition.h"
#include "meshsearch/search.h"

namespace meshsearch {

struct Goal {
  std::optional<int> axis;  // mesh axis index; unset means every axis
  Objective objective = Objective::kRuntime;
  int64_t budget = 0;  // 0 = share of the schedule's total
  // Multiplies the cost config's memory penalty slope for this goal.
  double penalty_scale = 1.0;
};

struct Schedule {
  std::string name;
  std::vector<Goal> goals;
  int64_t total_budget = 0;
};

// RT_MEM_ALL, RT1_RT2_MEM1, RT1_RT2_MEM2, RT_MP_ALL or NONE, any case.
absl::StatusOr<Schedule> BuiltinSchedule(absl::string_view name,
                                         const Mesh& mesh,
                                         int64_t total_budget);
// A builtin name or comma-separated axis:objective[:budget] triples, where
// axis may be "all".
absl::StatusOr<Schedule> ParseSchedule(absl::string_view text, const Mesh& mesh,
                                       int64_t total_budget);

// Per-goal budgets: explicit ones as given, the rest split the remaining
// total floor-evenly with the remainder on the last of them.
std::vector<int64_t> GoalBudgets(const Schedule& schedule);

std::string GoalToString(const Goal& goal, const Mesh& mesh);

struct GoalOutcome {
  Goal goal;
  int64_t budget = 0;  // after rollover
  SearchResult result;
  bool committed = false;
  double metric_before = 0;
  double metric_after = 0;
  std::vector<TraceRow> trace;
};

struct ScheduleOutcome {
  uint64_t seed = 0;
  std::vector<GoalOutcome> goals;
  ModuleState final_state;
  CostEstimate final_cost;
  std::vector<Action> plan;
  Fingerprint fingerprint;
};

struct ScheduleOptions {
  uint64_t seed = 0;
  // Hand budget left by a goal whose search exhausted its space to the next
  // goal.
  bool rollover = false;
  double uct_c = 1.0;
  int max_depth = 0;
  bool parallel_expand = false;
  bool record_trace = false;
};

absl::StatusOr<ScheduleOutcome> RunSchedule(
    const ModuleState& start, const Schedule& schedule,
    const CostModelConfig& cost_cfg, const ScheduleOptions& options);

// Independent runs for seeds first_seed .. first_seed + count - 1, in seed
// order. The parallel version runs them concurrently with OpenMP.
std::vector<absl::StatusOr<ScheduleOutcome>> RunSeedsSerial(
    const ModuleState& start, const Schedule& schedule,
    const CostModelConfig& cost_cfg, const ScheduleOptions& options,
    int count);
std::vector<absl::StatusOr<ScheduleOutcome>> RunSeedsParallel(
    const ModuleState& start, const Schedule& schedule,
    const CostModelConfig& cost_cfg, const ScheduleOptions& options,
    int count);

// Index of the lowest final penalized cost; ties go to the earlier entry.
int BestOutcome(const std::vector<ScheduleOutcome>& outcomes);

}  // namespace meshsearch

#endif  // MESHSEARCH_META_CONTROLLER_H_
