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

#include "meshsearch/meta_controller.h"

#include <utility>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace meshsearch {

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t GoalSeed(uint64_t seed, int goal) {
  return SplitMix64(SplitMix64(seed) + static_cast<uint64_t>(goal));
}

absl::Status CheckState(const ModuleState& state) {
  if (!IsPropagationClosed(state)) {
    return absl::InternalError("committed state is not propagation-closed");
  }
  for (int v = 0; v < state.graph().num_values(); ++v) {
    Sharding s = state.sharding(ValueId{v});
    if (!s.is_single_use()) {
      return absl::InternalError(absl::StrCat(
          "value '", state.graph().value_name(ValueId{v}),
          "' uses an axis twice"));
    }
    absl::StatusOr<TensorType> local =
        LocalShape(state.problem().type(ValueId{v}), s, state.mesh());
    if (!local.ok()) return local.status();
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Schedule> BuiltinSchedule(absl::string_view name,
                                         const Mesh& mesh,
                                         int64_t total_budget) {
  const std::string n = absl::AsciiStrToUpper(name);
  Schedule s;
  s.name = n;
  s.total_budget = total_budget;
  const Objective rt = Objective::kRuntime;
  const Objective mem = Objective::kMemory;
  if (n == "NONE") {
    s.goals = {{std::nullopt, Objective::kPenalizedRuntime, 0, 1.0}};
    return s;
  }
  if (n != "RT_MEM_ALL" && n != "RT1_RT2_MEM1" && n != "RT1_RT2_MEM2" &&
      n != "RT_MP_ALL") {
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown schedule '", name,
        "'; expected RT_MEM_ALL, RT1_RT2_MEM1, RT1_RT2_MEM2, RT_MP_ALL or "
        "NONE"));
  }
  if (mesh.num_axes() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("schedule ", n, " needs a mesh with at least 2 axes"));
  }
  if (n == "RT_MEM_ALL") {
    s.goals = {{0, rt}, {1, rt}, {0, mem}, {1, mem}};
  } else if (n == "RT1_RT2_MEM1") {
    s.goals = {{0, rt}, {1, rt}, {0, mem}};
  } else if (n == "RT1_RT2_MEM2") {
    s.goals = {{0, rt}, {1, rt}, {1, mem}};
  } else {
    s.goals = {{0, Objective::kPenalizedRuntime, 0, 1.0},
               {1, Objective::kPenalizedRuntime, 0, 2.0}};
  }
  return s;
}

absl::StatusOr<Schedule> ParseSchedule(absl::string_view text, const Mesh& mesh,
                                       int64_t total_budget) {
  absl::string_view trimmed = absl::StripAsciiWhitespace(text);
  if (trimmed.find(':') == absl::string_view::npos) {
    return BuiltinSchedule(trimmed, mesh, total_budget);
  }
  Schedule s;
  s.name = std::string(trimmed);
  s.total_budget = total_budget;
  for (absl::string_view item :
       absl::StrSplit(trimmed, ',', absl::SkipWhitespace())) {
    std::vector<absl::string_view> parts = absl::StrSplit(item, ':');
    if (parts.size() < 2 || parts.size() > 3) {
      return absl::InvalidArgumentError(absl::StrCat(
          "malformed goal '", item, "'; expected axis:objective[:budget]"));
    }
    Goal goal;
    absl::string_view axis = absl::StripAsciiWhitespace(parts[0]);
    if (axis != "all") {
      std::optional<int> index = mesh.FindAxis(axis);
      if (!index) {
        return absl::InvalidArgumentError(
            absl::StrCat("goal '", item, "' names unknown mesh axis '", axis,
                         "'"));
      }
      goal.axis = *index;
    }
    absl::StatusOr<Objective> objective =
        ParseObjective(absl::StripAsciiWhitespace(parts[1]));
    if (!objective.ok()) return objective.status();
    goal.objective = *objective;
    if (parts.size() == 3 &&
        (!absl::SimpleAtoi(parts[2], &goal.budget) || goal.budget < 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("goal '", item, "' has an invalid budget"));
    }
    s.goals.push_back(goal);
  }
  if (s.goals.empty()) {
    return absl::InvalidArgumentError("schedule has no goals");
  }
  return s;
}

std::vector<int64_t> GoalBudgets(const Schedule& schedule) {
  std::vector<int64_t> budgets(schedule.goals.size(), 0);
  int64_t explicit_total = 0;
  std::vector<size_t> automatic;
  for (size_t i = 0; i < schedule.goals.size(); ++i) {
    if (schedule.goals[i].budget > 0) {
      budgets[i] = schedule.goals[i].budget;
      explicit_total += budgets[i];
    } else {
      automatic.push_back(i);
    }
  }
  if (automatic.empty()) return budgets;
  const int64_t rest = std::max<int64_t>(0, schedule.total_budget -
                                                explicit_total);
  const int64_t share = rest / static_cast<int64_t>(automatic.size());
  for (size_t i : automatic) budgets[i] = share;
  budgets[automatic.back()] +=
      rest - share * static_cast<int64_t>(automatic.size());
  return budgets;
}

std::string GoalToString(const Goal& goal, const Mesh& mesh) {
  return absl::StrCat(goal.axis ? mesh.axis(*goal.axis).name : "all", ":",
                      ObjectiveName(goal.objective));
}

absl::StatusOr<ScheduleOutcome> RunSchedule(
    const ModuleState& start, const Schedule& schedule,
    const CostModelConfig& cost_cfg, const ScheduleOptions& options) {
  if (schedule.goals.empty()) {
    return absl::InvalidArgumentError("schedule has no goals");
  }
  for (const Goal& g : schedule.goals) {
    if (g.axis && (*g.axis < 0 || *g.axis >= start.mesh().num_axes())) {
      return absl::InvalidArgumentError("goal axis is not in the mesh");
    }
  }
  ScheduleOutcome out;
  out.seed = options.seed;
  ModuleState state = start;
  std::vector<int64_t> budgets = GoalBudgets(schedule);
  int64_t carry = 0;
  for (size_t i = 0; i < schedule.goals.size(); ++i) {
    const Goal& goal = schedule.goals[i];
    CostModelConfig goal_cfg = cost_cfg;
    goal_cfg.memory_penalty_slope *= goal.penalty_scale;

    SearchConfig search;
    search.trajectory_budget = budgets[i] + carry;
    search.uct_c = options.uct_c;
    search.max_depth = options.max_depth;
    search.seed = GoalSeed(options.seed, static_cast<int>(i));
    search.objective = goal.objective;
    search.parallel_expand = options.parallel_expand;

    GoalOutcome g;
    g.goal = goal;
    g.budget = search.trajectory_budget;
    const AxisMask axes =
        goal.axis ? AxisBit(*goal.axis) : state.mesh().all_axes();
    g.result = RunSearch(state, axes, search, goal_cfg,
                         options.record_trace ? &g.trace : nullptr);
    g.metric_before = Metric(Estimate(state, goal_cfg), goal.objective);
    g.metric_after = g.metric_before;
    const double found = Metric(g.result.best_cost, goal.objective);
    if (found < g.metric_before) {
      g.committed = true;
      g.metric_after = found;
      state = g.result.best_state;
      out.plan.insert(out.plan.end(), g.result.best_plan.begin(),
                      g.result.best_plan.end());
      absl::Status ok = CheckState(state);
      if (!ok.ok()) return ok;
    }
    carry = options.rollover ? search.trajectory_budget -
                                   g.result.trajectories_used
                             : 0;
    out.goals.push_back(std::move(g));
  }
  out.final_state = state;
  out.final_cost = Estimate(state, cost_cfg);
  out.fingerprint = ComputeFingerprint(state);
  return out;
}

std::vector<absl::StatusOr<ScheduleOutcome>> RunSeedsSerial(
    const ModuleState& start, const Schedule& schedule,
    const CostModelConfig& cost_cfg, const ScheduleOptions& options,
    int count) {
  std::vector<absl::StatusOr<ScheduleOutcome>> out;
  for (int i = 0; i < count; ++i) {
    ScheduleOptions o = options;
    o.seed = options.seed + static_cast<uint64_t>(i);
    out.push_back(RunSchedule(start, schedule, cost_cfg, o));
  }
  return out;
}

std::vector<absl::StatusOr<ScheduleOutcome>> RunSeedsParallel(
    const ModuleState& start, const Schedule& schedule,
    const CostModelConfig& cost_cfg, const ScheduleOptions& options,
    int count) {
  std::vector<absl::StatusOr<ScheduleOutcome>> out(
      count, absl::UnknownError("not run"));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    ScheduleOptions o = options;
    o.seed = options.seed + static_cast<uint64_t>(i);
    out[i] = RunSchedule(start, schedule, cost_cfg, o);
  }
  return out;
}

int BestOutcome(const std::vector<ScheduleOutcome>& outcomes) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(outcomes.size()); ++i) {
    if (best < 0 || outcomes[i].final_cost.penalized_cost <
                        outcomes[best].final_cost.penalized_cost) {
      best = i;
    }
  }
  return best;
}

}  // namespace meshsearch
