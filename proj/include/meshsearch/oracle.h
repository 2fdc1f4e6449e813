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


#ifndef MESHSEARCH_ORACLE_H_
#define MESHSEARCH_ORACLE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "meshsearch/cost_model.h"
#include "meshsearch/partition.h"
#include "meshsearch/search.h"

namespace meshsearch {

// Size guard for exhaustive enumeration.
inline constexpr int kOracleMaxGroups = 6;
inline constexpr int kOracleMaxAxes = 2;

struct OracleEntry {
  Fingerprint fingerprint;
  int depth = 0;  // fewest actions reaching the fingerprint
  std::vector<Action> plan;  // first such action sequence in BFS order
  CostEstimate cost;
};

struct Enumeration {
  // One entry per distinct fingerprint, sorted by digest.
  std::vector<OracleEntry> states;
  // Action sequences of length <= max_depth, counting the empty one.
  int64_t action_sequences = 0;
  // Distinct full states (fingerprint plus worklists and inner values).
  int64_t full_states = 0;
};

// Breadth-first enumeration of every state reachable from `start` with
// actions on `axes`, up to `max_depth` actions (negative means unbounded).
// Fails with ResourceExhausted above the size guard. `parallel` selects the
// OpenMP expansion and estimation kernels; output is identical either way.
absl::StatusOr<Enumeration> EnumerateStates(const ModuleState& start,
                                            AxisMask axes, int max_depth,
                                            const CostModelConfig& cost_cfg,
                                            bool parallel = false);

// Entry minimizing `objective`; ties go to the smallest digest.
absl::StatusOr<OracleEntry> ExhaustiveBest(const ModuleState& start,
                                           AxisMask axes, int max_depth,
                                           Objective objective,
                                           const CostModelConfig& cost_cfg,
                                           bool parallel = false);

const OracleEntry& BestEntry(const Enumeration& enumeration,
                             Objective objective);

// CSV table with a header row, one row per entry in digest order.
std::string EnumerationToCsv(const Enumeration& enumeration,
                             const PartitionProblem& problem);

}  // namespace meshsearch

#endif  // MESHSEARCH_ORACLE_H_
