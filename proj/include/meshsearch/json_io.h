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

#ifndef MESHSEARCH_JSON_IO_H_
#define MESHSEARCH_JSON_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "meshsearch/cost_model.h"
#include "meshsearch/ir.h"
#include "meshsearch/mesh.h"
#include "meshsearch/partition.h"

namespace meshsearch {

using Json = nlohmann::ordered_json;

// A graph file: the graph plus the mesh it was declared with, if any.
struct GraphFile {
  Graph graph;
  std::optional<Mesh> mesh;
};

// Schema errors are InvalidArgument. Graph-level problems such as undefined
// operands are left for ValidateGraph to report.
absl::StatusOr<GraphFile> GraphFromJson(const Json& j);
Json GraphToJson(const Graph& graph, const Mesh* mesh);

struct PlanRecord {
  int group = 0;
  int dim = 0;
  std::string axis;
};

struct Plan {
  std::vector<PlanRecord> actions;
  std::string fingerprint;  // empty when not recorded
};

absl::StatusOr<Plan> PlanFromJson(const Json& j);
Json PlanToJson(const Plan& plan);
Plan MakePlan(const PartitionProblem& problem,
              const std::vector<Action>& actions, const Fingerprint& fp);

// Applies the plan from `start`. Errors carry the offending action index; a
// recorded fingerprint must match the replayed one.
absl::StatusOr<ModuleState> ReplayPlan(const ModuleState& start,
                                       const Plan& plan);

absl::StatusOr<CostModelConfig> CostConfigFromJson(const Json& j);
Json CostConfigToJson(const CostModelConfig& cfg);

Json CostEstimateToJson(const CostEstimate& est);
// Per-kind collective lists of a lowered program.
Json CollectivesToJson(const LoweredProgram& program, const ModuleState& s);

absl::StatusOr<Json> ReadJsonFile(const std::string& path);
absl::Status WriteTextFile(const std::string& path, absl::string_view text);

}  // namespace meshsearch

#endif  // MESHSEARCH_JSON_IO_H_
