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

#ifndef MESHSEARCH_PARALLEL_H_
#define MESHSEARCH_PARALLEL_H_

#include <vector>

#include "meshsearch/cost_model.h"
#include "meshsearch/partition.h"

namespace meshsearch {

// Data-parallel kernels used by node expansion and the oracle. Each has a
// serial reference with identical output; results are in input order.

struct Successor {
  ModuleState state;
  Fingerprint fingerprint;
};

std::vector<Successor> ApplyActionsSerial(const ModuleState& state,
                                          const std::vector<Action>& actions);
std::vector<Successor> ApplyActionsParallel(const ModuleState& state,
                                            const std::vector<Action>& actions);

std::vector<CostEstimate> EstimateAllSerial(
    const std::vector<const ModuleState*>& states, const CostModelConfig& cfg);
std::vector<CostEstimate> EstimateAllParallel(
    const std::vector<const ModuleState*>& states, const CostModelConfig& cfg);

}  // namespace meshsearch

#endif  // MESHSEARCH_PARALLEL_H_
