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

#include "meshsearch/parallel.h"

#include <omp.h>

namespace meshsearch {

std::vector<Successor> ApplyActionsSerial(const ModuleState& state,
                                          const std::vector<Action>& actions) {
  std::vector<Successor> out;
  out.reserve(actions.size());
  for (const Action& a : actions) {
    ModuleState next = ApplyLegalAction(state, a);
    Fingerprint fp = ComputeFingerprint(next);
    out.push_back({std::move(next), std::move(fp)});
  }
  return out;
}

std::vector<Successor> ApplyActionsParallel(const ModuleState& state,
                                            const std::vector<Action>& actions) {
  const int n = static_cast<int>(actions.size());
  std::vector<Successor> out(n, Successor{state, {}});
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    out[i].state = ApplyLegalAction(state, actions[i]);
    out[i].fingerprint = ComputeFingerprint(out[i].state);
  }
  return out;
}

std::vector<CostEstimate> EstimateAllSerial(
    const std::vector<const ModuleState*>& states, const CostModelConfig& cfg) {
  std::vector<CostEstimate> out;
  out.reserve(states.size());
  for (const ModuleState* s : states) out.push_back(Estimate(*s, cfg));
  return out;
}

std::vector<CostEstimate> EstimateAllParallel(
    const std::vector<const ModuleState*>& states, const CostModelConfig& cfg) {
  const int n = static_cast<int>(states.size());
  std::vector<CostEstimate> out(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) out[i] = Estimate(*states[i], cfg);
  return out;
}

}  // namespace meshsearch
