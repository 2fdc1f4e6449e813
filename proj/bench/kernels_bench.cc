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


// Serial reference vs OpenMP kernels on the desk transformer and a tiny
// oracle instance.

#include <vector>

#include "benchmark/benchmark.h"
#include "meshsearch/cost_model.h"
#include "meshsearch/meta_controller.h"
#include "meshsearch/model_zoo.h"
#include "meshsearch/oracle.h"
#include "meshsearch/parallel.h"
#include "random_graphs.h"

namespace meshsearch {
namespace {

const ModuleState& DeskStart() {
  static const ModuleState* start = [] {
    const Mesh mesh = *Mesh::Parse("batch=2,model=2");
    auto problem =
        *PartitionProblem::Create(*BuildTransformer({}, &mesh), mesh);
    return new ModuleState(ModuleState::Initial(problem));
  }();
  return *start;
}

const std::vector<Action>& DeskActions() {
  static const auto* actions = new std::vector<Action>(
      LegalActionsOnAxes(DeskStart(), DeskStart().mesh().all_axes()));
  return *actions;
}

template <bool kParallel>
void BM_ApplyActions(benchmark::State& state) {
  for (auto _ : state) {
    auto out = kParallel ? ApplyActionsParallel(DeskStart(), DeskActions())
                         : ApplyActionsSerial(DeskStart(), DeskActions());
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * DeskActions().size());
}
BENCHMARK(BM_ApplyActions<false>)->Name("ApplyActions/serial");
BENCHMARK(BM_ApplyActions<true>)->Name("ApplyActions/parallel");

template <bool kParallel>
void BM_EstimateAll(benchmark::State& state) {
  static const auto* successors = new std::vector<Successor>(
      ApplyActionsSerial(DeskStart(), DeskActions()));
  std::vector<const ModuleState*> states;
  for (const Successor& s : *successors) states.push_back(&s.state);
  const CostModelConfig cfg;
  for (auto _ : state) {
    auto out = kParallel ? EstimateAllParallel(states, cfg)
                         : EstimateAllSerial(states, cfg);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * states.size());
}
BENCHMARK(BM_EstimateAll<false>)->Name("EstimateAll/serial");
BENCHMARK(BM_EstimateAll<true>)->Name("EstimateAll/parallel");

template <bool kParallel>
void BM_Enumerate(benchmark::State& state) {
  const Mesh mesh = *Mesh::Parse("a=2,b=2");
  auto problem = *PartitionProblem::Create(testing::RandomTinyGraph(1001), mesh);
  const ModuleState s0 = ModuleState::Initial(problem);
  for (auto _ : state) {
    auto out = EnumerateStates(s0, mesh.all_axes(), -1, {}, kParallel);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_Enumerate<false>)->Name("EnumerateStates/serial")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Enumerate<true>)->Name("EnumerateStates/parallel")
    ->Unit(benchmark::kMillisecond);

template <bool kParallel>
void BM_Seeds(benchmark::State& state) {
  const Schedule s =
      *BuiltinSchedule("RT1_RT2_MEM1", DeskStart().mesh(), 300);
  for (auto _ : state) {
    auto out = kParallel ? RunSeedsParallel(DeskStart(), s, {}, {}, 4)
                         : RunSeedsSerial(DeskStart(), s, {}, {}, 4);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_Seeds<false>)->Name("RunSeeds/serial")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Seeds<true>)->Name("RunSeeds/parallel")
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace meshsearch

BENCHMARK_MAIN();
