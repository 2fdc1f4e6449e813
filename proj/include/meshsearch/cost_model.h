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

#ifndef MESHSEARCH_COST_MODEL_H_
#define MESHSEARCH_COST_MODEL_H_

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/string_view.h"
#include "meshsearch/ir.h"
#include "meshsearch/mesh.h"
#include "meshsearch/partition.h"

namespace meshsearch {

enum class CollectiveKind { kAllReduce = 0, kAllGather = 1, kReduceScatter = 2 };
inline constexpr int kNumCollectiveKinds = 3;

absl::string_view CollectiveKindName(CollectiveKind kind);

struct Collective {
  CollectiveKind kind = CollectiveKind::kAllReduce;
  int axis = 0;
  // Bytes of the tensor unsharded along `axis` (sharded as before on others).
  int64_t payload_bytes = 0;
  ValueId value;
  // Op index the collective precedes (gathers) or follows (reductions).
  int site = 0;
};

struct AxisLink {
  double bandwidth_bytes_per_second = 1e10;
  double latency_seconds = 1e-6;
};

struct CostModelConfig {
  double flops_per_second = 3e11;
  // Per-axis links by axis name; axes not listed use `default_link`.
  std::vector<std::pair<std::string, AxisLink>> axis_links;
  AxisLink default_link;
  double memory_limit_bytes = std::numeric_limits<double>::infinity();
  double memory_penalty_slope = 1.0;
  bool cse_allgather = false;

  const AxisLink& link(absl::string_view axis_name) const;
};

struct CollectiveCounts {
  std::array<int64_t, kNumCollectiveKinds> by_kind{};

  int64_t operator[](CollectiveKind kind) const {
    return by_kind[static_cast<int>(kind)];
  }
  int64_t& operator[](CollectiveKind kind) {
    return by_kind[static_cast<int>(kind)];
  }
  int64_t all_reduce() const { return (*this)[CollectiveKind::kAllReduce]; }
  int64_t all_gather() const { return (*this)[CollectiveKind::kAllGather]; }
  int64_t reduce_scatter() const {
    return (*this)[CollectiveKind::kReduceScatter];
  }
  int64_t total() const { return by_kind[0] + by_kind[1] + by_kind[2]; }

  friend bool operator==(const CollectiveCounts&,
                         const CollectiveCounts&) = default;
};

struct CostEstimate {
  double runtime_seconds = 0;
  double compute_seconds = 0;
  double communication_seconds = 0;
  int64_t peak_memory_bytes = 0;
  CollectiveCounts counts;
  // runtime * (1 + slope * max(0, peak / limit - 1))
  double penalized_cost = 0;

  friend bool operator==(const CostEstimate&, const CostEstimate&) = default;
};

// A live range [first, last] (inclusive op positions) of `bytes` bytes.
struct Buffer {
  ValueId value;
  int first = 0;
  int last = 0;
  int64_t bytes = 0;
};

// Ops interleaved with the collectives the partitioned program needs.
struct LoweredProgram {
  struct Step {
    int op = -1;          // >= 0 for an op step
    int collective = -1;  // index into `collectives` otherwise
  };
  std::vector<Step> steps;
  std::vector<Collective> collectives;
  std::vector<double> op_flops;  // per op, on local shapes
  std::vector<Buffer> buffers;
  CollectiveCounts counts;
};

LoweredProgram Lower(const ModuleState& state, bool cse_allgather);

// Ring model: AllReduce 2(n-1)a + 2S(n-1)/(nB); AllGather and ReduceScatter
// (n-1)a + S(n-1)/(nB).
double CollectiveTime(CollectiveKind kind, int64_t axis_size,
                      int64_t payload_bytes, const AxisLink& link);
double CollectiveTime(const Collective& c, const Mesh& mesh,
                      const CostModelConfig& cfg);
// Bytes each device sends under the ring model.
double WireBytes(const Collective& c, const Mesh& mesh);

// Peak over op positions of the summed live buffer bytes.
int64_t PeakMemory(const std::vector<Buffer>& buffers, int num_positions);

double PenalizedCost(double runtime_seconds, int64_t peak_memory_bytes,
                     const CostModelConfig& cfg);

CostEstimate Estimate(const ModuleState& state, const CostModelConfig& cfg);
CostEstimate EstimateLowered(const LoweredProgram& program,
                             const ModuleState& state,
                             const CostModelConfig& cfg);

}  // namespace meshsearch

#endif  // MESHSEARCH_COST_MODEL_H_
