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

#ifndef MESHSEARCH_MODEL_ZOO_H_
#define MESHSEARCH_MODEL_ZOO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "meshsearch/ir.h"
#include "meshsearch/mesh.h"
#include "meshsearch/partition.h"

namespace meshsearch {

// Training steps: forward, explicit backward and an Adam-like update where
// every parameter P has moments m and v:
//   m' = f(m, dP); v' = g(v, dP); u = h(m', v'); P' = P - u.
// Homologous parameters of all layers share one equi-shard group, as do
// their moments. Baseline plans refer to mesh axes by position (0 is the
// batch-like axis, 1 the model-like axis).

struct TransformerConfig {
  int layers = 2;
  int64_t d_model = 64;
  int64_t n_head = 4;
  int64_t d_head = 16;
  int64_t d_ff = 256;
  int64_t batch = 16;
  int64_t seq_len = 16;
  int64_t element_bytes = 4;
};

// Group ids of the transformer. Moments follow their parameter kind:
// m group = param group + 6, v group = param group + 12.
struct TransformerGroups {
  static constexpr int kTokens = 0;  // x[B,S,D]
  static constexpr int kTarget = 1;  // y[B,S,D]
  static constexpr int kWq = 2;      // [D,H,Dh]
  static constexpr int kWk = 3;
  static constexpr int kWv = 4;
  static constexpr int kWo = 5;      // [H,Dh,D]
  static constexpr int kW1 = 6;      // [D,F]
  static constexpr int kW2 = 7;      // [F,D]
  static constexpr int kNumParamKinds = 6;
  static constexpr int MomentM(int param) { return param + 6; }
  static constexpr int MomentV(int param) { return param + 12; }
};

enum class TransformerStrategy {
  kBatch,                  // BP
  kBatchMegatron,          // BP+MT
  kBatchMegatronZero3,     // BP+MT+ZeRO3
};

absl::StatusOr<Graph> BuildTransformer(const TransformerConfig& cfg,
                                       const Mesh* mesh = nullptr);
// Hand-written expert plan; needs two axes except for kBatch.
std::vector<Action> TransformerExpertPlan(TransformerStrategy strategy);
// d_model * d_ff * 2 weights per layer for the FFN, 4 * d_model^2 for
// attention.
int64_t TransformerParamsPerLayer(const TransformerConfig& cfg);

struct GnsLikeConfig {
  int message_passing_steps = 2;
  int64_t mlp_hidden = 64;
  int64_t latent = 32;
  int64_t nodes = 64;
  int64_t edges = 512;
  int64_t element_bytes = 4;
};

struct GnsGroups {
  static constexpr int kNodes = 0;   // x[N,L]
  static constexpr int kEdges = 1;   // e[E,L]
  static constexpr int kTarget = 2;  // y[N,L]
  // Edge MLP (sender, receiver, edge inputs, output) then node MLP
  // (node input, aggregate input, output).
  static constexpr int kFirstParam = 3;
  static constexpr int kNumParamKinds = 7;
  static constexpr int MomentM(int param) { return param + 7; }
  static constexpr int MomentV(int param) { return param + 14; }
};

absl::StatusOr<Graph> BuildGnsLike(const GnsLikeConfig& cfg,
                                   const Mesh* mesh = nullptr);
// Edge dim sharded on every mesh axis.
std::vector<Action> GnsEdgeShardingPlan(const Mesh& mesh);
int64_t GnsParamsPerStep(const GnsLikeConfig& cfg);

struct UNetLikeConfig {
  int depth = 3;
  std::vector<int64_t> widths = {32, 64, 128};
  bool skip_connections = true;
  int64_t batch = 8;
  int64_t element_bytes = 4;
};

// x=0, y=1; parameters 2 .. 2+P-1 in order enc_0..enc_{d-1}, mid,
// dec_{d-1}..dec_0, then their m groups, then their v groups.
struct UNetGroups {
  static constexpr int kInput = 0;
  static constexpr int kTarget = 1;
  static constexpr int kFirstParam = 2;
  static int NumParams(const UNetLikeConfig& cfg) { return 2 * cfg.depth + 1; }
};

absl::StatusOr<Graph> BuildUNetLike(const UNetLikeConfig& cfg,
                                    const Mesh* mesh = nullptr);
// Batch-shard the data and shard every parameter (and so its moments) on
// axis 0.
std::vector<Action> UNetBatchZero3Plan(const UNetLikeConfig& cfg);
int64_t UNetParamCount(const UNetLikeConfig& cfg);

// Builds a zoo model by name ("transformer", "gns", "unet") from an optional
// JSON config object; unknown fields are errors.
absl::StatusOr<Graph> BuildModel(absl::string_view name,
                                 const nlohmann::ordered_json& cfg,
                                 const Mesh* mesh);

}  // namespace meshsearch

#endif  // MESHSEARCH_MODEL_ZOO_H_
