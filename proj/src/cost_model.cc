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

#include "meshsearch/cost_model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace meshsearch {

namespace {

using DimMasks = std::vector<AxisMask>;

int64_t LocalBytes(const TensorType& type, const DimMasks& dims,
                   const Mesh& mesh) {
  int64_t n = type.element_bytes;
  for (int d = 0; d < type.rank(); ++d) {
    n *= type.dims[d] / mesh.MaskSize(dims[d]);
  }
  return n;
}

DimMasks DimsOf(const ModuleState& s, ValueId v) {
  return s.sharding(v).per_dim;
}

// Sharding an op needs on operand `k` to compute its own result sharding
// locally. Never partial.
DimMasks RequiredOperandDims(const ModuleState& s, const Operation& op,
                             int k) {
  const ValueId operand = op.operands[k];
  const int rank = s.problem().rank(operand);
  DimMasks out(rank, 0);
  const ValueId res = op.id;
  if (const auto* dot = std::get_if<DotGeneral>(&op.kind)) {
    const bool lhs = k == 0;
    const std::vector<int>& batch = lhs ? dot->lhs_batch : dot->rhs_batch;
    const std::vector<int>& contracting =
        lhs ? dot->lhs_contracting : dot->rhs_contracting;
    for (size_t j = 0; j < batch.size(); ++j) {
      out[batch[j]] = s.dim_axes(res, static_cast<int>(j));
    }
    int pos = static_cast<int>(batch.size());
    if (!lhs) {
      pos += static_cast<int>(FreeDims(s.problem().rank(op.operands[0]),
                                       dot->lhs_batch, dot->lhs_contracting)
                                  .size());
    }
    for (int d : FreeDims(rank, batch, contracting)) {
      out[d] = s.dim_axes(res, pos++);
    }
    for (size_t j = 0; j < contracting.size(); ++j) {
      out[contracting[j]] =
          s.dim_axes(op.operands[0], dot->lhs_contracting[j]) &
          s.dim_axes(op.operands[1], dot->rhs_contracting[j]) &
          s.partial(res);
    }
  } else if (std::holds_alternative<Elementwise>(op.kind)) {
    for (int d = 0; d < rank; ++d) out[d] = s.dim_axes(res, d);
  } else if (const auto* reduce = std::get_if<Reduce>(&op.kind)) {
    int pos = 0;
    for (int d = 0; d < rank; ++d) {
      bool reduced = std::find(reduce->dims.begin(), reduce->dims.end(), d) !=
                     reduce->dims.end();
      if (!reduced) {
        out[d] = s.dim_axes(res, pos++);
      } else if (reduce->kind == ReduceKind::kSum) {
        out[d] = s.dim_axes(operand, d) & s.partial(res);
      }
    }
  } else if (const auto* transpose = std::get_if<Transpose>(&op.kind)) {
    for (int j = 0; j < rank; ++j) {
      out[transpose->permutation[j]] = s.dim_axes(res, j);
    }
  } else if (std::holds_alternative<Reshape>(op.kind)) {
    std::vector<int> map = ReshapeDimMap(s.problem().type(operand).dims,
                                         op.result_type.dims);
    for (int i = 0; i < rank; ++i) {
      if (map[i] >= 0) out[i] = s.dim_axes(res, map[i]);
    }
  }
  return out;
}

// Dim carrying `axis` in `dims`, or -1.
int DimWithAxis(const DimMasks& dims, int axis) {
  for (int d = 0; d < static_cast<int>(dims.size()); ++d) {
    if (dims[d] & AxisBit(axis)) return d;
  }
  return -1;
}

double OpFlops(const ModuleState& s, const Operation& op,
               const std::vector<DimMasks>& required) {
  const Mesh& mesh = s.mesh();
  const TensorType& rt = op.result_type;
  DimMasks res_dims = DimsOf(s, op.id);
  int64_t result_elems = 1;
  for (int d = 0; d < rt.rank(); ++d) {
    result_elems *= rt.dims[d] / mesh.MaskSize(res_dims[d]);
  }
  if (const auto* dot = std::get_if<DotGeneral>(&op.kind)) {
    const TensorType& lhs = s.problem().type(op.operands[0]);
    int64_t contracted = 1;
    for (int d : dot->lhs_contracting) {
      contracted *= lhs.dims[d] / mesh.MaskSize(required[0][d]);
    }
    return 2.0 * static_cast<double>(result_elems) *
           static_cast<double>(contracted);
  }
  if (std::holds_alternative<Elementwise>(op.kind) ||
      std::holds_alternative<Transpose>(op.kind)) {
    return static_cast<double>(result_elems);
  }
  if (std::holds_alternative<Reduce>(op.kind)) {
    const TensorType& in = s.problem().type(op.operands[0]);
    int64_t elems = 1;
    for (int d = 0; d < in.rank(); ++d) {
      elems *= in.dims[d] / mesh.MaskSize(required[0][d]);
    }
    return static_cast<double>(elems);
  }
  return 0.0;
}

}  // namespace

absl::string_view CollectiveKindName(CollectiveKind kind) {
  switch (kind) {
    case CollectiveKind::kAllReduce:
      return "AllReduce";
    case CollectiveKind::kAllGather:
      return "AllGather";
    case CollectiveKind::kReduceScatter:
      return "ReduceScatter";
  }
  return "AllReduce";
}

const AxisLink& CostModelConfig::link(absl::string_view axis_name) const {
  for (const auto& [name, link] : axis_links) {
    if (name == axis_name) return link;
  }
  return default_link;
}

LoweredProgram Lower(const ModuleState& state, bool cse_allgather) {
  const Graph& graph = state.graph();
  const Mesh& mesh = state.mesh();
  const int num_ops = static_cast<int>(graph.ops().size());
  const int num_values = graph.num_values();
  LoweredProgram program;
  program.op_flops.assign(num_ops, 0.0);

  // What every consumer needs from every operand.
  std::vector<std::vector<DimMasks>> required(num_ops);
  for (int i = 0; i < num_ops; ++i) {
    const Operation& op = graph.ops()[i];
    for (int k = 0; k < static_cast<int>(op.operands.size()); ++k) {
      required[i].push_back(RequiredOperandDims(state, op, k));
    }
    program.op_flops[i] = OpFlops(state, op, required[i]);
  }

  // Resolve pending reductions once, right after the producer.
  std::vector<DimMasks> resolved(num_values);
  std::vector<std::vector<Collective>> after_op(num_ops);
  for (int i = 0; i < num_ops; ++i) {
    const Operation& op = graph.ops()[i];
    DimMasks cur = DimsOf(state, op.id);
    const AxisMask partial = state.partial(op.id);
    if (partial != 0) {
      // Every consumer's demand for each partial axis: the dim it wants the
      // axis on, -1 for none.
      std::vector<std::vector<int>> demands(mesh.num_axes());
      for (int user : graph.users(op.id)) {
        const Operation& u = graph.ops()[user];
        for (int k = 0; k < static_cast<int>(u.operands.size()); ++k) {
          if (u.operands[k] != op.id) continue;
          ForEachAxis(partial, [&](int a) {
            demands[a].push_back(DimWithAxis(required[user][k], a));
          });
        }
      }
      if (graph.is_output(op.id)) {
        ForEachAxis(partial, [&](int a) { demands[a].push_back(-1); });
      }
      ForEachAxis(partial, [&](int a) {
        const std::vector<int>& d = demands[a];
        if (d.empty()) return;  // dead value
        Collective c;
        c.axis = a;
        c.value = op.id;
        c.site = i;
        c.payload_bytes = LocalBytes(op.result_type, cur, mesh);
        const int dim = d.front();
        bool scatter = dim >= 0 && std::all_of(d.begin(), d.end(),
                                               [&](int x) { return x == dim; });
        if (scatter &&
            op.result_type.dims[dim] %
                    (mesh.MaskSize(cur[dim]) * mesh.axis_size(a)) !=
                0) {
          scatter = false;
        }
        if (scatter) {
          c.kind = CollectiveKind::kReduceScatter;
          cur[dim] |= AxisBit(a);
        } else {
          c.kind = CollectiveKind::kAllReduce;
        }
        after_op[i].push_back(c);
      });
    }
    resolved[op.id.index] = std::move(cur);
  }
  for (const Argument& arg : graph.args()) {
    resolved[arg.id.index] = DimsOf(state, arg.id);
  }

  // Gathers in front of each consumer.
  std::map<std::pair<int, DimMasks>, int> shared_gathers;  // -> buffer index
  std::vector<std::vector<Collective>> before_op(num_ops);
  for (int i = 0; i < num_ops; ++i) {
    const Operation& op = graph.ops()[i];
    for (int k = 0; k < static_cast<int>(op.operands.size()); ++k) {
      const ValueId v = op.operands[k];
      DimMasks cur = resolved[v.index];
      const DimMasks& need = required[i][k];
      std::vector<Collective> gathers;
      for (int d = 0; d < static_cast<int>(cur.size()); ++d) {
        ForEachAxis(cur[d] & ~need[d], [&](int a) {
          cur[d] &= ~AxisBit(a);
          Collective c;
          c.kind = CollectiveKind::kAllGather;
          c.axis = a;
          c.value = v;
          c.site = i;
          c.payload_bytes = 0;  // set below, once all gathers are applied
          gathers.push_back(c);
        });
      }
      if (gathers.empty()) continue;
      const TensorType& type = state.problem().type(v);
      // Payload of each gather: the tensor after this and earlier gathers.
      DimMasks partial_cur = resolved[v.index];
      for (Collective& c : gathers) {
        const int d = DimWithAxis(partial_cur, c.axis);
        partial_cur[d] &= ~AxisBit(c.axis);
        c.payload_bytes = LocalBytes(type, partial_cur, mesh);
      }
      const int64_t gathered_bytes = LocalBytes(type, cur, mesh);
      if (cse_allgather) {
        auto key = std::make_pair(v.index, cur);
        auto it = shared_gathers.find(key);
        if (it != shared_gathers.end()) {
          program.buffers[it->second].last = i;
          continue;
        }
        shared_gathers.emplace(std::move(key),
                               static_cast<int>(program.buffers.size()));
      }
      program.buffers.push_back({v, i, i, gathered_bytes});
      for (Collective& c : gathers) before_op[i].push_back(c);
    }
  }

  // Program order and counts.
  for (int i = 0; i < num_ops; ++i) {
    for (const Collective& c : before_op[i]) {
      program.steps.push_back({-1, static_cast<int>(program.collectives.size())});
      program.collectives.push_back(c);
    }
    program.steps.push_back({i, -1});
    for (const Collective& c : after_op[i]) {
      program.steps.push_back({-1, static_cast<int>(program.collectives.size())});
      program.collectives.push_back(c);
    }
  }
  for (const Collective& c : program.collectives) ++program.counts[c.kind];

  // Live ranges of arguments and op results.
  const int last_pos = std::max(num_ops - 1, 0);
  auto last_use = [&](ValueId v, int def) {
    if (graph.is_output(v)) return last_pos;
    const std::vector<int>& users = graph.users(v);
    return users.empty() ? def : std::max(def, users.back());
  };
  for (const Argument& arg : graph.args()) {
    const int64_t bytes = LocalBytes(arg.type, resolved[arg.id.index], mesh);
    const int last = arg.role == ArgRole::kData ? last_use(arg.id, 0) : last_pos;
    program.buffers.push_back({arg.id, 0, last, bytes});
  }
  for (int i = 0; i < num_ops; ++i) {
    const Operation& op = graph.ops()[i];
    const int last = last_use(op.id, i);
    const int64_t produced =
        LocalBytes(op.result_type, DimsOf(state, op.id), mesh);
    const int64_t kept = LocalBytes(op.result_type, resolved[op.id.index], mesh);
    program.buffers.push_back({op.id, i, i, produced});
    if (last > i) program.buffers.push_back({op.id, i + 1, last, kept});
  }
  return program;
}

double CollectiveTime(CollectiveKind kind, int64_t axis_size,
                      int64_t payload_bytes, const AxisLink& link) {
  const double n = static_cast<double>(axis_size);
  const double s = static_cast<double>(payload_bytes);
  const double one_pass = (n - 1) * link.latency_seconds +
                          s * (n - 1) / (n * link.bandwidth_bytes_per_second);
  return kind == CollectiveKind::kAllReduce ? 2 * one_pass : one_pass;
}

double CollectiveTime(const Collective& c, const Mesh& mesh,
                      const CostModelConfig& cfg) {
  return CollectiveTime(c.kind, mesh.axis_size(c.axis), c.payload_bytes,
                        cfg.link(mesh.axis(c.axis).name));
}

double WireBytes(const Collective& c, const Mesh& mesh) {
  const double n = static_cast<double>(mesh.axis_size(c.axis));
  const double one_pass = static_cast<double>(c.payload_bytes) * (n - 1) / n;
  return c.kind == CollectiveKind::kAllReduce ? 2 * one_pass : one_pass;
}

int64_t PeakMemory(const std::vector<Buffer>& buffers, int num_positions) {
  const int n = std::max(num_positions, 1);
  std::vector<int64_t> delta(n + 1, 0);
  for (const Buffer& b : buffers) {
    delta[b.first] += b.bytes;
    delta[b.last + 1] -= b.bytes;
  }
  int64_t live = 0;
  int64_t peak = 0;
  for (int t = 0; t < n; ++t) {
    live += delta[t];
    peak = std::max(peak, live);
  }
  return peak;
}

double PenalizedCost(double runtime_seconds, int64_t peak_memory_bytes,
                     const CostModelConfig& cfg) {
  if (!std::isfinite(cfg.memory_limit_bytes) || cfg.memory_limit_bytes <= 0) {
    return runtime_seconds;
  }
  const double over = std::max(
      0.0, static_cast<double>(peak_memory_bytes) / cfg.memory_limit_bytes -
               1.0);
  return runtime_seconds * (1.0 + cfg.memory_penalty_slope * over);
}

CostEstimate EstimateLowered(const LoweredProgram& program,
                             const ModuleState& state,
                             const CostModelConfig& cfg) {
  CostEstimate est;
  for (double flops : program.op_flops) {
    est.compute_seconds += flops / cfg.flops_per_second;
  }
  for (const Collective& c : program.collectives) {
    est.communication_seconds += CollectiveTime(c, state.mesh(), cfg);
  }
  est.runtime_seconds = est.compute_seconds + est.communication_seconds;
  est.peak_memory_bytes = PeakMemory(
      program.buffers, static_cast<int>(state.graph().ops().size()));
  est.counts = program.counts;
  est.penalized_cost =
      PenalizedCost(est.runtime_seconds, est.peak_memory_bytes, cfg);
  return est;
}

CostEstimate Estimate(const ModuleState& state, const CostModelConfig& cfg) {
  return EstimateLowered(Lower(state, cfg.cse_allgather), state, cfg);
}

}  // namespace meshsearch
