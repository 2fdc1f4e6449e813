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

#include "meshsearch/model_zoo.h"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace meshsearch {

namespace {

using Json = nlohmann::ordered_json;

// Records the forward pass so the backward pass can be emitted by walking it
// in reverse. Every emitted op lands in the graph.
class StepBuilder {
 public:
  explicit StepBuilder(std::string name) : b_(std::move(name)) {}

  ValueId Param(absl::string_view name, std::vector<int64_t> dims, int group,
                int m_group, int v_group) {
    ValueId id = b_.AddArg(name, {std::move(dims), element_bytes_},
                           ArgRole::kParameter, group);
    MarkGrad(id);
    params_.push_back({id, std::string(name), m_group, v_group});
    return id;
  }
  ValueId Data(absl::string_view name, std::vector<int64_t> dims, int group) {
    return b_.AddArg(name, {std::move(dims), element_bytes_}, ArgRole::kData,
                     group);
  }
  ValueId Const(absl::string_view name, std::vector<int64_t> dims) {
    return b_.AddOp(name, Constant{{std::move(dims), element_bytes_}}, {});
  }

  ValueId Dot(absl::string_view name, ValueId a, ValueId b,
              std::vector<int> lc, std::vector<int> rc,
              std::vector<int> lb = {}, std::vector<int> rb = {}) {
    DotGeneral dot{std::move(lb), std::move(rb), std::move(lc),
                   std::move(rc)};
    return Record(b_.AddOp(name, dot, {a, b}), dot, {a, b});
  }
  ValueId Act(absl::string_view name, std::string fn, ValueId x) {
    return Record(b_.Unary(name, fn, x), Elementwise{fn, 1}, {x});
  }
  ValueId Add(absl::string_view name, ValueId x, ValueId y) {
    return Record(b_.Binary(name, "add", x, y), Elementwise{"add", 2}, {x, y});
  }
  ValueId Transposed(absl::string_view name, ValueId x, std::vector<int> perm) {
    return Record(b_.Transposed(name, x, perm), Transpose{perm}, {x});
  }

  // Seeds d(out) = grad and emits gradients for every recorded op in reverse.
  void Backward(ValueId out, ValueId grad) {
    AccumulateGrad(out, grad);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
      auto g = grads_.find(it->out.index);
      if (g == grads_.end()) continue;
      EmitGrad(*it, g->second);
    }
  }

  // Adam-like update of every parameter that received a gradient.
  void Optimizer() {
    for (const ParamInfo& p : params_) {
      auto g = grads_.find(p.id.index);
      if (g == grads_.end()) continue;
      const TensorType& t = b_.type(p.id);
      ValueId m = b_.AddArg(absl::StrCat(p.name, "/m"), t,
                            ArgRole::kOptimizerState, p.m_group);
      ValueId v = b_.AddArg(absl::StrCat(p.name, "/v"), t,
                            ArgRole::kOptimizerState, p.v_group);
      ValueId m_new =
          b_.Binary(absl::StrCat(p.name, "/m_new"), "adam_m", m, g->second);
      ValueId v_new =
          b_.Binary(absl::StrCat(p.name, "/v_new"), "adam_v", v, g->second);
      ValueId update =
          b_.Binary(absl::StrCat(p.name, "/update"), "adam_dir", m_new, v_new);
      ValueId p_new =
          b_.Binary(absl::StrCat(p.name, "/new"), "sub", p.id, update);
      b_.AddOutput(p_new);
      b_.AddOutput(m_new);
      b_.AddOutput(v_new);
    }
  }

  GraphBuilder& builder() { return b_; }
  void set_element_bytes(int64_t bytes) { element_bytes_ = bytes; }

 private:
  struct OpRecord {
    ValueId out;
    OpKind kind;
    std::vector<ValueId> operands;
  };
  struct ParamInfo {
    ValueId id;
    std::string name;
    int m_group;
    int v_group;
  };

  bool NeedsGrad(ValueId v) const {
    return v.index < static_cast<int>(needs_grad_.size()) &&
           needs_grad_[v.index];
  }
  void MarkGrad(ValueId v) {
    if (v.index >= static_cast<int>(needs_grad_.size())) {
      needs_grad_.resize(v.index + 1, false);
    }
    needs_grad_[v.index] = true;
  }

  ValueId Record(ValueId out, OpKind kind, std::vector<ValueId> operands) {
    bool grad = std::any_of(operands.begin(), operands.end(),
                            [&](ValueId v) { return NeedsGrad(v); });
    if (grad) MarkGrad(out);
    records_.push_back({out, std::move(kind), std::move(operands)});
    return out;
  }

  void AccumulateGrad(ValueId v, ValueId g) {
    auto [it, inserted] = grads_.try_emplace(v.index, g);
    if (!inserted) {
      it->second = b_.Binary(absl::StrCat("grad_acc#", grad_counter_++), "add",
                             it->second, g);
    }
  }

  // Maps a transposed-layout tensor back: result dim i is raw dim perm[i],
  // with perm[i] = position of dim i in `order`.
  ValueId ToLayout(ValueId raw, const std::vector<int>& order) {
    std::vector<int> perm(order.size());
    for (size_t pos = 0; pos < order.size(); ++pos) {
      perm[order[pos]] = static_cast<int>(pos);
    }
    bool identity = true;
    for (size_t i = 0; i < perm.size(); ++i) {
      identity &= perm[i] == static_cast<int>(i);
    }
    if (identity) return raw;
    return b_.Transposed(absl::StrCat("grad_t#", grad_counter_++), raw, perm);
  }

  void EmitGrad(const OpRecord& r, ValueId dr) {
    const int id = grad_counter_++;
    if (const auto* dot = std::get_if<DotGeneral>(&r.kind)) {
      const ValueId a = r.operands[0];
      const ValueId b = r.operands[1];
      const int k = static_cast<int>(dot->lhs_batch.size());
      const std::vector<int> fa =
          FreeDims(b_.type(a).rank(), dot->lhs_batch, dot->lhs_contracting);
      const std::vector<int> fb =
          FreeDims(b_.type(b).rank(), dot->rhs_batch, dot->rhs_contracting);
      const int na = static_cast<int>(fa.size());
      const int nb = static_cast<int>(fb.size());
      std::vector<int> batch_pos(k);
      std::iota(batch_pos.begin(), batch_pos.end(), 0);
      // Contracting pairs, sorted by the rhs and by the lhs dim.
      std::vector<std::pair<int, int>> pairs;
      for (size_t j = 0; j < dot->lhs_contracting.size(); ++j) {
        pairs.push_back({dot->lhs_contracting[j], dot->rhs_contracting[j]});
      }
      if (NeedsGrad(a)) {
        std::vector<int> lc(nb);
        std::iota(lc.begin(), lc.end(), k + na);
        ValueId raw = b_.Dot(absl::StrCat("grad_dot#", id, "a"), dr, b, lc, fb,
                             batch_pos, dot->rhs_batch);
        auto by_rhs = pairs;
        std::sort(by_rhs.begin(), by_rhs.end(),
                  [](auto x, auto y) { return x.second < y.second; });
        std::vector<int> order = dot->lhs_batch;
        order.insert(order.end(), fa.begin(), fa.end());
        for (auto [l, rr] : by_rhs) order.push_back(l);
        AccumulateGrad(a, ToLayout(raw, order));
      }
      if (NeedsGrad(b)) {
        std::vector<int> rc(na);
        std::iota(rc.begin(), rc.end(), k);
        ValueId raw = b_.Dot(absl::StrCat("grad_dot#", id, "b"), a, dr, fa, rc,
                             dot->lhs_batch, batch_pos);
        auto by_lhs = pairs;
        std::sort(by_lhs.begin(), by_lhs.end());
        std::vector<int> order = dot->rhs_batch;
        for (auto [l, rr] : by_lhs) order.push_back(rr);
        order.insert(order.end(), fb.begin(), fb.end());
        AccumulateGrad(b, ToLayout(raw, order));
      }
    } else if (const auto* ew = std::get_if<Elementwise>(&r.kind)) {
      if (ew->arity == 2) {  // add
        for (ValueId x : r.operands) {
          if (NeedsGrad(x)) AccumulateGrad(x, dr);
        }
      } else if (NeedsGrad(r.operands[0])) {
        AccumulateGrad(r.operands[0],
                       b_.Binary(absl::StrCat("grad_", ew->name, "#", id),
                                 absl::StrCat(ew->name, "_grad"), dr,
                                 r.operands[0]));
      }
    } else if (const auto* t = std::get_if<Transpose>(&r.kind)) {
      if (NeedsGrad(r.operands[0])) {
        std::vector<int> inverse(t->permutation.size());
        for (size_t i = 0; i < inverse.size(); ++i) {
          inverse[t->permutation[i]] = static_cast<int>(i);
        }
        AccumulateGrad(r.operands[0],
                       b_.Transposed(absl::StrCat("grad_t#", id), dr, inverse));
      }
    }
  }

  GraphBuilder b_;
  int64_t element_bytes_ = 4;
  std::vector<OpRecord> records_;
  std::vector<ParamInfo> params_;
  std::vector<bool> needs_grad_;
  absl::flat_hash_map<int32_t, ValueId> grads_;
  int grad_counter_ = 0;
};

absl::Status CheckDims(
    absl::string_view model,
    const std::vector<std::pair<std::string, int64_t>>& dims,
    const Mesh* mesh) {
  for (const auto& [name, size] : dims) {
    if (size < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat(model, " dim '", name, "' must be positive"));
    }
  }
  if (mesh == nullptr) return absl::OkStatus();
  for (const auto& [name, size] : dims) {
    for (const MeshAxis& axis : mesh->axes()) {
      if (size % axis.size != 0) {
        return absl::FailedPreconditionError(absl::StrCat(
            model, " dim '", name, "' (", size,
            ") is not divisible by mesh axis '", axis.name, "' of size ",
            axis.size));
      }
    }
  }
  return absl::OkStatus();
}

std::string L(int layer, absl::string_view what) {
  return absl::StrCat("l", layer, "/", what);
}

}  // namespace

int64_t TransformerParamsPerLayer(const TransformerConfig& cfg) {
  return 4 * cfg.d_model * cfg.n_head * cfg.d_head +
         2 * cfg.d_model * cfg.d_ff;
}

absl::StatusOr<Graph> BuildTransformer(const TransformerConfig& cfg,
                                       const Mesh* mesh) {
  if (cfg.layers < 1) {
    return absl::InvalidArgumentError("transformer needs at least one layer");
  }
  if (cfg.d_model != cfg.n_head * cfg.d_head) {
    return absl::InvalidArgumentError(
        absl::StrCat("d_model (", cfg.d_model, ") must equal n_head * d_head (",
                     cfg.n_head * cfg.d_head, ")"));
  }
  absl::Status dims_ok = CheckDims(
      "transformer",
      {{"batch", cfg.batch}, {"seq_len", cfg.seq_len},
       {"d_model", cfg.d_model}, {"n_head", cfg.n_head},
       {"d_head", cfg.d_head}, {"d_ff", cfg.d_ff}},
      mesh);
  if (!dims_ok.ok()) return dims_ok;

  using G = TransformerGroups;
  const int64_t B = cfg.batch, S = cfg.seq_len, D = cfg.d_model,
                H = cfg.n_head, Dh = cfg.d_head, F = cfg.d_ff;
  StepBuilder s("transformer");
  s.set_element_bytes(cfg.element_bytes);
  ValueId h = s.Data("x", {B, S, D}, G::kTokens);
  ValueId y = s.Data("y", {B, S, D}, G::kTarget);
  auto param = [&](int layer, absl::string_view name,
                   std::vector<int64_t> dims, int group) {
    return s.Param(L(layer, name), std::move(dims), group, G::MomentM(group),
                   G::MomentV(group));
  };
  for (int l = 0; l < cfg.layers; ++l) {
    ValueId wq = param(l, "wq", {D, H, Dh}, G::kWq);
    ValueId wk = param(l, "wk", {D, H, Dh}, G::kWk);
    ValueId wv = param(l, "wv", {D, H, Dh}, G::kWv);
    ValueId wo = param(l, "wo", {H, Dh, D}, G::kWo);
    ValueId w1 = param(l, "w1", {D, F}, G::kW1);
    ValueId w2 = param(l, "w2", {F, D}, G::kW2);
    // [B,S,H,Dh] projections.
    ValueId q = s.Dot(L(l, "q"), h, wq, {2}, {0});
    ValueId k = s.Dot(L(l, "k"), h, wk, {2}, {0});
    ValueId v = s.Dot(L(l, "v"), h, wv, {2}, {0});
    // [B,H,S,S] scores, batched over B and H.
    ValueId scores = s.Dot(L(l, "scores"), q, k, {3}, {3}, {0, 2}, {0, 2});
    ValueId probs = s.Act(L(l, "probs"), "softmax", scores);
    // [B,H,S,Dh]
    ValueId ctx = s.Dot(L(l, "ctx"), probs, v, {3}, {1}, {0, 1}, {0, 2});
    ValueId attn = s.Dot(L(l, "attn"), ctx, wo, {1, 3}, {0, 1});
    ValueId h1 = s.Add(L(l, "res1"), h, attn);
    ValueId a = s.Dot(L(l, "ffn_in"), h1, w1, {2}, {0});
    ValueId g = s.Act(L(l, "ffn_act"), "gelu", a);
    ValueId f = s.Dot(L(l, "ffn_out"), g, w2, {2}, {0});
    h = s.Add(L(l, "res2"), h1, f);
  }
  GraphBuilder& b = s.builder();
  ValueId err = b.Binary("sq_err", "sq_err", h, y);
  b.AddOutput(b.AddOp("loss", Reduce{ReduceKind::kSum, {0, 1, 2}}, {err}));
  s.Backward(h, b.Binary("d_out", "loss_grad", h, y));
  s.Optimizer();
  return std::move(b).Build();
}

std::vector<Action> TransformerExpertPlan(TransformerStrategy strategy) {
  using G = TransformerGroups;
  constexpr int kBatchAxis = 0;
  constexpr int kModelAxis = 1;
  std::vector<Action> plan = {{G::kTokens, 0, kBatchAxis}};
  if (strategy == TransformerStrategy::kBatch) return plan;
  // Heads of the attention block and the hidden dim of the FFN; the other
  // projections follow by propagation.
  plan.push_back({G::kWq, 1, kModelAxis});
  plan.push_back({G::kW1, 1, kModelAxis});
  if (strategy == TransformerStrategy::kBatchMegatron) return plan;
  // Parameters and moments on the batch axis. One action per parameter kind
  // covers its moments through the update ops.
  for (int p = G::kWq; p <= G::kW2; ++p) {
    plan.push_back({p, p == G::kWo || p == G::kW2 ? 1 : 0, kBatchAxis});
  }
  return plan;
}

int64_t GnsParamsPerStep(const GnsLikeConfig& cfg) {
  return 3 * cfg.latent * cfg.mlp_hidden + cfg.mlp_hidden * cfg.latent +
         2 * cfg.latent * cfg.mlp_hidden + cfg.mlp_hidden * cfg.latent;
}

absl::StatusOr<Graph> BuildGnsLike(const GnsLikeConfig& cfg,
                                   const Mesh* mesh) {
  if (cfg.message_passing_steps < 1) {
    return absl::InvalidArgumentError("gns needs at least one step");
  }
  absl::Status dims_ok = CheckDims(
      "gns",
      {{"nodes", cfg.nodes}, {"edges", cfg.edges}, {"latent", cfg.latent},
       {"mlp_hidden", cfg.mlp_hidden}},
      mesh);
  if (!dims_ok.ok()) return dims_ok;

  using G = GnsGroups;
  const int64_t N = cfg.nodes, E = cfg.edges, Lt = cfg.latent,
                Hd = cfg.mlp_hidden;
  StepBuilder s("gns_like");
  s.set_element_bytes(cfg.element_bytes);
  ValueId x = s.Data("x", {N, Lt}, G::kNodes);
  ValueId e = s.Data("e", {E, Lt}, G::kEdges);
  ValueId y = s.Data("y", {N, Lt}, G::kTarget);
  // Fixed incidence matrices: gathers and the segment sum are dots.
  ValueId senders = s.Const("send_incidence", {E, N});
  ValueId receivers = s.Const("recv_incidence", {E, N});
  ValueId scatter = s.Const("recv_scatter", {N, E});
  auto param = [&](int step, absl::string_view name,
                   std::vector<int64_t> dims, int kind) {
    const int group = G::kFirstParam + kind;
    return s.Param(absl::StrCat("mp", step, "/", name), std::move(dims), group,
                   G::MomentM(group), G::MomentV(group));
  };
  for (int t = 0; t < cfg.message_passing_steps; ++t) {
    auto n = [&](absl::string_view what) {
      return absl::StrCat("mp", t, "/", what);
    };
    ValueId we_s = param(t, "edge_w_send", {Lt, Hd}, 0);
    ValueId we_r = param(t, "edge_w_recv", {Lt, Hd}, 1);
    ValueId we_e = param(t, "edge_w_edge", {Lt, Hd}, 2);
    ValueId we_o = param(t, "edge_w_out", {Hd, Lt}, 3);
    ValueId wn_x = param(t, "node_w_node", {Lt, Hd}, 4);
    ValueId wn_a = param(t, "node_w_agg", {Lt, Hd}, 5);
    ValueId wn_o = param(t, "node_w_out", {Hd, Lt}, 6);
    // Edge update from sender, receiver and edge features.
    ValueId xs = s.Dot(n("x_send"), senders, x, {1}, {0});
    ValueId xr = s.Dot(n("x_recv"), receivers, x, {1}, {0});
    ValueId z = s.Add(n("edge_pre1"), s.Dot(n("edge_s"), xs, we_s, {1}, {0}),
                      s.Dot(n("edge_r"), xr, we_r, {1}, {0}));
    z = s.Add(n("edge_pre"), z, s.Dot(n("edge_e"), e, we_e, {1}, {0}));
    ValueId act = s.Act(n("edge_act"), "relu", z);
    e = s.Add(n("edge_res"), e, s.Dot(n("edge_out"), act, we_o, {1}, {0}));
    // Node update from the summed incoming messages.
    ValueId agg = s.Dot(n("agg"), scatter, e, {1}, {0});
    ValueId zn = s.Add(n("node_pre"), s.Dot(n("node_x"), x, wn_x, {1}, {0}),
                       s.Dot(n("node_a"), agg, wn_a, {1}, {0}));
    ValueId an = s.Act(n("node_act"), "relu", zn);
    x = s.Add(n("node_res"), x, s.Dot(n("node_out"), an, wn_o, {1}, {0}));
  }
  GraphBuilder& b = s.builder();
  ValueId err = b.Binary("sq_err", "sq_err", x, y);
  b.AddOutput(b.AddOp("loss", Reduce{ReduceKind::kSum, {0, 1}}, {err}));
  s.Backward(x, b.Binary("d_out", "loss_grad", x, y));
  s.Optimizer();
  return std::move(b).Build();
}

std::vector<Action> GnsEdgeShardingPlan(const Mesh& mesh) {
  std::vector<Action> plan;
  for (int a = 0; a < mesh.num_axes(); ++a) {
    plan.push_back({GnsGroups::kEdges, 0, a});
  }
  return plan;
}

int64_t UNetParamCount(const UNetLikeConfig& cfg) {
  const std::vector<int64_t>& w = cfg.widths;
  int64_t total = w[0] * w[0];  // enc_0
  for (int i = 1; i < cfg.depth; ++i) total += w[i - 1] * w[i];
  total += w.back() * w.back();  // mid
  for (int i = cfg.depth - 1; i >= 1; --i) total += w[i] * w[i - 1];
  total += w[0] * w[0];  // dec_0
  return total;
}

absl::StatusOr<Graph> BuildUNetLike(const UNetLikeConfig& cfg,
                                    const Mesh* mesh) {
  if (cfg.depth < 1 || static_cast<int>(cfg.widths.size()) != cfg.depth) {
    return absl::InvalidArgumentError(
        absl::StrCat("unet depth (", cfg.depth, ") must equal the number of "
                     "widths (", cfg.widths.size(), ") and be positive"));
  }
  std::vector<std::pair<std::string, int64_t>> dims = {{"batch", cfg.batch}};
  for (int i = 0; i < cfg.depth; ++i) {
    dims.push_back({absl::StrCat("widths[", i, "]"), cfg.widths[i]});
  }
  absl::Status dims_ok = CheckDims("unet", dims, mesh);
  if (!dims_ok.ok()) return dims_ok;

  const std::vector<int64_t>& w = cfg.widths;
  const int num_params = UNetGroups::NumParams(cfg);
  StepBuilder s("unet_like");
  s.set_element_bytes(cfg.element_bytes);
  ValueId x = s.Data("x", {cfg.batch, w[0]}, UNetGroups::kInput);
  ValueId y = s.Data("y", {cfg.batch, w[0]}, UNetGroups::kTarget);
  int next_param = 0;
  auto layer = [&](absl::string_view name, ValueId in, int64_t in_w,
                   int64_t out_w) {
    const int group = UNetGroups::kFirstParam + next_param++;
    ValueId wt = s.Param(absl::StrCat(name, "/w"), {in_w, out_w}, group,
                         group + num_params, group + 2 * num_params);
    ValueId pre = s.Dot(absl::StrCat(name, "/pre"), in, wt, {1}, {0});
    return s.Act(absl::StrCat(name, "/act"), "relu", pre);
  };
  std::vector<ValueId> skips;
  ValueId h = x;
  int64_t width = w[0];
  for (int i = 0; i < cfg.depth; ++i) {
    h = layer(absl::StrCat("enc", i), h, width, w[i]);
    width = w[i];
    skips.push_back(h);
  }
  h = layer("mid", h, width, width);
  for (int i = cfg.depth - 1; i >= 0; --i) {
    if (cfg.skip_connections) {
      h = s.Add(absl::StrCat("skip", i), h, skips[i]);
    }
    const int64_t out_w = i == 0 ? w[0] : w[i - 1];
    h = layer(absl::StrCat("dec", i), h, w[i], out_w);
  }
  GraphBuilder& b = s.builder();
  ValueId err = b.Binary("sq_err", "sq_err", h, y);
  b.AddOutput(b.AddOp("loss", Reduce{ReduceKind::kSum, {0, 1}}, {err}));
  s.Backward(h, b.Binary("d_out", "loss_grad", h, y));
  s.Optimizer();
  return std::move(b).Build();
}

std::vector<Action> UNetBatchZero3Plan(const UNetLikeConfig& cfg) {
  std::vector<Action> plan = {{UNetGroups::kInput, 0, 0}};
  for (int p = 0; p < UNetGroups::NumParams(cfg); ++p) {
    plan.push_back({UNetGroups::kFirstParam + p, 0, 0});
  }
  return plan;
}

namespace {

// Reads `key` into `out` when present; records it as consumed.
template <typename T>
absl::Status Field(const Json& j, const char* key, T& out,
                   std::vector<std::string>& seen) {
  seen.push_back(key);
  if (!j.contains(key)) return absl::OkStatus();
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("model config field '", key, "': ", e.what()));
  }
  return absl::OkStatus();
}

absl::Status NoUnknownFields(const Json& j,
                             const std::vector<std::string>& seen) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(seen.begin(), seen.end(), it.key()) == seen.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown model config field '", it.key(), "'"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Graph> BuildModel(absl::string_view name, const Json& cfg,
                                 const Mesh* mesh) {
  const Json empty = Json::object();
  const Json& j = cfg.is_null() ? empty : cfg;
  if (!j.is_object()) {
    return absl::InvalidArgumentError("model config must be a JSON object");
  }
  std::vector<std::string> seen;
  absl::Status st;
  auto read = [&](const char* key, auto& out) {
    if (st.ok()) st = Field(j, key, out, seen);
  };
  if (name == "transformer") {
    TransformerConfig c;
    read("layers", c.layers);
    read("d_model", c.d_model);
    read("n_head", c.n_head);
    read("d_head", c.d_head);
    read("d_ff", c.d_ff);
    read("batch", c.batch);
    read("seq_len", c.seq_len);
    read("element_bytes", c.element_bytes);
    if (st.ok()) st = NoUnknownFields(j, seen);
    if (!st.ok()) return st;
    return BuildTransformer(c, mesh);
  }
  if (name == "gns") {
    GnsLikeConfig c;
    read("message_passing_steps", c.message_passing_steps);
    read("mlp_hidden", c.mlp_hidden);
    read("latent", c.latent);
    read("nodes", c.nodes);
    read("edges", c.edges);
    read("element_bytes", c.element_bytes);
    if (st.ok()) st = NoUnknownFields(j, seen);
    if (!st.ok()) return st;
    return BuildGnsLike(c, mesh);
  }
  if (name == "unet") {
    UNetLikeConfig c;
    read("depth", c.depth);
    read("widths", c.widths);
    read("skip_connections", c.skip_connections);
    read("batch", c.batch);
    read("element_bytes", c.element_bytes);
    if (st.ok()) st = NoUnknownFields(j, seen);
    if (!st.ok()) return st;
    if (!j.contains("depth")) c.depth = static_cast<int>(c.widths.size());
    return BuildUNetLike(c, mesh);
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown model '", name, "'; expected transformer, gns or unet"));
}

}  // namespace meshsearch
