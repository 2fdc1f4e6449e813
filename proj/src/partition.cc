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

#include "meshsearch/partition.h"

#include <algorithm>
#include <deque>
#include <initializer_list>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace meshsearch {

PartitionProblem::PartitionProblem(Graph graph, Mesh mesh)
    : graph_(std::move(graph)), mesh_(std::move(mesh)) {
  const int n = graph_.num_values();
  rank_.resize(n);
  offset_.resize(n);
  for (int v = 0; v < n; ++v) {
    const TensorType* type = graph_.value_type(ValueId{v});
    offset_[v] = static_cast<int>(sizes_.size());
    rank_[v] = type == nullptr ? 0 : type->rank();
    if (type != nullptr) {
      sizes_.insert(sizes_.end(), type->dims.begin(), type->dims.end());
    }
  }
}

absl::StatusOr<std::shared_ptr<const PartitionProblem>>
PartitionProblem::Create(Graph graph, Mesh mesh) {
  std::vector<Violation> violations = ValidateGraph(graph);
  if (!violations.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("graph '", graph.name(), "' is invalid: value '",
                     violations.front().value, "': ",
                     violations.front().description,
                     violations.size() > 1
                         ? absl::StrCat(" (and ", violations.size() - 1,
                                        " more)")
                         : ""));
  }
  return std::shared_ptr<const PartitionProblem>(
      new PartitionProblem(std::move(graph), std::move(mesh)));
}

std::string PartitionProblem::ActionToString(const Action& action) const {
  std::string axis = action.axis >= 0 && action.axis < mesh_.num_axes()
                         ? mesh_.axis(action.axis).name
                         : absl::StrCat("#", action.axis);
  return absl::StrCat("(group ", action.group, ", dim ", action.dim, ", ",
                      axis, ")");
}

ModuleState ModuleState::Initial(
    std::shared_ptr<const PartitionProblem> problem) {
  ModuleState state;
  state.dims_.assign(problem->total_dims(), 0);
  state.partial_.assign(problem->graph().num_values(), 0);
  state.actionable_.assign(problem->num_groups(), problem->mesh().all_axes());
  state.problem_ = std::move(problem);
  return state;
}

AxisMask ModuleState::used_axes(ValueId v) const {
  AxisMask used = partial_[v.index];
  const int off = problem_->dim_offset(v);
  for (int d = 0; d < problem_->rank(v); ++d) used |= dims_[off + d];
  return used;
}

Sharding ModuleState::sharding(ValueId v) const {
  const int off = problem_->dim_offset(v);
  Sharding s;
  s.per_dim.assign(dims_.begin() + off, dims_.begin() + off + problem_->rank(v));
  s.partial = partial_[v.index];
  return s;
}

std::vector<int> ModuleState::worklist(int axis) const {
  std::vector<int> ids;
  for (int g = 0; g < problem_->num_groups(); ++g) {
    if (actionable_[g] & AxisBit(axis)) ids.push_back(problem_->group(g).id);
  }
  return ids;
}

std::vector<int> ReshapeDimMap(const std::vector<int64_t>& from,
                               const std::vector<int64_t>& to) {
  std::vector<int> map(from.size(), -1);
  size_t i = 0;
  size_t j = 0;
  while (i < from.size() && j < to.size()) {
    size_t i0 = i;
    size_t j0 = j;
    int64_t pf = from[i++];
    int64_t pt = to[j++];
    while (pf != pt) {
      if (pf < pt) {
        if (i == from.size()) return map;
        pf *= from[i++];
      } else {
        if (j == to.size()) return map;
        pt *= to[j++];
      }
    }
    if (i - i0 == 1 && j - j0 == 1) map[i0] = static_cast<int>(j0);
  }
  return map;
}

// Worklist-driven fixpoint over the rule set. Shardings only grow; an axis is
// added to a dim only when the value does not use it yet and the dim stays
// divisible, so the first axis to arrive wins.
class Propagator {
 public:
  Propagator(ModuleState& state, PropagationStats* stats)
      : state_(state),
        problem_(*state.problem_),
        graph_(problem_.graph()),
        queued_(graph_.ops().size(), false),
        stats_(stats) {}

  void EnqueueAll() {
    for (int i = 0; i < static_cast<int>(graph_.ops().size()); ++i) Enqueue(i);
  }

  bool Seed(ValueId v, int d, int axis) { return TryAddDim(v, d, axis); }
  void SeedPartial(ValueId v, int axis) { TryAddPartial(v, axis); }

  void Run() {
    while (!queue_.empty()) {
      int op = queue_.front();
      queue_.pop_front();
      queued_[op] = false;
      Visit(graph_.ops()[op]);
    }
  }

  void UpdateWorklists() {
    for (int g = 0; g < problem_.num_groups(); ++g) {
      AxisMask used = 0;
      for (ValueId m : problem_.group(g).members) used |= state_.used_axes(m);
      state_.actionable_[g] &= ~used;
    }
  }

 private:
  struct DimRef {
    ValueId value;
    int dim;
  };

  AxisMask& Mask(ValueId v, int d) {
    return state_.dims_[problem_.dim_offset(v) + d];
  }

  void Enqueue(int op) {
    if (!queued_[op]) {
      queued_[op] = true;
      queue_.push_back(op);
    }
  }

  void Touch(ValueId v) {
    int p = graph_.producer(v);
    if (p >= 0) Enqueue(p);
    for (int user : graph_.users(v)) Enqueue(user);
  }

  bool TryAddDim(ValueId v, int d, int axis) {
    AxisMask bit = AxisBit(axis);
    AxisMask& mask = Mask(v, d);
    if (mask & bit) return false;
    const Mesh& mesh = problem_.mesh();
    if ((state_.used_axes(v) & bit) != 0 ||
        problem_.dim_size(v, d) % (mesh.MaskSize(mask) * mesh.axis_size(axis)) !=
            0) {
      if (stats_ != nullptr) ++stats_->blocked;
      return false;
    }
    mask |= bit;
    if (stats_ != nullptr) ++stats_->additions;
    Touch(v);
    return true;
  }

  void TryAddPartial(ValueId v, int axis) {
    AxisMask bit = AxisBit(axis);
    if (state_.partial_[v.index] & bit) return;
    if (state_.used_axes(v) & bit) {
      if (stats_ != nullptr) ++stats_->blocked;
      return;
    }
    state_.partial_[v.index] |= bit;
    if (stats_ != nullptr) ++stats_->additions;
    Touch(v);
  }

  // Makes every listed dim carry the union of their axes, where allowed.
  void Link(std::initializer_list<DimRef> refs) {
    AxisMask all = 0;
    for (const DimRef& r : refs) all |= Mask(r.value, r.dim);
    if (all == 0) return;
    for (const DimRef& r : refs) {
      ForEachAxis(all & ~Mask(r.value, r.dim),
                  [&](int axis) { TryAddDim(r.value, r.dim, axis); });
    }
  }

  void Visit(const Operation& op) {
    const ValueId res = op.id;
    if (const auto* dot = std::get_if<DotGeneral>(&op.kind)) {
      const ValueId lhs = op.operands[0];
      const ValueId rhs = op.operands[1];
      int pos = 0;
      for (size_t k = 0; k < dot->lhs_batch.size(); ++k, ++pos) {
        Link({{lhs, dot->lhs_batch[k]}, {rhs, dot->rhs_batch[k]}, {res, pos}});
      }
      for (int d : FreeDims(problem_.rank(lhs), dot->lhs_batch,
                            dot->lhs_contracting)) {
        Link({{lhs, d}, {res, pos++}});
      }
      for (int d : FreeDims(problem_.rank(rhs), dot->rhs_batch,
                            dot->rhs_contracting)) {
        Link({{rhs, d}, {res, pos++}});
      }
      for (size_t k = 0; k < dot->lhs_contracting.size(); ++k) {
        const int lc = dot->lhs_contracting[k];
        const int rc = dot->rhs_contracting[k];
        Link({{lhs, lc}, {rhs, rc}});
        ForEachAxis(Mask(lhs, lc) & Mask(rhs, rc),
                    [&](int axis) { TryAddPartial(res, axis); });
      }
    } else if (std::holds_alternative<Elementwise>(op.kind)) {
      for (int d = 0; d < problem_.rank(res); ++d) {
        if (op.operands.size() == 1) {
          Link({{op.operands[0], d}, {res, d}});
        } else {
          Link({{op.operands[0], d}, {op.operands[1], d}, {res, d}});
        }
      }
    } else if (const auto* reduce = std::get_if<Reduce>(&op.kind)) {
      const ValueId in = op.operands[0];
      int pos = 0;
      for (int d = 0; d < problem_.rank(in); ++d) {
        bool reduced = std::find(reduce->dims.begin(), reduce->dims.end(), d) !=
                       reduce->dims.end();
        if (!reduced) {
          Link({{in, d}, {res, pos++}});
        } else if (reduce->kind == ReduceKind::kSum) {
          ForEachAxis(Mask(in, d),
                      [&](int axis) { TryAddPartial(res, axis); });
        }
      }
    } else if (const auto* transpose = std::get_if<Transpose>(&op.kind)) {
      for (int j = 0; j < static_cast<int>(transpose->permutation.size());
           ++j) {
        Link({{op.operands[0], transpose->permutation[j]}, {res, j}});
      }
    } else if (std::holds_alternative<Reshape>(op.kind)) {
      const ValueId in = op.operands[0];
      std::vector<int> map = ReshapeDimMap(problem_.type(in).dims,
                                           op.result_type.dims);
      for (int i = 0; i < static_cast<int>(map.size()); ++i) {
        if (map[i] >= 0) Link({{in, i}, {res, map[i]}});
      }
    }
  }

  ModuleState& state_;
  const PartitionProblem& problem_;
  const Graph& graph_;
  std::deque<int> queue_;
  std::vector<bool> queued_;
  PropagationStats* stats_;
};

namespace {

bool MemberAccepts(const ModuleState& state, ValueId member, int dim,
                   int axis) {
  const PartitionProblem& p = state.problem();
  if (state.used_axes(member) & AxisBit(axis)) return false;
  int64_t parts = p.mesh().MaskSize(state.dim_axes(member, dim)) *
                  p.mesh().axis_size(axis);
  return p.dim_size(member, dim) % parts == 0;
}

void AppendLegal(const ModuleState& state, int axis, std::vector<Action>& out) {
  const PartitionProblem& p = state.problem();
  for (int g = 0; g < p.num_groups(); ++g) {
    if ((state.actionable_axes(g) & AxisBit(axis)) == 0) continue;
    const EquiShardGroup& group = p.group(g);
    const int rank = p.rank(group.members[0]);
    for (int d = 0; d < rank; ++d) {
      bool ok = std::all_of(
          group.members.begin(), group.members.end(),
          [&](ValueId m) { return MemberAccepts(state, m, d, axis); });
      if (ok) out.push_back({group.id, d, axis});
    }
  }
}

}  // namespace

std::vector<Action> LegalActions(const ModuleState& state, int axis) {
  std::vector<Action> out;
  AppendLegal(state, axis, out);
  return out;
}

absl::StatusOr<std::vector<Action>> LegalActions(const ModuleState& state,
                                                 absl::string_view axis_name) {
  std::optional<int> axis = state.mesh().FindAxis(axis_name);
  if (!axis.has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown mesh axis '", axis_name, "'"));
  }
  return LegalActions(state, *axis);
}

std::vector<Action> LegalActionsOnAxes(const ModuleState& state,
                                       AxisMask axes) {
  std::vector<Action> out;
  ForEachAxis(axes & state.mesh().all_axes(),
              [&](int axis) { AppendLegal(state, axis, out); });
  return out;
}

absl::Status CheckLegal(const ModuleState& state, const Action& action) {
  const PartitionProblem& p = state.problem();
  if (action.axis < 0 || action.axis >= p.mesh().num_axes()) {
    return absl::InvalidArgumentError(
        absl::StrCat("action names unknown axis index ", action.axis));
  }
  int g = p.graph().group_index(action.group);
  if (g < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("action names unknown group ", action.group));
  }
  const EquiShardGroup& group = p.group(g);
  const int rank = p.rank(group.members[0]);
  if (action.dim < 0 || action.dim >= rank) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dim ", action.dim, " out of range for group ", action.group,
        " of rank ", rank));
  }
  const std::string& axis_name = p.mesh().axis(action.axis).name;
  if ((state.actionable_axes(g) & AxisBit(action.axis)) == 0) {
    return absl::FailedPreconditionError(
        absl::StrCat("group ", action.group, " is not on the worklist of axis '",
                     axis_name, "'"));
  }
  for (ValueId m : group.members) {
    if (!MemberAccepts(state, m, action.dim, action.axis)) {
      return absl::FailedPreconditionError(absl::StrCat(
          "dim ", action.dim, " of '", p.graph().value_name(m), "' (size ",
          p.dim_size(m, action.dim), ") cannot take axis '", axis_name,
          "': divisibility or single-use violated"));
    }
  }
  return absl::OkStatus();
}

ModuleState ApplyLegalAction(const ModuleState& state, const Action& action,
                             PropagationStats* stats) {
  ModuleState next = state;
  Propagator propagator(next, stats);
  const EquiShardGroup& group =
      state.problem().group(state.graph().group_index(action.group));
  for (ValueId m : group.members) propagator.Seed(m, action.dim, action.axis);
  propagator.Run();
  propagator.UpdateWorklists();
  return next;
}

absl::StatusOr<ModuleState> ApplyAction(const ModuleState& state,
                                        const Action& action,
                                        PropagationStats* stats) {
  if (absl::Status s = CheckLegal(state, action); !s.ok()) return s;
  return ApplyLegalAction(state, action, stats);
}

std::vector<Sharding> Propagate(const PartitionProblem& problem,
                                std::vector<Sharding> shardings,
                                PropagationStats* stats) {
  // Non-owning handle; the state does not outlive this call.
  std::shared_ptr<const PartitionProblem> handle(
      std::shared_ptr<const PartitionProblem>(), &problem);
  ModuleState state = ModuleState::Initial(handle);
  Propagator propagator(state, stats);
  // Partial markers first so that they claim their axes.
  for (int v = 0; v < problem.graph().num_values(); ++v) {
    ForEachAxis(shardings[v].partial,
                [&](int axis) { propagator.SeedPartial(ValueId{v}, axis); });
  }
  for (int v = 0; v < problem.graph().num_values(); ++v) {
    const Sharding& s = shardings[v];
    for (int d = 0; d < static_cast<int>(s.per_dim.size()); ++d) {
      ForEachAxis(s.per_dim[d],
                  [&](int axis) { propagator.Seed(ValueId{v}, d, axis); });
    }
  }
  propagator.EnqueueAll();
  propagator.Run();
  std::vector<Sharding> out;
  out.reserve(problem.graph().num_values());
  for (int v = 0; v < problem.graph().num_values(); ++v) {
    out.push_back(state.sharding(ValueId{v}));
  }
  return out;
}

bool IsPropagationClosed(const ModuleState& state) {
  ModuleState copy = state;
  PropagationStats stats;
  Propagator propagator(copy, &stats);
  propagator.EnqueueAll();
  propagator.Run();
  return stats.additions == 0;
}

Fingerprint ComputeFingerprint(const ModuleState& state) {
  const PartitionProblem& p = state.problem();
  const Mesh& mesh = p.mesh();
  std::vector<int> by_name(mesh.num_axes());
  for (int i = 0; i < mesh.num_axes(); ++i) by_name[i] = i;
  std::sort(by_name.begin(), by_name.end(), [&](int a, int b) {
    return mesh.axis(a).name < mesh.axis(b).name;
  });
  std::string digest;
  for (int g = 0; g < p.num_groups(); ++g) {
    const EquiShardGroup& group = p.group(g);
    if (g > 0) digest.push_back('|');
    absl::StrAppend(&digest, group.id, ":");
    for (size_t m = 0; m < group.members.size(); ++m) {
      if (m > 0) digest.push_back(';');
      const ValueId v = group.members[m];
      for (int d = 0; d < p.rank(v); ++d) {
        if (d > 0) digest.push_back(',');
        AxisMask mask = state.dim_axes(v, d);
        if (mask == 0) {
          digest.push_back('_');
          continue;
        }
        bool first = true;
        for (int axis : by_name) {
          if ((mask & AxisBit(axis)) == 0) continue;
          if (!first) digest.push_back('+');
          digest.append(mesh.axis(axis).name);
          first = false;
        }
      }
    }
  }
  return Fingerprint{std::move(digest)};
}

}  // namespace meshsearch
