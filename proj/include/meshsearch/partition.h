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

#ifndef MESHSEARCH_PARTITION_H_
#define MESHSEARCH_PARTITION_H_

#include <compare>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "meshsearch/ir.h"
#include "meshsearch/mesh.h"

namespace meshsearch {

// Request to shard dimension `dim` of every member of an equi-shard group
// along mesh axis `axis` (an index into the mesh).
struct Action {
  int group = 0;  // EquiShardGroup id
  int dim = 0;
  int axis = 0;

  friend auto operator<=>(const Action&, const Action&) = default;
};

// Immutable graph + mesh pair with the lookup tables the partitioner needs.
// Shared between all states derived from it.
class PartitionProblem {
 public:
  // Fails if the graph has validation violations.
  static absl::StatusOr<std::shared_ptr<const PartitionProblem>> Create(
      Graph graph, Mesh mesh);

  const Graph& graph() const { return graph_; }
  const Mesh& mesh() const { return mesh_; }

  int num_groups() const { return static_cast<int>(graph_.groups().size()); }
  const EquiShardGroup& group(int index) const {
    return graph_.groups()[index];
  }
  int rank(ValueId v) const { return rank_[v.index]; }
  int dim_offset(ValueId v) const { return offset_[v.index]; }
  int64_t dim_size(ValueId v, int d) const { return sizes_[offset_[v.index] + d]; }
  int total_dims() const { return static_cast<int>(sizes_.size()); }
  const TensorType& type(ValueId v) const { return *graph_.value_type(v); }

  std::string ActionToString(const Action& action) const;

 private:
  PartitionProblem(Graph graph, Mesh mesh);

  Graph graph_;
  Mesh mesh_;
  std::vector<int> rank_;
  std::vector<int> offset_;
  std::vector<int64_t> sizes_;
};

// Canonical digest of every argument-group sharding: groups by id, members in
// group order, dims in order, axis names sorted.
struct Fingerprint {
  std::string digest;

  friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

// A propagation-closed assignment of shardings to every value plus the
// per-axis worklists. Cheap to copy; never mutated once published.
class ModuleState {
 public:
  static ModuleState Initial(std::shared_ptr<const PartitionProblem> problem);

  const PartitionProblem& problem() const { return *problem_; }
  const std::shared_ptr<const PartitionProblem>& shared_problem() const {
    return problem_;
  }
  const Graph& graph() const { return problem_->graph(); }
  const Mesh& mesh() const { return problem_->mesh(); }

  AxisMask dim_axes(ValueId v, int d) const {
    return dims_[problem_->dim_offset(v) + d];
  }
  AxisMask partial(ValueId v) const { return partial_[v.index]; }
  AxisMask used_axes(ValueId v) const;
  Sharding sharding(ValueId v) const;

  // Axes on which the group (by index) is still actionable.
  AxisMask actionable_axes(int group_index) const {
    return actionable_[group_index];
  }
  // Group ids still on the worklist of `axis`, ascending.
  std::vector<int> worklist(int axis) const;

  friend bool operator==(const ModuleState& a, const ModuleState& b) {
    return a.dims_ == b.dims_ && a.partial_ == b.partial_ &&
           a.actionable_ == b.actionable_;
  }

 private:
  friend class Propagator;

  std::shared_ptr<const PartitionProblem> problem_;
  std::vector<AxisMask> dims_;        // flattened per value, per dim
  std::vector<AxisMask> partial_;     // per value
  std::vector<AxisMask> actionable_;  // per group index
};

struct PropagationStats {
  int additions = 0;
  // Attempts to add an axis that failed on single-use or divisibility. These
  // are the spots where the first-arrival rule decided the outcome.
  int blocked = 0;
};

// Actions (g, d, axis) with g on the axis worklist and every member able to
// take the axis on d. Ordered by group id, then dim.
std::vector<Action> LegalActions(const ModuleState& state, int axis);
absl::StatusOr<std::vector<Action>> LegalActions(const ModuleState& state,
                                                 absl::string_view axis_name);
// Union over the axes in `axes`, ordered by axis, group id, dim.
std::vector<Action> LegalActionsOnAxes(const ModuleState& state, AxisMask axes);

absl::Status CheckLegal(const ModuleState& state, const Action& action);

// Applies the action to every group member, propagates to a fixpoint and
// shrinks the worklists.
absl::StatusOr<ModuleState> ApplyAction(const ModuleState& state,
                                        const Action& action,
                                        PropagationStats* stats = nullptr);
// Same as ApplyAction for an action known to be legal.
ModuleState ApplyLegalAction(const ModuleState& state, const Action& action,
                             PropagationStats* stats = nullptr);

// Runs the rule set to a fixpoint starting from `shardings` (one entry per
// value, arguments never partial). Blocked propagation is silent.
std::vector<Sharding> Propagate(const PartitionProblem& problem,
                                std::vector<Sharding> shardings,
                                PropagationStats* stats = nullptr);

// For each operand dim of a reshape, the target dim it maps onto one-to-one
// (same size, not merged or split with neighbours), or -1.
std::vector<int> ReshapeDimMap(const std::vector<int64_t>& from,
                               const std::vector<int64_t>& to);

// True when no rule can add anything to the state.
bool IsPropagationClosed(const ModuleState& state);

Fingerprint ComputeFingerprint(const ModuleState& state);

}  // namespace meshsearch

#endif  // MESHSEARCH_PARTITION_H_
