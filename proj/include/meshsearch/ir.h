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

#ifndef MESHSEARCH_IR_H_
#define MESHSEARCH_IR_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "meshsearch/mesh.h"

namespace meshsearch {

struct TensorType {
  std::vector<int64_t> dims;
  int64_t element_bytes = 4;

  int rank() const { return static_cast<int>(dims.size()); }
  int64_t num_elements() const;
  int64_t byte_size() const { return num_elements() * element_bytes; }
  std::string ToString() const;

  friend bool operator==(const TensorType&, const TensorType&) = default;
};

// Per-dimension mesh axis assignment plus the axes over which the value is an
// unreduced partial sum. An empty mask on a dim means replicated on that dim.
struct Sharding {
  std::vector<AxisMask> per_dim;
  AxisMask partial = 0;

  static Sharding Replicated(int rank) {
    return Sharding{std::vector<AxisMask>(rank, 0), 0};
  }

  AxisMask used_axes() const;
  bool is_replicated() const { return used_axes() == 0; }
  // Names each axis at most once across dims and partial axes.
  bool is_single_use() const;
  std::string ToString(const Mesh& mesh) const;

  friend bool operator==(const Sharding&, const Sharding&) = default;
};

// Shape of one device's shard. Fails when a dim is not divisible by the
// product of the axis sizes assigned to it.
absl::StatusOr<TensorType> LocalShape(const TensorType& type,
                                      const Sharding& sharding,
                                      const Mesh& mesh);

struct ValueId {
  int32_t index = -1;

  bool valid() const { return index >= 0; }
  friend auto operator<=>(const ValueId&, const ValueId&) = default;
};

template <typename H>
H AbslHashValue(H h, ValueId id) {
  return H::combine(std::move(h), id.index);
}

// Result dims are ordered batch dims, then lhs free dims, then rhs free dims.
struct DotGeneral {
  std::vector<int> lhs_batch;
  std::vector<int> rhs_batch;
  std::vector<int> lhs_contracting;
  std::vector<int> rhs_contracting;

  friend bool operator==(const DotGeneral&, const DotGeneral&) = default;
};

struct Elementwise {
  std::string name;
  int arity = 1;

  friend bool operator==(const Elementwise&, const Elementwise&) = default;
};

enum class ReduceKind { kSum, kMax };

struct Reduce {
  ReduceKind kind = ReduceKind::kSum;
  std::vector<int> dims;  // sorted

  friend bool operator==(const Reduce&, const Reduce&) = default;
};

struct Transpose {
  // Result dim i is operand dim permutation[i].
  std::vector<int> permutation;

  friend bool operator==(const Transpose&, const Transpose&) = default;
};

struct Reshape {
  std::vector<int64_t> target_dims;

  friend bool operator==(const Reshape&, const Reshape&) = default;
};

struct Constant {
  TensorType type;

  friend bool operator==(const Constant&, const Constant&) = default;
};

using OpKind =
    std::variant<DotGeneral, Elementwise, Reduce, Transpose, Reshape, Constant>;

absl::string_view OpKindName(const OpKind& kind);

struct Operation {
  ValueId id;
  OpKind kind;
  std::vector<ValueId> operands;
  TensorType result_type;
};

// Shape inference shared by builders, loaders and the validator.
absl::StatusOr<TensorType> InferResultType(
    const OpKind& kind, const std::vector<const TensorType*>& operands);

// For a DotGeneral, the positions of the free (non-batch, non-contracting)
// dims of one operand, in increasing order.
std::vector<int> FreeDims(int rank, const std::vector<int>& batch,
                          const std::vector<int>& contracting);

enum class ArgRole { kParameter, kOptimizerState, kData };

absl::string_view ArgRoleName(ArgRole role);
std::optional<ArgRole> ParseArgRole(absl::string_view name);

struct Argument {
  ValueId id;
  TensorType type;
  ArgRole role = ArgRole::kData;
  int group = 0;  // EquiShardGroup id
};

struct EquiShardGroup {
  int id = 0;
  std::vector<ValueId> members;
};

// A tensor computation in SSA form. Values are interned by name; a ValueId is
// an index into the name table. Construction never fails so that malformed
// inputs can be reported by ValidateGraph.
class Graph {
 public:
  static constexpr int kArgProducer = -1;
  static constexpr int kUndefined = -2;

  Graph() = default;
  Graph(std::string name, std::vector<std::string> value_names,
        std::vector<Argument> args, std::vector<Operation> ops,
        std::vector<ValueId> outputs);

  const std::string& name() const { return name_; }
  int num_values() const { return static_cast<int>(value_names_.size()); }
  const std::string& value_name(ValueId id) const {
    return value_names_[id.index];
  }
  std::optional<ValueId> FindValue(absl::string_view name) const;

  const std::vector<Argument>& args() const { return args_; }
  const std::vector<Operation>& ops() const { return ops_; }
  const std::vector<ValueId>& outputs() const { return outputs_; }
  // Derived from the arguments' group ids; sorted by id, members in argument
  // order.
  const std::vector<EquiShardGroup>& groups() const { return groups_; }

  // First definition of the value; nullptr when undefined.
  const TensorType* value_type(ValueId id) const;
  // Op index, kArgProducer or kUndefined.
  int producer(ValueId id) const { return producer_[id.index]; }
  // Index into args(), or -1.
  int arg_index(ValueId id) const { return arg_index_[id.index]; }
  // Op indices that read the value, ascending, one entry per op.
  const std::vector<int>& users(ValueId id) const { return users_[id.index]; }
  bool is_output(ValueId id) const { return is_output_[id.index]; }
  // Index into groups() for a group id, or -1.
  int group_index(int group_id) const;

 private:
  std::string name_;
  std::vector<std::string> value_names_;
  absl::flat_hash_map<std::string, int32_t> name_index_;
  std::vector<Argument> args_;
  std::vector<Operation> ops_;
  std::vector<ValueId> outputs_;
  std::vector<EquiShardGroup> groups_;

  std::vector<int> producer_;
  std::vector<int> arg_index_;
  std::vector<std::vector<int>> users_;
  std::vector<bool> is_output_;
};

// Builds well-formed graphs. Shape errors are sticky: the first one is
// returned by Build().
class GraphBuilder {
 public:
  explicit GraphBuilder(std::string name) : name_(std::move(name)) {}

  ValueId AddArg(absl::string_view name, TensorType type, ArgRole role,
                 int group);
  ValueId AddOp(absl::string_view name, OpKind kind,
                std::vector<ValueId> operands);

  ValueId Dot(absl::string_view name, ValueId lhs, ValueId rhs,
              std::vector<int> lhs_contracting,
              std::vector<int> rhs_contracting,
              std::vector<int> lhs_batch = {}, std::vector<int> rhs_batch = {});
  ValueId Unary(absl::string_view name, std::string op_name, ValueId x);
  ValueId Binary(absl::string_view name, std::string op_name, ValueId x,
                 ValueId y);
  ValueId Transposed(absl::string_view name, ValueId x,
                     std::vector<int> permutation);

  void AddOutput(ValueId id) { outputs_.push_back(id); }
  const TensorType& type(ValueId id) const { return types_[id.index]; }

  absl::StatusOr<Graph> Build() &&;

 private:
  ValueId Intern(absl::string_view name);

  std::string name_;
  absl::Status status_;
  std::vector<std::string> names_;
  absl::flat_hash_map<std::string, int32_t> index_;
  std::vector<TensorType> types_;
  std::vector<Argument> args_;
  std::vector<Operation> ops_;
  std::vector<ValueId> outputs_;
};

struct Violation {
  std::string value;  // value name, or "group <id>"
  std::string description;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Every invariant violation: arguments and groups first, then ops in order,
// then outputs. Empty means valid.
std::vector<Violation> ValidateGraph(const Graph& graph);

}  // namespace meshsearch

#endif  // MESHSEARCH_IR_H_
